#pragma once

#include <cstdint>
#include <stdexcept>
#include <optional>
#include <string>
#include <vector>

#include "scw/controller.hpp"
#include "scw/environment.hpp"

namespace scw {

// Velocity slack separating true guarantee violations from float noise.
inline constexpr double kMonitorTol = 1e-9;

// Position slack of the violation monitor. Episodes of the proven-safe
// models converge onto the admissibility boundary (brake-to-stop ends with a
// true gap below one ulp), where a bare x >= x_c comparison flips on
// rounding noise; requiring a 1e-9 m excursion keeps every genuine violation
// (the faulty-metric family exceeds x_c by centimeters) while staying four
// orders of magnitude above double rounding at the distances involved.
inline constexpr double kPositionTol = 1e-9;

struct TraceRecord {
  double t{0.0};  // absolute time (s), nondecreasing along a trace
  VehicleState state;
  double a_n{0.0};
  double a_s{0.0};
  SafetyConstraint constraint;  // constraint in force during the step ending here
  bool intervened{false};
};

using Trace = std::vector<TraceRecord>;

enum class Outcome { Safe, Violation, BudgetExhausted };

struct Verdict {
  Outcome outcome{Outcome::Safe};
  double violation_time{0.0};
  VehicleState violation_state;
  std::uint64_t episodes{1};
  std::uint64_t seed{0};
};

enum class DurationPolicy { Sampled, AlwaysT };
enum class MonitorMode { Dense, EndOfStepOnly };

struct ConstraintPolicy {
  enum class Kind { Resample, Fixed };
  Kind kind{Kind::Resample};
  SafetyConstraint fixed;
};

struct NominalPolicy {
  enum class Kind { Random, Schedule };
  Kind kind{Kind::Random};
  std::vector<double> schedule;  // value per iteration; the last one is held
};

struct EpisodeConfig {
  ModelId model{ModelId::M1};
  SystemParams params;
  VehicleState initial;
  int depth{50};           // loop iterations to execute (>= 0)
  int dense_samples{20};   // monitor points per plant interval (>= 2)
  DurationPolicy duration_policy{DurationPolicy::Sampled};
  ConstraintPolicy constraint_policy;
  NominalPolicy nominal_policy;
  MonitorMode monitor{MonitorMode::Dense};
  double boundary_prob{0.25};
  std::uint64_t seed{0};
  ThresholdVariant m5_variant{ThresholdVariant::AsWritten};
};

struct EpisodeResult {
  Trace trace;
  Verdict verdict;
};

// Signals an initial state outside the model's admissible region (or an
// otherwise invalid configuration).
struct InitViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// One closed-loop episode of (env; ctrl; plant)^depth with the guarantee
// checked at analytic crossing events and at dense sample points of every
// plant interval (any intermediate state is a final state of some run, since
// both the repetition count and the plant durations are nondeterministic).
// A fixed constraint that becomes inadmissible ends the episode early, like
// the failing env test it models.
EpisodeResult run_episode(const EpisodeConfig& cfg);

// Re-checks a recorded trace against one fixed constraint: violation iff some
// record has x >= x_c + kPositionTol and v > v_c + kMonitorTol.
Verdict check_guarantee(const Trace& trace, const SafetyConstraint& c);

// Loop invariant of the model's safety proof, with slack `tol` on the
// distance margin. For the required-acceleration model the acceleration-
// domain condition a_req_zero >= -a_s_min is evaluated in its equivalent
// distance form (a vehicle at rest satisfies it for any gap).
bool loop_invariant(ModelId id, const VehicleState& s, const SafetyConstraint& c,
                    const SystemParams& p, double tol = kMonitorTol);

// The model's guarantee at a single state.
bool guarantee_holds(ModelId id, const VehicleState& s, const SafetyConstraint& c,
                     double tol = kMonitorTol);

struct ObligationFailure {
  int obligation{0};  // 1 = init->inv, 2 = step preservation, 3 = inv->guarantee
  int sample{0};
  VehicleState state;
  SafetyConstraint constraint;
  double a_n{0.0};
  double duration{0.0};
  VehicleState post;
  std::string detail;
};

struct ObligationReport {
  int samples{0};
  int fail_init{0};
  int fail_step{0};
  int fail_guarantee{0};
  std::optional<ObligationFailure> first_failure;
  bool all_passed() const {
    return fail_init == 0 && fail_step == 0 && fail_guarantee == 0;
  }
};

struct BatchResult {
  std::uint64_t episodes{0};
  std::uint64_t violations{0};
  std::optional<std::uint64_t> first_violation_episode;  // smallest index
  Verdict first_verdict;
};

// Runs `episodes` independent episodes of the base configuration, episode i
// seeded with mix_seed(master_seed, i). Episodes run concurrently; the
// aggregation is order-independent (the reported counterexample is the one
// with the smallest episode index, not the first seen on the wall clock).
BatchResult run_episode_batch(const EpisodeConfig& base, std::uint64_t episodes,
                              std::uint64_t master_seed, unsigned threads = 0);

// Spot-checks the three proof obligations of the loop-invariant rule on
// n_samples random states/constraints: (i) init implies the invariant,
// (ii) the invariant is preserved by one env-ctrl-plant step across 21
// durations in [0, T] including both endpoints, (iii) the invariant implies
// the guarantee. The first sample is placed on the admissibility boundary at
// low speed, where the faulty metric is known to fail.
ObligationReport check_invariant_obligations(
    ModelId id, const SystemParams& p, int n_samples, std::uint64_t seed,
    ThresholdVariant m5_variant = ThresholdVariant::AsWritten);

}  // namespace scw
