#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scw/rational.hpp"
#include "scw/simulate.hpp"

namespace scw {

struct Interval {
  double lo{0.0};
  double hi{0.0};
};

// Sampling box for the metric-dominance study. Hypotheses of the dominance
// claim: a_n_min, a_n_max, T positive, a_n_min < a_s_min, v >= 0 and the
// nominal request within [-a_n_min, a_n_max] (enforced per tuple by
// clamping).
struct ParamRanges {
  Interval a_s_min{2.0, 10.0};
  Interval a_n_min{0.5, 1.9};
  Interval a_n_max{0.1, 4.0};
  Interval T{0.01, 2.0};
  Interval v{0.0, 40.0};
  Interval a_n{-10.0, 10.0};

  // Static hypothesis check: every sampled tuple must satisfy the
  // antecedent, so a_n_min's upper end must stay below a_s_min's lower end.
  bool valid(std::string* why = nullptr) const;
};

struct SampleTuple {
  double a_s_min, a_n_min, a_n_max, T, v, a_n;
};

struct StudyReport {
  std::string name;
  std::uint64_t samples{0};
  std::uint64_t failures{0};
  double worst_margin{0.0};
  std::string first_counterexample;  // empty when failures == 0
  std::uint64_t seed{0};
  std::string config_echo;
  // Study-specific counters (violations found, per-mode counts, ...).
  std::vector<std::pair<std::string, double>> extra;

  std::string to_key_value_text() const;
};

// Checks msd_1 >= msd_3 and msd_5 >= msd_3 on n random tuples satisfying the
// hypotheses plus the full corner grid of the ranges, under both threshold
// variants. Margins within 1e-6 of zero are re-decided in exact rational
// arithmetic; a failure is any margin below -1e-9 (or exactly negative on a
// rational recheck). Per-sample margins are appended to margins_csv when
// given.
StudyReport compare_metrics(const ParamRanges& ranges, std::uint64_t n,
                            std::uint64_t seed,
                            std::vector<std::string>* margins_csv = nullptr);

// Exact rational margins for one tuple (used by the near-tie recheck and
// exposed for tests): {msd1 - msd3, msd5 - msd3}. nullopt in the msd5 slot
// means the as-written threshold admits no finite gap (dominates trivially).
struct RationalMargins {
  Rational m1_minus_m3;
  std::optional<Rational> m5_minus_m3;
};
RationalMargins exact_margins(const SampleTuple& t, ThresholdVariant variant);

// Episode search for guarantee violations of the faulty-metric controller.
// Episode 0 is the canonical witness (v=1, a_n=-3, a_n_min=3, a_s_min=5,
// T=1, gap=0.1); the rest sample the witness family (v + a_n T < 0, gap just
// above the admissibility bound). Dense monitoring.
StudyReport falsify_wrong_msd(std::uint64_t n, std::uint64_t seed);

// Runs the same witness-family episode set with duration policy always-T
// twice: dense monitoring vs end-of-step-only monitoring. Expected: dense
// finds violations, end-of-step finds none, while the correct controller is
// clean either way.
StudyReport endstep_study(std::uint64_t n, std::uint64_t seed);

// Batch obligation checking across sampled parameter tuples.
StudyReport obligation_study(ModelId id, const ParamRanges& ranges,
                             std::uint64_t n, std::uint64_t seed,
                             ThresholdVariant m5_variant = ThresholdVariant::AsWritten);

// Witness-family episode configuration used by the falsification studies
// (exposed so tests and the acceptance suite can replay single episodes).
EpisodeConfig wrong_msd_witness_episode(std::uint64_t index, std::uint64_t seed,
                                        DurationPolicy duration_policy,
                                        MonitorMode monitor);

}  // namespace scw
