#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scw/hp/ast.hpp"

namespace scw::hp {

// Total mapping from declared variables to reals.
using Valuation = std::map<std::string, double>;

struct UnboundVariable : std::runtime_error {
  explicit UnboundVariable(const std::string& name)
      : std::runtime_error("unbound variable '" + name + "'") {}
};

// Quantifiers, non-nilpotent ODEs, and the like: parseable but outside the
// executable subset.
struct UnsupportedConstruct : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exploration cannot be made measurable (e.g. a nondeterministic assignment
// with no adjacent bounding test).
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double eval_term(const Term& t, const Valuation& s);
bool eval_formula(const Formula& f, const Valuation& s);

struct ExplorationBudget {
  int loop_depth{6};         // unrollings explored per loop entry
  int nondet_samples{3};     // samples per nondeterministic assignment (>= 1)
  int ode_durations{3};      // durations per ODE (>= 2; endpoints forced)
  int monitor_points{0};     // dense in-ODE postcondition monitor (0 = off)
  std::size_t max_branches{200000};
  double half_interval_span{100.0};  // width given to one-sided sample intervals
  std::uint64_t seed{1};
};

// Replayable record of every nondeterministic decision along one run.
struct Event {
  enum class Kind { ChoiceLeft, ChoiceRight, LoopIter, LoopExit, Sample, Duration };
  Kind kind;
  double value{0.0};  // Sample / Duration payload
};
using EventLog = std::vector<Event>;

struct RunOutcome {
  bool aborted{false};  // a failed test removed this run
  Valuation val;
  EventLog log;
};

struct RunResult {
  std::vector<RunOutcome> outcomes;  // deterministic exploration order
  bool budget_exhausted{false};      // branch cap hit; never silently dropped
};

// Explores all runs of prog from `initial` within the budget. When
// monitor_post is given and budget.monitor_points >= 2, postcondition
// violations strictly inside an ODE interval fork an extra outcome at the
// violating duration (any prefix of a flow is itself a legal run).
RunResult run(const ProgramPtr& prog, const Valuation& initial,
              const ExplorationBudget& budget, FormulaPtr monitor_post = nullptr);

// Re-executes one run following a recorded log. Deterministic and
// bit-identical to the original exploration.
RunOutcome replay(const ProgramPtr& prog, const Valuation& initial,
                  const EventLog& log);

struct Counterexample {
  Valuation initial;
  EventLog log;
  Valuation final_state;
};

struct BoxStats {
  std::uint64_t init_candidates{0};
  std::uint64_t init_admitted{0};
  std::uint64_t completed_runs{0};
  std::uint64_t aborted_runs{0};
};

// Verdict of a bounded box-modality check. NoCounterexampleFound is not a
// proof: it only says that the sampled initial states and explored runs
// produced no violation.
struct BoxVerdict {
  bool found{false};
  std::optional<Counterexample> counterexample;
  bool budget_exhausted{false};
  BoxStats stats;
};

struct VarRange {
  std::string var;
  double lo{0.0};
  double hi{0.0};
};

// Samples initial valuations from a box of per-variable ranges; the first two
// candidates are the all-lower and all-upper corners. Candidates failing the
// init formula are discarded.
struct InitSampler {
  std::vector<VarRange> ranges;
  int samples{16};
};

BoxVerdict check_box(const FormulaPtr& init, const ProgramPtr& prog,
                     const FormulaPtr& post, const ExplorationBudget& budget,
                     const InitSampler& sampler);

// Line-oriented replay file: initial valuation and the event list, reals as
// decimals with 17 significant digits.
std::string serialize_counterexample(const Counterexample& cex);
Counterexample parse_counterexample(std::string_view text);

}  // namespace scw::hp
