// scw: simulate, falsify, and cross-check the longitudinal safety controller
// models and their hybrid-program transcriptions.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scw/analysis.hpp"
#include "scw/hp/exec.hpp"
#include "scw/hp/parser.hpp"
#include "scw/scenario.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCounterexample = 1;
constexpr int kUsageError = 2;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_path) {
  const scw::EpisodeConfig cfg = scw::load_scenario(scenario_path);
  const scw::EpisodeResult r = scw::run_episode(cfg);
  if (!out_path.empty()) scw::write_file_atomic(out_path, scw::trace_to_csv(r.trace));
  const auto& last = r.trace.back();
  std::cout << "episode: model=" << scw::to_string(cfg.model) << " seed=" << cfg.seed
            << " records=" << r.trace.size() << "\n";
  std::cout << "final: t=" << fmt(last.t) << " x=" << fmt(last.state.x)
            << " v=" << fmt(last.state.v) << "\n";
  if (r.verdict.outcome == scw::Outcome::Violation) {
    std::cout << "violation: t=" << fmt(r.verdict.violation_time)
              << " x=" << fmt(r.verdict.violation_state.x)
              << " v=" << fmt(r.verdict.violation_state.v) << "\n";
    return kCounterexample;
  }
  std::cout << "verdict: safe\n";
  return kOk;
}

struct CheckOptions {
  std::string model{"m1"};
  std::uint64_t episodes{10000};
  std::uint64_t seed{1};
  int depth{50};
  int dense_samples{20};
  double boundary_prob{0.25};
  int obligation_samples{2000};
  scw::SystemParams params;
  std::string violation_out{"violation.json"};
  unsigned threads{0};
};

int cmd_check(const CheckOptions& opt) {
  const auto id = scw::model_from_string(opt.model);
  if (!id) {
    std::cerr << "unknown model '" << opt.model << "'\n";
    return kUsageError;
  }
  scw::EpisodeConfig base;
  base.model = *id;
  base.params = opt.params;
  base.depth = opt.depth;
  base.dense_samples = opt.dense_samples;
  base.boundary_prob = opt.boundary_prob;
  base.duration_policy = scw::DurationPolicy::Sampled;

  const scw::BatchResult batch =
      scw::run_episode_batch(base, opt.episodes, opt.seed, opt.threads);
  std::cout << "model = " << scw::to_string(*id) << "\n";
  std::cout << "seed = " << opt.seed << "\n";
  std::cout << "episodes = " << batch.episodes << "\n";
  std::cout << "violations = " << batch.violations << "\n";

  const scw::ObligationReport obl = scw::check_invariant_obligations(
      *id, opt.params, opt.obligation_samples, scw::mix_seed(opt.seed, 0x0b1ull));
  std::cout << "obligation_samples = " << obl.samples << "\n";
  std::cout << "obligation_failures = "
            << (obl.fail_init + obl.fail_step + obl.fail_guarantee) << "\n";
  if (obl.first_failure) {
    const auto& f = *obl.first_failure;
    std::cout << "first_obligation_failure = obligation " << f.obligation
              << " sample " << f.sample << " (" << f.detail << ")\n";
  }

  if (batch.first_violation_episode) {
    scw::EpisodeConfig repro = base;
    repro.seed = scw::mix_seed(opt.seed, *batch.first_violation_episode);
    scw::write_file_atomic(
        opt.violation_out,
        scw::scenario_to_text(repro, "violating episode " +
                                         std::to_string(*batch.first_violation_episode) +
                                         "; rerun with: scw simulate <this file>"));
    std::cout << "first_violation_episode = " << *batch.first_violation_episode
              << " (t=" << fmt(batch.first_verdict.violation_time)
              << ", v=" << fmt(batch.first_verdict.violation_state.v) << ")\n"
              << "replay_file = " << opt.violation_out << "\n";
  }
  return (batch.violations == 0 && obl.all_passed()) ? kOk : kCounterexample;
}

int cmd_compare(std::uint64_t samples, std::uint64_t seed, const std::string& ranges_path,
                const std::string& out_path, const std::string& margins_path) {
  scw::ParamRanges ranges;
  if (!ranges_path.empty()) ranges = scw::load_ranges(ranges_path);
  std::string why;
  if (!ranges.valid(&why)) {
    std::cerr << "invalid ranges: " << why << "\n";
    return kUsageError;
  }
  std::vector<std::string> csv;
  const scw::StudyReport rep =
      scw::compare_metrics(ranges, samples, seed, margins_path.empty() ? nullptr : &csv);
  const std::string text = rep.to_key_value_text();
  std::cout << text;
  if (!out_path.empty()) scw::write_file_atomic(out_path, text);
  if (!margins_path.empty()) {
    std::string joined;
    for (const auto& line : csv) joined += line + "\n";
    scw::write_file_atomic(margins_path, joined);
  }
  return rep.failures == 0 ? kOk : kCounterexample;
}

scw::hp::Valuation parse_state(const std::string& text) {
  scw::hp::Valuation v;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw scw::ScenarioError("bad --state entry '" + item + "' (want var=value)");
    v[item.substr(0, eq)] = std::strtod(item.c_str() + eq + 1, nullptr);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return v;
}

std::vector<scw::hp::VarRange> parse_ranges_flags(const std::vector<std::string>& flags) {
  std::vector<scw::hp::VarRange> out;
  for (const auto& f : flags) {
    const std::size_t eq = f.find('=');
    const std::size_t colon = f.find(':', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || colon == std::string::npos)
      throw scw::ScenarioError("bad --range entry '" + f + "' (want var=lo:hi)");
    scw::hp::VarRange r;
    r.var = f.substr(0, eq);
    r.lo = std::strtod(f.c_str() + eq + 1, nullptr);
    r.hi = std::strtod(f.c_str() + colon + 1, nullptr);
    out.push_back(r);
  }
  return out;
}

std::string formula_arg(const std::string& inline_text, const std::string& file) {
  if (!inline_text.empty()) return inline_text;
  if (!file.empty()) return scw::read_file(file);
  throw scw::ScenarioError("a formula is required (inline or via file)");
}

int cmd_hp_run(const std::string& path, const std::string& state,
               const scw::hp::ExplorationBudget& budget, int print_limit) {
  const auto prog = scw::hp::parse_program(scw::read_file(path));
  const auto initial = parse_state(state);
  const scw::hp::RunResult result = scw::hp::run(prog, initial, budget);
  std::cout << "seed = " << budget.seed << "\n";
  std::size_t aborted = 0, printed = 0;
  for (const auto& out : result.outcomes) {
    if (out.aborted) {
      ++aborted;
      continue;
    }
    if (static_cast<int>(printed++) >= print_limit) continue;
    std::cout << "completed:";
    for (const auto& [name, value] : out.val) std::cout << " " << name << "=" << fmt(value);
    std::cout << "\n";
  }
  std::cout << "outcomes = " << result.outcomes.size() << " (aborted " << aborted << ")\n";
  if (result.budget_exhausted) std::cout << "budget_exhausted = true\n";
  return kOk;
}

int cmd_hp_check(const std::string& path, const std::string& init_text,
                 const std::string& post_text, const std::vector<std::string>& ranges,
                 int init_samples, const scw::hp::ExplorationBudget& budget,
                 const std::string& replay_out) {
  const auto prog = scw::hp::parse_program(scw::read_file(path));
  const auto init = scw::hp::parse_formula(init_text);
  const auto post = scw::hp::parse_formula(post_text);
  scw::hp::InitSampler sampler;
  sampler.ranges = parse_ranges_flags(ranges);
  sampler.samples = init_samples;
  const scw::hp::BoxVerdict verdict = scw::hp::check_box(init, prog, post, budget, sampler);
  std::cout << "seed = " << budget.seed << "\n"
            << "init_candidates = " << verdict.stats.init_candidates << "\n"
            << "init_admitted = " << verdict.stats.init_admitted << "\n"
            << "completed_runs = " << verdict.stats.completed_runs << "\n"
            << "aborted_runs = " << verdict.stats.aborted_runs << "\n";
  if (verdict.budget_exhausted) std::cout << "budget_exhausted = true\n";
  if (!verdict.found) {
    // Bounded search only; not a proof.
    std::cout << "verdict = no-counterexample-found\n";
    return kOk;
  }
  scw::write_file_atomic(replay_out,
                         scw::hp::serialize_counterexample(*verdict.counterexample));
  std::cout << "verdict = counterexample\n" << "replay_file = " << replay_out << "\n";
  for (const auto& [name, value] : verdict.counterexample->final_state)
    std::cout << "final " << name << " = " << fmt(value) << "\n";
  return kCounterexample;
}

int cmd_hp_replay(const std::string& path, const std::string& replay_path,
                  const std::string& post_text) {
  const auto prog = scw::hp::parse_program(scw::read_file(path));
  const auto post = scw::hp::parse_formula(post_text);
  const scw::hp::Counterexample cex =
      scw::hp::parse_counterexample(scw::read_file(replay_path));
  const scw::hp::RunOutcome out = scw::hp::replay(prog, cex.initial, cex.log);
  if (out.aborted) {
    std::cout << "replay aborted (log does not reach a completed run)\n";
    return kOk;
  }
  bool matches_recorded = !cex.final_state.empty();
  for (const auto& [name, value] : cex.final_state) {
    const auto it = out.val.find(name);
    if (it == out.val.end() || it->second != value) matches_recorded = false;
  }
  for (const auto& [name, value] : out.val)
    std::cout << "final " << name << " = " << fmt(value) << "\n";
  if (!cex.final_state.empty())
    std::cout << "matches_recorded_final = " << (matches_recorded ? "yes" : "no") << "\n";
  if (!scw::hp::eval_formula(*post, out.val)) {
    std::cout << "postcondition = violated\n";
    return kCounterexample;
  }
  std::cout << "postcondition = holds\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification workbench for longitudinal safety controllers"};
  app.require_subcommand(1);

  // simulate
  std::string scenario_path, trace_out;
  auto* simulate = app.add_subcommand("simulate", "run one scenario episode");
  simulate->add_option("scenario", scenario_path, "scenario JSON file")->required();
  simulate->add_option("--out", trace_out, "trace CSV output path");

  // check
  CheckOptions check;
  auto* checkc = app.add_subcommand("check", "batch guarantee + obligation checking");
  checkc->add_option("--model", check.model, "m1|m2|m3|m4|m5|m3-wrong")->required();
  checkc->add_option("--episodes", check.episodes, "episode count");
  checkc->add_option("--seed", check.seed, "master seed");
  checkc->add_option("--depth", check.depth, "loop iterations per episode");
  checkc->add_option("--dense-samples", check.dense_samples, "monitor points per interval");
  checkc->add_option("--boundary-prob", check.boundary_prob, "boundary-exact env draws");
  checkc->add_option("--obligation-samples", check.obligation_samples,
                     "loop-invariant obligation samples");
  checkc->add_option("--a-n-max", check.params.a_n_max, "nominal acceleration limit");
  checkc->add_option("--a-n-min", check.params.a_n_min, "nominal braking magnitude");
  checkc->add_option("--a-s-min", check.params.a_s_min, "safety braking magnitude");
  checkc->add_option("--T", check.params.T, "sampling period");
  checkc->add_option("--violation-out", check.violation_out, "repro scenario path");
  checkc->add_option("--threads", check.threads, "worker threads (0 = auto)");

  // compare
  std::uint64_t cmp_samples = 1000000, cmp_seed = 1;
  std::string cmp_ranges, cmp_out = "compare-report.txt", cmp_margins;
  auto* compare = app.add_subcommand("compare", "metric dominance study");
  compare->add_option("--samples", cmp_samples, "random tuples");
  compare->add_option("--seed", cmp_seed, "seed");
  compare->add_option("--ranges", cmp_ranges, "ranges JSON file");
  compare->add_option("--out", cmp_out, "report output path");
  compare->add_option("--margins-csv", cmp_margins, "per-sample margins CSV");

  // hp
  auto* hp = app.add_subcommand("hp", "hybrid-program interpreter");
  hp->require_subcommand(1);
  scw::hp::ExplorationBudget budget;
  std::string hp_path, hp_state, hp_init, hp_init_file, hp_post, hp_post_file;
  std::string hp_replay_out = "counterexample.replay", hp_replay_in;
  std::vector<std::string> hp_ranges;
  int hp_init_samples = 16, hp_print = 20;

  const auto add_budget = [&](CLI::App* cmd) {
    cmd->add_option("--loop-depth", budget.loop_depth, "loop unrollings");
    cmd->add_option("--nondet-samples", budget.nondet_samples, "samples per x := *");
    cmd->add_option("--ode-durations", budget.ode_durations, "durations per ODE");
    cmd->add_option("--monitor-points", budget.monitor_points, "dense monitor grid");
    cmd->add_option("--max-branches", budget.max_branches, "live branch cap");
    cmd->add_option("--span", budget.half_interval_span, "width for one-sided bounds");
    cmd->add_option("--seed", budget.seed, "exploration seed");
  };

  auto* hp_run = hp->add_subcommand("run", "enumerate run outcomes");
  hp_run->add_option("program", hp_path, "program file")->required();
  hp_run->add_option("--state", hp_state, "initial valuation: x=0,v=1,...")->required();
  hp_run->add_option("--print", hp_print, "completed outcomes to print");
  add_budget(hp_run);

  auto* hp_check = hp->add_subcommand("check", "bounded box-modality falsification");
  hp_check->add_option("program", hp_path, "program file")->required();
  hp_check->add_option("--init", hp_init, "initial-condition formula");
  hp_check->add_option("--init-file", hp_init_file, "initial-condition formula file");
  hp_check->add_option("--post", hp_post, "postcondition formula");
  hp_check->add_option("--post-file", hp_post_file, "postcondition formula file");
  hp_check->add_option("--range", hp_ranges, "sample range var=lo:hi (repeatable)");
  hp_check->add_option("--init-samples", hp_init_samples, "initial valuations");
  hp_check->add_option("--replay-out", hp_replay_out, "counterexample replay path");
  add_budget(hp_check);

  auto* hp_replay = hp->add_subcommand("replay", "re-run a recorded counterexample");
  hp_replay->add_option("program", hp_path, "program file")->required();
  hp_replay->add_option("--replay", hp_replay_in, "replay file")->required();
  hp_replay->add_option("--post", hp_post, "postcondition formula");
  hp_replay->add_option("--post-file", hp_post_file, "postcondition formula file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(scenario_path, trace_out);
    if (checkc->parsed()) return cmd_check(check);
    if (compare->parsed())
      return cmd_compare(cmp_samples, cmp_seed, cmp_ranges, cmp_out, cmp_margins);
    if (hp_run->parsed()) return cmd_hp_run(hp_path, hp_state, budget, hp_print);
    if (hp_check->parsed())
      return cmd_hp_check(hp_path, formula_arg(hp_init, hp_init_file),
                          formula_arg(hp_post, hp_post_file), hp_ranges,
                          hp_init_samples, budget, hp_replay_out);
    if (hp_replay->parsed())
      return cmd_hp_replay(hp_path, hp_replay_in, formula_arg(hp_post, hp_post_file));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}
