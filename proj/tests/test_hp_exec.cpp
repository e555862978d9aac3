#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "scw/controller.hpp"
#include "scw/hp/exec.hpp"
#include "scw/hp/parser.hpp"
#include "scw/rng.hpp"
#include "scw/scenario.hpp"

using namespace scw::hp;

namespace {

std::vector<const RunOutcome*> completed(const RunResult& r) {
  std::vector<const RunOutcome*> out;
  for (const auto& o : r.outcomes)
    if (!o.aborted) out.push_back(&o);
  return out;
}

// The controller blocks of the corpus transcriptions, as standalone programs.
const char* kCtrlM1 =
    "{ ?(2*asmin*(xc - x) >= 2*asmin*v*T + asmin*anmax*T^2 + (v + anmax*T)^2);"
    "  as := an }"
    "++"
    "{ ?(!(2*asmin*(xc - x) >= 2*asmin*v*T + asmin*anmax*T^2 + (v + anmax*T)^2));"
    "  as := -asmin }";

const char* kCtrlM3 =
    "{ ?((v + an*T >= 0 & 2*asmin*(xc - x) >= 2*asmin*v*T + asmin*an*T^2 + (v + an*T)^2)"
    "    | (v + an*T < 0 & 2*an*(xc - x) <= -(v^2))); as := an }"
    "++"
    "{ ?(!((v + an*T >= 0 & 2*asmin*(xc - x) >= 2*asmin*v*T + asmin*an*T^2 + (v + an*T)^2)"
    "      | (v + an*T < 0 & 2*an*(xc - x) <= -(v^2)))); as := -asmin }";

Valuation ctrl_valuation(const scw::VehicleState& s, double a_n,
                         const scw::SafetyConstraint& c, const scw::SystemParams& p) {
  return {{"x", s.x},         {"v", s.v},           {"xc", c.x_c},
          {"an", a_n},        {"asmin", p.a_s_min}, {"anmax", p.a_n_max},
          {"anmin", p.a_n_min}, {"T", p.T}};
}

double dsl_ctrl_output(const ProgramPtr& ctrl_prog, const Valuation& val) {
  ExplorationBudget b;
  const RunResult r = run(ctrl_prog, val, b);
  const auto done = completed(r);
  REQUIRE(done.size() == 1);  // the two guards are complementary
  return done.front()->val.at("as");
}

}  // namespace

TEST_CASE("term and formula evaluation") {
  const Valuation s{{"x", 1.0}, {"y", 3.0}};
  CHECK(eval_term(*parse_term("x + 2*y"), s) == 7.0);
  CHECK(eval_term(*parse_term("41.5"), {}) == 41.5);
  CHECK_THROWS_AS(eval_term(*parse_term("z + 1"), s), UnboundVariable);

  CHECK(eval_formula(*parse_formula("1 >= 0"), {}));
  CHECK(eval_formula(*parse_formula("x = x"), s));
  CHECK(!eval_formula(*parse_formula("0 > 0"), {}));
  CHECK_THROWS_AS(eval_formula(*parse_formula("forall q (q >= 0)"), s),
                  UnsupportedConstruct);
}

TEST_CASE("choice is exhaustive and failed tests abort") {
  const RunResult r = run(parse_program("x := 1 ++ x := 2"), {{"x", 0}}, {});
  const auto done = completed(r);
  REQUIRE(done.size() == 2);
  CHECK(done[0]->val.at("x") == 1.0);
  CHECK(done[1]->val.at("x") == 2.0);

  const RunResult ab = run(parse_program("?(1 > 2); x := 5"), {{"x", 0}}, {});
  REQUIRE(ab.outcomes.size() == 1);
  CHECK(ab.outcomes[0].aborted);
}

TEST_CASE("braking flow reaches the domain boundary exactly") {
  const RunResult r =
      run(parse_program("{x'=v, v'=-5 & v >= 0}"), {{"x", 0}, {"v", 10}}, {});
  bool saw_endpoint = false;
  for (const auto* o : completed(r)) {
    CHECK(o->val.at("v") >= 0.0);
    if (o->log.back().value == 2.0) {  // t_max
      saw_endpoint = true;
      CHECK(o->val.at("v") == 0.0);  // snapped onto the binding bound
      CHECK(o->val.at("x") == 10.0);
      const scw::EvolveResult ev = scw::evolve({0, 10}, -5, 2.0);
      CHECK(o->val.at("x") == ev.state.x);
    }
  }
  CHECK(saw_endpoint);
}

TEST_CASE("clock-bounded flow stops at tau = T") {
  const RunResult r = run(parse_program("tau := 0; {x'=v, tau'=1 & tau <= T}"),
                          {{"x", 0}, {"v", 3}, {"T", 0.25}}, {});
  double max_tau = -1;
  for (const auto* o : completed(r)) max_tau = std::max(max_tau, o->val.at("tau"));
  CHECK(max_tau == 0.25);
}

TEST_CASE("loops explore unrollings up to the budget") {
  ExplorationBudget b;
  b.loop_depth = 3;
  const RunResult r = run(parse_program("{x := x + 1}*"), {{"x", 0}}, b);
  std::vector<double> xs;
  for (const auto* o : completed(r)) xs.push_back(o->val.at("x"));
  CHECK(xs == std::vector<double>{0, 1, 2, 3});
}

TEST_CASE("nondeterministic assignment samples the bounded interval") {
  ExplorationBudget b;
  b.nondet_samples = 6;
  const RunResult r =
      run(parse_program("a := *; ?(-3 <= a & a <= 2)"), {}, b);
  const auto done = completed(r);
  REQUIRE(done.size() == 6);
  CHECK(done[0]->val.at("a") == -3.0);  // endpoints first
  CHECK(done[1]->val.at("a") == 2.0);
  for (const auto* o : done) {
    CHECK(o->val.at("a") >= -3.0);
    CHECK(o->val.at("a") <= 2.0);
  }

  // One-sided bound: explored over a span above the bound.
  const RunResult one = run(parse_program("w := *; ?(w >= 1)"), {}, b);
  for (const auto* o : completed(one)) CHECK(o->val.at("w") >= 1.0);

  // Point interval via an equality test.
  const RunResult pt = run(parse_program("p := *; ?(p = 5)"), {}, b);
  const auto pts = completed(pt);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0]->val.at("p") == 5.0);

  CHECK_THROWS_AS(run(parse_program("q := *"), {}, b), BudgetError);
  CHECK_THROWS_AS(run(parse_program("q := *; ?(q*q >= 0)"), {}, b), BudgetError);
}

TEST_CASE("box checking: exhaustive choice example") {
  const ProgramPtr prog = parse_program("x := 1 ++ x := 2");
  const FormulaPtr init = parse_formula("x = 0");
  InitSampler sampler{{{"x", 0, 0}}, 4};

  const BoxVerdict ok = check_box(init, prog, parse_formula("x <= 2"), {}, sampler);
  CHECK(!ok.found);

  const BoxVerdict bad = check_box(init, prog, parse_formula("x <= 1"), {}, sampler);
  REQUIRE(bad.found);
  CHECK(bad.counterexample->final_state.at("x") == 2.0);

  // Replays are bit-identical and reproduce the violation.
  const RunOutcome again =
      replay(prog, bad.counterexample->initial, bad.counterexample->log);
  CHECK(!again.aborted);
  CHECK(again.val == bad.counterexample->final_state);
  CHECK(!eval_formula(*parse_formula("x <= 1"), again.val));
}

TEST_CASE("counterexample files round-trip") {
  const Counterexample cex{{{"x", 0.1}, {"v", 1.0 / 3.0}},
                           {{Event::Kind::ChoiceLeft, 0},
                            {Event::Kind::Sample, -3.0000000000000004},
                            {Event::Kind::LoopIter, 0},
                            {Event::Kind::Duration, 0.12251482265544137},
                            {Event::Kind::LoopExit, 0}},
                           {{"x", 0.16666666666666666}}};
  const Counterexample back = parse_counterexample(serialize_counterexample(cex));
  CHECK(back.initial == cex.initial);
  CHECK(back.final_state == cex.final_state);
  REQUIRE(back.log.size() == cex.log.size());
  for (std::size_t i = 0; i < cex.log.size(); ++i) {
    CHECK(back.log[i].kind == cex.log[i].kind);
    CHECK(back.log[i].value == cex.log[i].value);
  }
}

TEST_CASE("budget growth keeps previously found counterexamples") {
  const ProgramPtr prog = parse_program(
      "{ a := *; ?(-3 <= a & a <= 2); x := x + a }*");
  const FormulaPtr init = parse_formula("x = 0");
  const FormulaPtr post = parse_formula("x >= -2");
  InitSampler sampler{{{"x", 0, 0}}, 2};
  ExplorationBudget base;
  base.loop_depth = 1;
  base.nondet_samples = 2;
  const BoxVerdict found = check_box(init, prog, post, base, sampler);
  REQUIRE(found.found);

  for (int dim = 0; dim < 4; ++dim) {
    ExplorationBudget grown = base;
    if (dim == 0) grown.loop_depth += 3;
    if (dim == 1) grown.nondet_samples += 3;
    if (dim == 2) grown.ode_durations += 3;
    if (dim == 3) grown.max_branches *= 2;
    const BoxVerdict still = check_box(init, prog, post, grown, sampler);
    CHECK(still.found);
  }
}

TEST_CASE("unsupported constructs are rejected, not mis-executed") {
  // Self-coupled flow: not nilpotent.
  CHECK_THROWS_AS(run(parse_program("{x'=x}"), {{"x", 1}}, {}), UnsupportedConstruct);
  // Chained dependency of order three.
  CHECK_THROWS_AS(run(parse_program("{x'=v, v'=w, w'=1}"),
                      {{"x", 0}, {"v", 0}, {"w", 0}}, {}),
                  UnsupportedConstruct);
  CHECK_THROWS_AS(run(parse_program("{x'=1, x'=2}"), {{"x", 0}}, {}),
                  UnsupportedConstruct);
  // Domain atom beyond quadratic in time.
  CHECK_THROWS_AS(run(parse_program("{x'=v, v'=1 & x*v >= 0}"),
                      {{"x", 0}, {"v", 1}}, {}),
                  UnsupportedConstruct);
  // Domain that never closes.
  CHECK_THROWS_AS(run(parse_program("{x'=1 & x >= 0}"), {{"x", 1}}, {}),
                  UnsupportedConstruct);
  // Domain false at time zero: the run is removed, like a failed test.
  const RunResult r = run(parse_program("{x'=1 & x <= 0}"), {{"x", 5}}, {});
  REQUIRE(r.outcomes.size() == 1);
  CHECK(r.outcomes[0].aborted);
}

TEST_CASE("branch cap reports budget exhaustion") {
  ExplorationBudget tiny;
  tiny.loop_depth = 20;
  tiny.max_branches = 10;
  const RunResult r = run(parse_program("{x := x + 1 ++ x := x - 1}*"), {{"x", 0}}, tiny);
  CHECK(r.budget_exhausted);
}

TEST_CASE("interpreted controllers match the native ones") {
  const ProgramPtr m1 = parse_program(kCtrlM1);
  const ProgramPtr m3 = parse_program(kCtrlM3);
  scw::Rng rng(61);
  for (int i = 0; i < 200; ++i) {
    const scw::SystemParams p{rng.uniform(0.5, 3), rng.uniform(0.5, 4),
                              rng.uniform(1, 9), rng.uniform(0.1, 1.5)};
    const scw::VehicleState s{rng.uniform(-50, 50), rng.uniform(0, 25)};
    const double a_n = rng.uniform(-p.a_n_min, p.a_n_max);
    const scw::SafetyConstraint c{s.x + rng.uniform(-2, 60), 0.0};
    const Valuation val = ctrl_valuation(s, a_n, c, p);
    CHECK(std::fabs(dsl_ctrl_output(m1, val) - scw::ctrl_m1(s, a_n, c, p).a_s) <= 1e-9);
    CHECK(std::fabs(dsl_ctrl_output(m3, val) - scw::ctrl_m3(s, a_n, c, p).a_s) <= 1e-9);
  }
}

TEST_CASE("the faulty transcription yields a replayable counterexample") {
  namespace fs = std::filesystem;
  const fs::path corpus = fs::path(SCW_SOURCE_DIR) / "corpus";
  const ProgramPtr prog =
      parse_program(scw::read_file((corpus / "model3_wrong.hp").string()));
  const FormulaPtr init =
      parse_formula(scw::read_file((corpus / "model3_wrong.init").string()));
  const FormulaPtr post =
      parse_formula(scw::read_file((corpus / "model3_wrong.post").string()));

  InitSampler sampler;
  sampler.ranges = {{"x", 0, 0},     {"v", 1, 1},     {"xc", 0.1, 0.1},
                    {"asmin", 5, 5}, {"anmax", 2, 2}, {"anmin", 3, 3},
                    {"T", 1, 1}};
  sampler.samples = 1;
  ExplorationBudget b;
  b.loop_depth = 2;
  b.monitor_points = 21;
  const BoxVerdict verdict = check_box(init, prog, post, b, sampler);
  REQUIRE(verdict.found);

  const RunOutcome again =
      replay(prog, verdict.counterexample->initial, verdict.counterexample->log);
  CHECK(!again.aborted);
  CHECK(again.val == verdict.counterexample->final_state);
  CHECK(!eval_formula(*post, again.val));
  CHECK(again.val.at("x") > 0.1);
  CHECK(again.val.at("v") > 0.0);

  // The clean transcriptions find nothing on the same budget.
  const ProgramPtr good =
      parse_program(scw::read_file((corpus / "model3.hp").string()));
  const BoxVerdict clean = check_box(init, good, post, b, sampler);
  CHECK(!clean.found);
}
