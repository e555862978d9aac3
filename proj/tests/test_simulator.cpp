#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "scw/analysis.hpp"
#include "scw/simulate.hpp"

using namespace scw;

namespace {

EpisodeConfig witness_config(ModelId model) {
  EpisodeConfig cfg;
  cfg.model = model;
  cfg.params = {2.0, 3.0, 5.0, 1.0};
  cfg.initial = {0.0, 1.0};
  cfg.depth = 3;
  cfg.duration_policy = DurationPolicy::AlwaysT;
  cfg.constraint_policy = {ConstraintPolicy::Kind::Fixed, {0.1, 0.0}};
  cfg.nominal_policy = {NominalPolicy::Kind::Schedule, {-3.0}};
  cfg.seed = 7;
  return cfg;
}

EpisodeConfig stop_at_28_config() {
  EpisodeConfig cfg;
  cfg.model = ModelId::M1;
  cfg.params = {2.0, 3.0, 5.0, 0.5};
  cfg.initial = {0.0, 0.0};
  cfg.depth = 200;
  cfg.duration_policy = DurationPolicy::AlwaysT;
  cfg.constraint_policy = {ConstraintPolicy::Kind::Fixed, {28.0, 0.0}};
  cfg.nominal_policy = {NominalPolicy::Kind::Schedule, {2.0}};
  cfg.seed = 1;
  return cfg;
}

}  // namespace

TEST_CASE("nominal-at-maximum episode stops at or before the critical position") {
  const EpisodeResult r = run_episode(stop_at_28_config());
  CHECK(r.verdict.outcome == Outcome::Safe);
  CHECK(r.trace.back().state.v == 0.0);
  CHECK(r.trace.back().state.x <= 28.0);
}

TEST_CASE("faulty-metric witness violates mid-interval") {
  const EpisodeResult r = run_episode(witness_config(ModelId::M3Wrong));
  REQUIRE(r.verdict.outcome == Outcome::Violation);
  const auto t_cross = oracle::bisect_crossing(0, 1, -3, 0.1, 1, 1e-12);
  REQUIRE(t_cross.has_value());
  CHECK(std::fabs(r.verdict.violation_time - *t_cross) <= 1e-6);
  const double v_cross = 1.0 - 3.0 * *t_cross;
  CHECK(std::fabs(r.verdict.violation_state.v - v_cross) <= 1e-6);

  // The corrected controller stops exactly on the constraint instead.
  const EpisodeResult ok = run_episode(witness_config(ModelId::M3));
  CHECK(ok.verdict.outcome == Outcome::Safe);
  CHECK(std::fabs(ok.trace.back().state.x - 0.1) <= 1e-9);
  CHECK(ok.trace.back().state.v == 0.0);
}

TEST_CASE("zero-iteration episode is the empty repetition") {
  EpisodeConfig cfg = stop_at_28_config();
  cfg.depth = 0;
  const EpisodeResult r = run_episode(cfg);
  CHECK(r.verdict.outcome == Outcome::Safe);
  CHECK(r.trace.size() == 1);
}

TEST_CASE("check_guarantee re-monitors recorded intervals") {
  Trace stationary{{0.0, {0, 0}, 0, 0, {5, 0}, false},
                   {1.0, {0, 0}, 0, 0, {5, 0}, false}};
  CHECK(check_guarantee(stationary, {5, 0}).outcome == Outcome::Safe);

  // Boundary record: non-strict comparison admits x = x_c at v = v_c.
  Trace boundary{{0.0, {5, 0}, 0, 0, {5, 0}, false}};
  CHECK(check_guarantee(boundary, {5, 0}).outcome == Outcome::Safe);

  // The witness violation happens strictly between records.
  const EpisodeResult r = run_episode(witness_config(ModelId::M3Wrong));
  const Verdict v = check_guarantee(r.trace, {0.1, 0.0});
  CHECK(v.outcome == Outcome::Violation);
  CHECK(std::fabs(v.violation_time - r.verdict.violation_time) <= 1e-6);
}

TEST_CASE("dense monitoring separates from end-of-step monitoring") {
  EpisodeConfig cfg = witness_config(ModelId::M3Wrong);
  cfg.monitor = MonitorMode::EndOfStepOnly;
  CHECK(run_episode(cfg).verdict.outcome == Outcome::Safe);
  cfg.monitor = MonitorMode::Dense;
  CHECK(run_episode(cfg).verdict.outcome == Outcome::Violation);
}

TEST_CASE("traces replay through the kinematics") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    EpisodeConfig cfg;
    cfg.model = ModelId::M2;
    cfg.params = {2.0, 3.0, 5.0, 0.5};
    cfg.initial = {0.0, 12.0};
    cfg.depth = 30;
    cfg.seed = seed;
    const EpisodeResult r = run_episode(cfg);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      const auto& prev = r.trace[i - 1];
      const auto& cur = r.trace[i];
      CHECK(cur.t >= prev.t);
      const EvolveResult ev = evolve(prev.state, cur.a_s, cur.t - prev.t);
      CHECK(std::fabs(ev.state.x - cur.state.x) <= 1e-9);
      CHECK(std::fabs(ev.state.v - cur.state.v) <= 1e-9);
    }
  }
}

TEST_CASE("identical configurations give bit-identical traces") {
  EpisodeConfig cfg;
  cfg.model = ModelId::M4;
  cfg.params = {2.0, 3.0, 5.0, 0.5};
  cfg.initial = {0.0, 9.0};
  cfg.depth = 40;
  cfg.seed = 77;
  const EpisodeResult a = run_episode(cfg);
  const EpisodeResult b = run_episode(cfg);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].t == b.trace[i].t);
    CHECK(a.trace[i].state.x == b.trace[i].state.x);
    CHECK(a.trace[i].state.v == b.trace[i].state.v);
    CHECK(a.trace[i].a_n == b.trace[i].a_n);
    CHECK(a.trace[i].a_s == b.trace[i].a_s);
    CHECK(a.trace[i].constraint.x_c == b.trace[i].constraint.x_c);
    CHECK(a.trace[i].constraint.v_c == b.trace[i].constraint.v_c);
    CHECK(a.trace[i].intervened == b.trace[i].intervened);
  }
}

TEST_CASE("resampling moves the constraint between iterations") {
  EpisodeConfig cfg;
  cfg.model = ModelId::M1;
  cfg.params = {2.0, 3.0, 5.0, 0.5};
  cfg.initial = {0.0, 10.0};
  cfg.depth = 20;
  cfg.seed = 5;
  const EpisodeResult r = run_episode(cfg);
  bool moved = false;
  for (std::size_t i = 2; i < r.trace.size(); ++i)
    moved = moved || r.trace[i].constraint.x_c != r.trace[i - 1].constraint.x_c;
  CHECK(moved);
  // Each iteration's constraint is admissible for the state it was drawn in.
  for (std::size_t i = 1; i < r.trace.size(); ++i)
    CHECK(admissible(cfg.model, r.trace[i - 1].state, r.trace[i].constraint,
                     cfg.params));
}

TEST_CASE("inadmissible fixed initial state is an init violation") {
  EpisodeConfig cfg;
  cfg.model = ModelId::M1;
  cfg.params = {2.0, 3.0, 5.0, 0.5};
  cfg.initial = {0.0, 10.0};  // needs 10 m, given 5
  cfg.depth = 5;
  cfg.constraint_policy = {ConstraintPolicy::Kind::Fixed, {5.0, 0.0}};
  CHECK_THROWS_AS(run_episode(cfg), InitViolation);

  EpisodeConfig bad = cfg;
  bad.constraint_policy = {};
  bad.initial.v = -1.0;
  CHECK_THROWS_AS(run_episode(bad), InitViolation);

  EpisodeConfig m5 = cfg;
  m5.constraint_policy = {};
  m5.model = ModelId::M5;
  m5.params.a_n_min = 6.0;
  CHECK_THROWS_AS(run_episode(m5), InitViolation);
}

TEST_CASE("seeded batches of the correct models stay clean") {
  for (ModelId id : {ModelId::M1, ModelId::M2, ModelId::M3, ModelId::M4, ModelId::M5}) {
    EpisodeConfig base;
    base.model = id;
    base.params = {2.0, 3.0, 5.0, 0.5};
    base.initial = {0.0, 10.0};
    base.depth = 50;
    const BatchResult r = run_episode_batch(base, 5000, 1234);
    CHECK(r.episodes == 5000);
    CHECK(r.violations == 0);
  }
}

TEST_CASE("obligations hold for the proven models and fail for the faulty one") {
  const SystemParams p{2.0, 3.0, 5.0, 0.5};
  for (ModelId id : {ModelId::M1, ModelId::M2, ModelId::M3, ModelId::M4, ModelId::M5}) {
    const ObligationReport r = check_invariant_obligations(id, p, 3000, 99);
    CHECK(r.all_passed());
  }
  CHECK_THROWS_AS(check_invariant_obligations(ModelId::M5, {2.0, 6.0, 5.0, 0.5}, 10, 1),
                  std::invalid_argument);
  const ObligationReport wrong =
      check_invariant_obligations(ModelId::M3Wrong, {2.0, 3.0, 5.0, 1.0}, 10000, 99);
  CHECK(wrong.fail_step > 0);
  REQUIRE(wrong.first_failure.has_value());
  CHECK(wrong.first_failure->obligation == 2);
}
