#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "scw/controller.hpp"
#include "scw/environment.hpp"
#include "scw/rng.hpp"
#include "scw/simulate.hpp"

using namespace scw;

namespace {
const SystemParams kP{2.0, 3.0, 5.0, 0.5};
}

TEST_CASE("ctrl_m1 decision") {
  // msd_conservative(10, 0.5) = 17.35.
  const ControlOutput pass = ctrl_m1({0, 10}, 2, {100, 0}, kP);
  CHECK(pass.a_s == 2.0);
  CHECK(!pass.intervened);

  const ControlOutput brake = ctrl_m1({0, 10}, 2, {17, 0}, kP);
  CHECK(brake.a_s == -5.0);
  CHECK(brake.intervened);

  // At rest with zero gap the conservative check still prices in a worst-case
  // acceleration phase, so the request is rejected (braking holds the car).
  const ControlOutput rest = ctrl_m1({0, 0}, 0, {0, 0}, kP);
  CHECK(rest.a_s == -5.0);
  CHECK(rest.intervened);
  CHECK(msd_conservative(0, kP.T, kP) > 0.0);

  // The boundary case that does admit the request: gap exactly msd(T).
  const double tight = msd_conservative(0, kP.T, kP);
  CHECK(!ctrl_m1({0, 0}, 0, {tight, 0}, kP).intervened);
}

TEST_CASE("ctrl_m2/m3/m4 and the faulty variant share the decision shape") {
  // m2: msd_conservative_vc(10, 5, 0.5) = 14.85.
  CHECK(!ctrl_m2({0, 10}, 2, {15, 5}, kP).intervened);
  CHECK(ctrl_m2({0, 10}, 2, {14.8, 5}, kP).intervened);

  // m3 witness geometry (T = 1): msd_permissive(1, -3) = 1/6 > 0.1.
  SystemParams p = kP;
  p.T = 1.0;
  CHECK(ctrl_m3({0, 1}, -3, {0.1, 0}, p).intervened);
  CHECK(!ctrl_m3({0, 1}, -3, {0.2, 0}, p).intervened);

  // m4: msd_permissive_vc(10, 1, 5, 0.5) = 13.65.
  CHECK(!ctrl_m4({0, 10}, 1, {13.65, 5}, kP).intervened);
  CHECK(ctrl_m4({0, 10}, 1, {13.6, 5}, kP).intervened);

  // The faulty metric admits the witness request the corrected one rejects.
  const ControlOutput wrong = ctrl_m3_wrong({0, 1}, -3, {0.1, 0}, p);
  CHECK(!wrong.intervened);
  CHECK(wrong.a_s == -3.0);
}

TEST_CASE("ctrl_m5 decision and parameter contract") {
  const SystemParams p{2.0, 3.0, 5.0, 0.5};
  // msd_areq(10, 1) = 23.5.
  const ControlOutput pass = ctrl_m5({0, 10}, 1, {30, 0}, p);
  CHECK(pass.a_s == 1.0);
  CHECK(!pass.intervened);

  const ControlOutput brake = ctrl_m5({0, 10}, 1, {20, 0}, p);
  CHECK(brake.a_s == -5.0);
  CHECK(brake.intervened);

  CHECK(!ctrl_m5({0, 0}, 0, {1, 0}, p).intervened);

  SystemParams bad = p;
  bad.a_n_min = 5.0;  // not < a_s_min
  CHECK_THROWS_AS(ctrl_m5({0, 10}, 1, {30, 0}, bad), std::invalid_argument);
}

TEST_CASE("ctrl_relaxed intervention interval") {
  SystemParams p = kP;
  p.a_s_min = 6.0;
  // Unsafe at gap 10 from v = 10: a_req_zero = -5, interval [-6, -5].
  const ControlOutput lo = ctrl_relaxed({0, 10}, 2, {10, 0}, p,
                                        [](double l, double) { return l; });
  CHECK(lo.intervened);
  CHECK(lo.a_s == -6.0);
  const ControlOutput hi = ctrl_relaxed({0, 10}, 2, {10, 0}, p,
                                        [](double, double h) { return h; });
  CHECK(hi.a_s == doctest::Approx(-5.0));

  // Empty interval (a_req below the braking capability): forced fallback.
  SystemParams weak = kP;
  weak.a_s_min = 4.0;
  const ControlOutput forced = ctrl_relaxed({0, 10}, 2, {10, 0}, weak,
                                            [](double, double h) { return h; });
  CHECK(forced.intervened);
  CHECK(forced.infeasible);
  CHECK(forced.a_s == -4.0);

  // Safe branch is unchanged.
  const ControlOutput safe = ctrl_relaxed({0, 10}, 2, {100, 0}, kP,
                                          [](double l, double) { return l; });
  CHECK(!safe.intervened);
  CHECK(safe.a_s == 2.0);

  CHECK_THROWS_AS(ctrl_relaxed({0, 10}, 2, {10, 0}, p,
                               [](double, double) { return 1.0; }),
                  std::invalid_argument);
}

TEST_CASE("controllers are deterministic") {
  Rng rng(41);
  for (int i = 0; i < 1000; ++i) {
    const VehicleState s{rng.uniform(-50, 50), rng.uniform(0, 25)};
    const double a_n = rng.uniform(-kP.a_n_min, kP.a_n_max);
    const SafetyConstraint c{s.x + rng.uniform(0, 60), 0.0};
    for (ModelId id : {ModelId::M1, ModelId::M3, ModelId::M5, ModelId::M3Wrong}) {
      const ControlOutput a = ctrl(id, s, a_n, c, kP);
      const ControlOutput b = ctrl(id, s, a_n, c, kP);
      CHECK(a.a_s == b.a_s);
      CHECK(a.intervened == b.intervened);
    }
  }
}

TEST_CASE("conservative admits less often than permissive") {
  Rng rng(43);
  for (int i = 0; i < 100000; ++i) {
    const VehicleState s{rng.uniform(-50, 50), rng.uniform(0, 25)};
    const double a_n = rng.uniform(-kP.a_n_min, kP.a_n_max);
    if (s.v + a_n * kP.T < 0) continue;
    const SafetyConstraint c{s.x + rng.uniform(0, 40), 0.0};
    if (!ctrl_m1(s, a_n, c, kP).intervened) CHECK(!ctrl_m3(s, a_n, c, kP).intervened);
  }
}

TEST_CASE("one env-ctrl-plant step preserves the loop invariant") {
  // Includes a parameter set with a_n_min > a_s_min (allowed for m1..m4).
  const SystemParams sets[] = {kP, {1.0, 6.0, 4.0, 1.0}, {3.0, 2.0, 9.0, 0.1}};
  for (const SystemParams& p : sets) {
    for (ModelId id : {ModelId::M1, ModelId::M2, ModelId::M3, ModelId::M4}) {
      const ObligationReport r = check_invariant_obligations(id, p, 2000, 57);
      CHECK(r.fail_step == 0);
    }
  }
  const ObligationReport m5 = check_invariant_obligations(ModelId::M5, kP, 2000, 57);
  CHECK(m5.fail_step == 0);
}

TEST_CASE("relaxed interventions preserve the loop invariant") {
  // Any admissible intervention value keeps the braking budget sufficient:
  // the invariant survives every duration of the step.
  Rng rng(71);
  for (int i = 0; i < 20000; ++i) {
    SystemParams p;
    p.a_n_max = rng.uniform(0.5, 3);
    p.a_n_min = rng.uniform(0.5, 4);
    p.a_s_min = rng.uniform(1, 9);
    p.T = rng.uniform(0.1, 1.5);
    const VehicleState s{rng.uniform(-20, 20), rng.uniform(0, 20)};
    const double bound = s.v * s.v / (2.0 * p.a_s_min);
    const SafetyConstraint c{s.x + bound + rng.uniform(0, 5), 0.0};
    const double a_n = rng.uniform(-p.a_n_min, p.a_n_max);
    const double u = rng.uniform01();
    const ControlOutput out = ctrl_relaxed(
        s, a_n, c, p, [&](double lo, double hi) { return lo + u * (hi - lo); });
    if (!out.intervened) continue;
    for (int k = 0; k <= 20; ++k) {
      const EvolveResult ev = evolve(s, out.a_s, p.T * k / 20.0);
      CHECK(loop_invariant(ModelId::M1, ev.state, c, p));
    }
  }
}

TEST_CASE("invariant implies the guarantee on boundary states") {
  // x at the critical position with the invariant still true forces v <= v_c.
  CHECK(loop_invariant(ModelId::M1, {10, 0}, {10, 0}, kP, 0.0));
  CHECK(guarantee_holds(ModelId::M1, {10, 0}, {10, 0}));
  CHECK(!loop_invariant(ModelId::M1, {10, 1}, {10, 0}, kP));

  CHECK(loop_invariant(ModelId::M2, {12, 3}, {10, 7}, kP, 0.0));
  CHECK(guarantee_holds(ModelId::M2, {12, 3}, {10, 7}));

  // Resting past the critical position satisfies the required-acceleration
  // invariant and the guarantee.
  CHECK(loop_invariant(ModelId::M5, {15, 0}, {10, 0}, kP, 0.0));
  CHECK(guarantee_holds(ModelId::M5, {15, 0}, {10, 0}));
  CHECK(!loop_invariant(ModelId::M5, {15, 0.5}, {10, 0}, kP));
}
