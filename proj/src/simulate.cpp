#include "scw/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace scw {

namespace {

struct ViolationHit {
  double t{0.0};  // time within the interval
  VehicleState state;
};

// Earliest guarantee violation within one plant interval [0, elapsed] from s0
// under acceleration a, against constraint c. Dense mode combines the
// analytic crossing event with a uniform monitor grid; end-of-step mode looks
// at t = elapsed only.
std::optional<ViolationHit> monitor_interval(const VehicleState& s0, double a,
                                             double elapsed,
                                             const SafetyConstraint& c,
                                             int dense_samples,
                                             MonitorMode mode) {
  const auto state_at = [&](double t) {
    return VehicleState{position_at(s0.x, s0.v, a, t),
                        std::max(0.0, velocity_at(s0.v, a, t))};
  };
  const double v_lim = c.v_c + kMonitorTol;
  const double x_lim = c.x_c + kPositionTol;

  if (mode == MonitorMode::EndOfStepOnly) {
    const VehicleState end = state_at(elapsed);
    if (end.x >= x_lim && end.v > v_lim) return ViolationHit{elapsed, end};
    return std::nullopt;
  }

  std::optional<ViolationHit> hit;
  const auto note = [&](double t) {
    const VehicleState st = state_at(t);
    if (st.x >= x_lim && st.v > v_lim && (!hit || t < hit->t))
      hit = ViolationHit{t, st};
  };

  // Analytic localization: position is nondecreasing, so once x crosses the
  // guarded boundary it stays beyond; velocity along the interval is linear.
  if (const auto tc = crossing_time(s0, a, x_lim, elapsed)) {
    note(*tc);
    if (a > 0.0) {
      // Velocity may exceed the limit only later in the interval.
      const double tv = (v_lim - s0.v) / a;
      if (tv > *tc && tv <= elapsed) note(std::min(elapsed, std::nextafter(tv, elapsed)));
      note(elapsed);
    }
  }
  const int m = std::max(2, dense_samples);
  for (int k = 0; k < m; ++k) note(elapsed * k / (m - 1));
  return hit;
}

double sample_duration(DurationPolicy policy, double T, Rng& rng) {
  if (policy == DurationPolicy::AlwaysT) return T;
  // Uniform over [0, T] with forced endpoints so boundary behaviors are hit.
  const double u = rng.uniform01();
  if (u < 0.05) return 0.0;
  if (u < 0.10) return T;
  return rng.uniform(0.0, T);
}

}  // namespace

EpisodeResult run_episode(const EpisodeConfig& cfg) {
  if (!cfg.params.valid()) throw InitViolation("invalid system parameters");
  if (cfg.model == ModelId::M5 && !cfg.params.valid_m5())
    throw InitViolation("m5 requires a_n_min < a_s_min");
  if (cfg.depth < 0) throw InitViolation("negative loop depth");
  if (cfg.dense_samples < 2) throw InitViolation("dense_samples must be >= 2");
  if (cfg.initial.v < 0.0 || !std::isfinite(cfg.initial.v) || !std::isfinite(cfg.initial.x))
    throw InitViolation("initial state outside the evolution domain");

  Rng rng(cfg.seed);
  Rng dur_rng = rng.fork(2);
  ConstraintSampler constraints(cfg.model, cfg.params, cfg.boundary_prob,
                                rng.fork(3));
  NominalSampler nominals(cfg.params, rng.fork(4));

  const bool fixed = cfg.constraint_policy.kind == ConstraintPolicy::Kind::Fixed;
  SafetyConstraint c = fixed ? cfg.constraint_policy.fixed
                             : constraints.sample(cfg.initial);
  if (fixed && !admissible(cfg.model, cfg.initial, c, cfg.params))
    throw InitViolation("initial state inadmissible for the fixed constraint");

  EpisodeResult r;
  r.verdict.seed = cfg.seed;
  r.verdict.episodes = 1;
  VehicleState state = cfg.initial;
  double t = 0.0;
  r.trace.push_back({t, state, 0.0, 0.0, c, false});

  std::optional<ViolationHit> first;
  // The initial record is itself a monitored point.
  if (state.x >= c.x_c + kPositionTol && state.v > c.v_c + kMonitorTol)
    first = ViolationHit{0.0, state};

  for (int iter = 0; iter < cfg.depth && !first; ++iter) {
    if (fixed) {
      if (!admissible(cfg.model, state, c, cfg.params)) break;  // env aborts
    } else {
      c = constraints.sample(state);
    }
    double a_n;
    if (cfg.nominal_policy.kind == NominalPolicy::Kind::Schedule &&
        !cfg.nominal_policy.schedule.empty()) {
      const auto& sched = cfg.nominal_policy.schedule;
      a_n = sched[std::min<std::size_t>(iter, sched.size() - 1)];
    } else {
      a_n = nominals.next();
    }
    const ControlOutput out =
        ctrl(cfg.model, state, a_n, c, cfg.params, cfg.m5_variant);
    const double want = sample_duration(cfg.duration_policy, cfg.params.T, dur_rng);
    const EvolveResult ev = evolve(state, out.a_s, want);
    if (auto hit = monitor_interval(state, out.a_s, ev.elapsed, c,
                                    cfg.dense_samples, cfg.monitor)) {
      hit->t += t;
      first = hit;
    }
    state = ev.state;
    t += ev.elapsed;
    r.trace.push_back({t, state, a_n, out.a_s, c, out.intervened});
  }

  if (first) {
    r.verdict.outcome = Outcome::Violation;
    r.verdict.violation_time = first->t;
    r.verdict.violation_state = first->state;
  }
  return r;
}

BatchResult run_episode_batch(const EpisodeConfig& base, std::uint64_t episodes,
                              std::uint64_t master_seed, unsigned threads) {
  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::uint64_t>(threads, std::max<std::uint64_t>(1, episodes)));

  struct Chunk {
    std::uint64_t episodes{0};
    std::uint64_t violations{0};
    std::optional<std::uint64_t> first;
    Verdict verdict;
  };
  std::vector<Chunk> chunks(threads);
  std::vector<std::thread> workers;
  const std::uint64_t per = (episodes + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::uint64_t lo = w * per;
    const std::uint64_t hi = std::min(episodes, lo + per);
    workers.emplace_back([&, w, lo, hi] {
      Chunk& c = chunks[w];
      for (std::uint64_t i = lo; i < hi; ++i) {
        EpisodeConfig cfg = base;
        cfg.seed = mix_seed(master_seed, i);
        const EpisodeResult r = run_episode(cfg);
        ++c.episodes;
        if (r.verdict.outcome == Outcome::Violation) {
          ++c.violations;
          if (!c.first) {
            c.first = i;
            c.verdict = r.verdict;
          }
        }
      }
    });
  }
  for (auto& t : workers) t.join();

  BatchResult out;
  for (const Chunk& c : chunks) {
    out.episodes += c.episodes;
    out.violations += c.violations;
    if (c.first && !out.first_violation_episode) {
      out.first_violation_episode = c.first;
      out.first_verdict = c.verdict;
    }
  }
  out.first_verdict.episodes = out.episodes;
  out.first_verdict.seed = master_seed;
  return out;
}

Verdict check_guarantee(const Trace& trace, const SafetyConstraint& c) {
  Verdict v;
  if (trace.empty()) return v;
  // A trace carries the applied acceleration and duration of every step, so
  // the intervals between records are re-monitored densely, not just the
  // record states themselves.
  const auto flag = [&](double t, const VehicleState& st) {
    v.outcome = Outcome::Violation;
    v.violation_time = t;
    v.violation_state = st;
  };
  const auto& first = trace.front();
  if (first.state.x >= c.x_c + kPositionTol && first.state.v > c.v_c + kMonitorTol) {
    flag(first.t, first.state);
    return v;
  }
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const auto& prev = trace[i - 1];
    const auto& cur = trace[i];
    if (auto hit = monitor_interval(prev.state, cur.a_s, cur.t - prev.t, c, 20,
                                    MonitorMode::Dense)) {
      flag(prev.t + hit->t, hit->state);
      return v;
    }
  }
  return v;
}

bool loop_invariant(ModelId id, const VehicleState& s, const SafetyConstraint& c,
                    const SystemParams& p, double tol) {
  const double gap = c.x_c - s.x;
  switch (id) {
    case ModelId::M1:
    case ModelId::M3:
    case ModelId::M3Wrong:
      return gap >= s.v * s.v / (2.0 * p.a_s_min) - tol;
    case ModelId::M2:
    case ModelId::M4:
      return c.v_c >= 0.0 &&
             gap >= (s.v * s.v - c.v_c * c.v_c) / (2.0 * p.a_s_min) - tol;
    case ModelId::M5:
      // a_req_zero(v, gap) >= -a_s_min, in distance form for v > 0.
      if (s.v == 0.0) return true;
      return gap >= s.v * s.v / (2.0 * p.a_s_min) - tol;
  }
  return false;
}

bool guarantee_holds(ModelId id, const VehicleState& s, const SafetyConstraint& c,
                     double tol) {
  const double v_c =
      (id == ModelId::M2 || id == ModelId::M4) ? c.v_c : 0.0;
  return s.x < c.x_c || s.v <= v_c + tol;
}

ObligationReport check_invariant_obligations(ModelId id, const SystemParams& p,
                                             int n_samples, std::uint64_t seed,
                                             ThresholdVariant m5_variant) {
  if (!p.valid() || (id == ModelId::M5 && !p.valid_m5()))
    throw std::invalid_argument("invalid parameters for obligation check");

  ObligationReport rep;
  Rng rng(seed);
  ConstraintSampler constraints(id, p, 0.5, rng.fork(1));
  NominalSampler nominals(p, rng.fork(2));
  Rng state_rng = rng.fork(3);

  const auto record = [&](int which, ObligationFailure f) {
    (which == 1 ? rep.fail_init : which == 2 ? rep.fail_step : rep.fail_guarantee)++;
    if (!rep.first_failure) {
      f.obligation = which;
      rep.first_failure = f;
    }
  };

  for (int i = 0; i < n_samples; ++i) {
    ++rep.samples;
    VehicleState s;
    SafetyConstraint c;
    if (i == 0) {
      // Boundary at low speed: the regime where the faulty metric admits an
      // unsafe braking request.
      s = {0.0, 0.25 * p.a_n_min * p.T};
      c = constraints.sample_boundary(s);
    } else {
      s.x = state_rng.uniform(-100.0, 100.0);
      s.v = state_rng.uniform01() < 0.1 ? 0.0 : state_rng.uniform(0.0, 30.0);
      c = constraints.sample(s);
    }

    // (i) init => invariant. The admissibility conjunct of init is the same
    // predicate, so this is checked with zero slack.
    if (!(admissible(id, s, c, p) && loop_invariant(id, s, c, p, 0.0))) {
      record(1, {0, i, s, c, 0.0, 0.0, s, "init sample outside invariant"});
      continue;
    }

    // (ii) one env-ctrl-plant step preserves the invariant.
    const double a_n = nominals.next();
    const ControlOutput out = ctrl(id, s, a_n, c, p, m5_variant);
    bool step_failed = false;
    for (int k = 0; k <= 20 && !step_failed; ++k) {
      const double want = p.T * k / 20.0;
      const EvolveResult ev = evolve(s, out.a_s, want);
      if (!loop_invariant(id, ev.state, c, p)) {
        std::ostringstream msg;
        msg << "invariant lost after duration " << ev.elapsed
            << " with a_s = " << out.a_s;
        record(2, {0, i, s, c, a_n, ev.elapsed, ev.state, msg.str()});
        step_failed = true;
      }
    }

    // (iii) invariant => guarantee, exercised where it bites: states at or
    // beyond the critical position that still satisfy the invariant. For the
    // distance-metric models with v_c = 0 the only such states sit exactly on
    // x_c at standstill; the required-acceleration invariant also covers a
    // resting vehicle past x_c.
    VehicleState past;
    switch (id) {
      case ModelId::M2:
      case ModelId::M4: {
        past.x = c.x_c + state_rng.uniform(0.0, 10.0);
        const double gap = c.x_c - past.x;
        const double vmax2 = c.v_c * c.v_c + 2.0 * p.a_s_min * gap;
        past.v = vmax2 > 0.0 ? std::sqrt(vmax2) * state_rng.uniform01() : 0.0;
        break;
      }
      case ModelId::M5:
        past.x = c.x_c + state_rng.uniform(0.0, 10.0);
        past.v = 0.0;
        break;
      default:
        past.x = c.x_c;
        past.v = 0.0;
    }
    if (loop_invariant(id, past, c, p, 0.0) && !guarantee_holds(id, past, c)) {
      record(3, {0, i, past, c, 0.0, 0.0, past, "invariant without guarantee"});
    }
  }
  return rep;
}

}  // namespace scw
