// Test-only oracles, independent of the closed-form implementations they
// check: fine-step trapezoidal integration of the motion ODE, maneuver
// simulations for the distance metrics, and bisection-based event search.
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

namespace oracle {

struct MotionState {
  double x{0.0};
  double v{0.0};
};

// Integrates x' = v, v' = a over [0, t] with the v >= 0 domain, trapezoidal
// velocity update (exact for piecewise-linear v up to rounding). Holds the
// state once braking reaches standstill.
inline MotionState integrate_motion(double x0, double v0, double a, double t,
                                    double dt = 1e-5) {
  MotionState s{x0, v0};
  double remaining = t;
  while (remaining > 0.0) {
    const double h = remaining < dt ? remaining : dt;
    if (s.v <= 0.0 && a <= 0.0) break;  // at rest, cannot move
    double v_next = s.v + a * h;
    if (v_next < 0.0) {
      // Stop event inside the step.
      const double h_stop = s.v / -a;
      s.x += 0.5 * s.v * h_stop;
      s.v = 0.0;
      break;
    }
    s.x += 0.5 * (s.v + v_next) * h;
    s.v = v_next;
    remaining -= h;
  }
  return s;
}

// Distance covered by braking from v0 at magnitude `brake` down to v_target.
inline double braking_distance_sim(double v0, double brake, double v_target = 0.0,
                                   double dt = 1e-5) {
  double x = 0.0, v = v0;
  while (v > v_target) {
    double v_next = v - brake * dt;
    if (v_next < v_target) {
      const double h = (v - v_target) / brake;
      x += 0.5 * (v + v_target) * h;
      v = v_target;
      break;
    }
    x += 0.5 * (v + v_next) * dt;
    v = v_next;
  }
  return x;
}

// Distance covered by [follow a_n for duration t, then brake at `brake` down
// to v_target], the maneuver behind the distance metrics. Requires the
// post-phase velocity to be at least v_target.
inline double maneuver_distance(double v0, double a_n, double t, double brake,
                                double v_target = 0.0, double dt = 1e-5) {
  const MotionState mid = integrate_motion(0.0, v0, a_n, t, dt);
  if (mid.v < v_target)
    throw std::invalid_argument("maneuver oracle: phase-1 velocity below target");
  return mid.x + braking_distance_sim(mid.v, brake, v_target, dt);
}

// Earliest t in [0, t_hi] with x(t) >= x_c under constant acceleration,
// found by bisection on the closed-form position (positions are
// nondecreasing while v >= 0). Returns nullopt when x_c is not reached.
inline std::optional<double> bisect_crossing(double x0, double v0, double a,
                                             double x_c, double t_hi,
                                             double tol = 1e-9) {
  const auto pos = [&](double t) {
    if (a < 0.0) {
      const double t_stop = v0 / -a;
      if (t > t_stop) t = t_stop;
    }
    return x0 + t * (v0 + 0.5 * a * t);
  };
  if (pos(0.0) >= x_c) return 0.0;
  if (pos(t_hi) < x_c) return std::nullopt;
  double lo = 0.0, hi = t_hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (pos(mid) >= x_c ? hi : lo) = mid;
  }
  return hi;
}

// Smallest gap admitted by a monotone safe-condition, to within tol;
// nullopt when even `limit` is not admitted.
template <typename SafeAtGap>
std::optional<double> smallest_safe_gap(SafeAtGap&& safe, double limit,
                                        double tol = 1e-9) {
  if (!safe(limit)) return std::nullopt;
  double lo = 0.0, hi = limit;
  if (safe(0.0)) return 0.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (safe(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace oracle
