#include "scw/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace scw {

double position_at(double x0, double v0, double a, double t) {
  return x0 + t * (v0 + 0.5 * a * t);
}

double velocity_at(double v0, double a, double t) { return v0 + a * t; }

std::optional<double> stopping_time(double v, double a) {
  if (a < 0.0) return v == 0.0 ? 0.0 : -v / a;
  if (v == 0.0 && a == 0.0) return std::nullopt;  // rests forever
  return std::nullopt;                            // accelerating, never stops
}

EvolveResult evolve(const VehicleState& s, double a, double dt_max) {
  const auto stop = stopping_time(s.v, a);
  if (stop && *stop <= dt_max) {
    // Halt at the stop event; v is exactly 0 there. The stop position is
    // x0 + v^2/(2|a|), computed directly to avoid the root-finding residual.
    EvolveResult r;
    r.elapsed = *stop;
    r.state.v = 0.0;
    r.state.x = (a < 0.0) ? s.x - s.v * s.v / (2.0 * a) : s.x;
    return r;
  }
  EvolveResult r;
  r.elapsed = dt_max;
  r.state.x = position_at(s.x, s.v, a, dt_max);
  r.state.v = std::max(0.0, velocity_at(s.v, a, dt_max));
  return r;
}

std::optional<double> crossing_time(const VehicleState& s, double a, double x_c,
                                    double horizon) {
  if (horizon < 0.0) return std::nullopt;
  if (s.x >= x_c) return 0.0;
  const auto stop = stopping_time(s.v, a);
  const double t_end = stop ? std::min(horizon, *stop) : horizon;
  const double gap = x_c - s.x;

  double t{};
  if (a == 0.0) {
    if (s.v <= 0.0) return std::nullopt;
    t = gap / s.v;
  } else {
    // Smallest positive root of (a/2) t^2 + v t - gap = 0, in the
    // cancellation-free form 2*gap / (v + sqrt(v^2 + 2 a gap)).
    const double disc = s.v * s.v + 2.0 * a * gap;
    if (disc < 0.0) return std::nullopt;  // stops short of x_c
    const double root = s.v + std::sqrt(disc);
    if (root <= 0.0) return std::nullopt;
    t = 2.0 * gap / root;
  }
  if (t > t_end) return std::nullopt;
  return t;
}

}  // namespace scw
