#pragma once

#include <optional>

namespace scw {

// Longitudinal plant state. The evolution domain keeps v >= 0 at all times.
struct VehicleState {
  double x{0.0};  // position (m)
  double v{0.0};  // velocity (m/s)
};

// One continuous step: the reached state and the duration actually spent in
// the evolution domain (elapsed <= requested duration).
struct EvolveResult {
  VehicleState state;
  double elapsed{0.0};
};

// x0 + v0*t + a*t^2/2
double position_at(double x0, double v0, double a, double t);

// v0 + a*t. Raw formula; may be negative, the caller handles domain clamping.
double velocity_at(double v0, double a, double t);

// Time at which v reaches 0 under constant a; nullopt means "never".
// v = 0 with a <= 0 gives 0 (the plant cannot move), except a = 0 where the
// vehicle rests indefinitely and the domain is never at risk (nullopt).
std::optional<double> stopping_time(double v, double a);

// Advance by at most dt_max. Braking to v = 0 halts the evolution at the stop
// event: elapsed < dt_max and the velocity is exactly 0 in the result.
EvolveResult evolve(const VehicleState& s, double a, double dt_max);

// Earliest t in [0, min(horizon, stopping time)] with x(t) >= x_c, else
// nullopt. Returns 0 when the state is already at or beyond x_c.
std::optional<double> crossing_time(const VehicleState& s, double a, double x_c,
                                    double horizon);

}  // namespace scw
