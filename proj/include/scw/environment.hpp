#pragma once

#include "scw/controller.hpp"
#include "scw/rng.hpp"

namespace scw {

// Closest object ahead, as seen by situation assessment.
struct LeadObject {
  double x_l{0.0};  // lead position (m)
  double v_l{0.0};  // lead velocity (m/s), >= 0
};

struct SituationParams {
  double d{0.0};  // standstill separation (m), >= 0
  double B{1.0};  // minimum lead braking magnitude (m/s^2), > 0
};

// Worst-case situation assessment: the object may stop immediately.
double sa_naive(const LeadObject& lead, const SituationParams& sp);

// Relaxed assessment: the object brakes with at least B from v_l to a stop.
double sa_braking_lead(const LeadObject& lead, const SituationParams& sp);

// The model's admissibility test on a state/constraint pair (the env test
// that gates each loop iteration), evaluated with slack `tol` on the
// distance margin.
bool admissible(ModelId id, const VehicleState& s, const SafetyConstraint& c,
                const SystemParams& p, double tol = 0.0);

// Samples nominal accelerations uniformly over [-a_n_min, a_n_max]; the first
// two draws of a stream are the interval endpoints.
class NominalSampler {
 public:
  NominalSampler(const SystemParams& p, Rng rng) : p_(p), rng_(rng) {}
  double next();

 private:
  SystemParams p_;
  Rng rng_;
  int draws_{0};
};

// Samples admissible safety constraints for the current state. With
// probability boundary_prob the gap sits exactly on the admissibility bound;
// otherwise it is uniform in [bound, bound + 4*msd_conservative + 10 m].
// Critical velocities (models with v_c >= 0) are uniform in
// [0, v + a_n_max*T + 5].
class ConstraintSampler {
 public:
  ConstraintSampler(ModelId id, const SystemParams& p, double boundary_prob,
                    Rng rng)
      : id_(id), p_(p), boundary_prob_(boundary_prob), rng_(rng) {}

  SafetyConstraint sample(const VehicleState& s);
  // Boundary-exact draw regardless of boundary_prob (used to seed searches).
  SafetyConstraint sample_boundary(const VehicleState& s, double v_c = 0.0);

 private:
  ModelId id_;
  SystemParams p_;
  double boundary_prob_;
  Rng rng_;
};

}  // namespace scw
