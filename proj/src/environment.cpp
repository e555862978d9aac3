#include "scw/environment.hpp"

#include <cmath>
#include <limits>

namespace scw {

double sa_naive(const LeadObject& lead, const SituationParams& sp) {
  return lead.x_l + sp.d;
}

double sa_braking_lead(const LeadObject& lead, const SituationParams& sp) {
  return lead.x_l + lead.v_l * lead.v_l / (2.0 * sp.B) + sp.d;
}

namespace {
// Distance the admissibility test requires between x and x_c.
double admissible_bound(ModelId id, const VehicleState& s,
                        const SafetyConstraint& c, const SystemParams& p) {
  switch (id) {
    case ModelId::M1:
    case ModelId::M3:
    case ModelId::M3Wrong:
      return s.v * s.v / (2.0 * p.a_s_min);
    case ModelId::M2:
    case ModelId::M4:
      return (s.v * s.v - c.v_c * c.v_c) / (2.0 * p.a_s_min);
    case ModelId::M5:
      // a_req_zero >= -a_s_min; at rest any gap is admissible.
      return s.v * s.v / (2.0 * p.a_s_min);
  }
  return 0.0;
}
}  // namespace

bool admissible(ModelId id, const VehicleState& s, const SafetyConstraint& c,
                const SystemParams& p, double tol) {
  if ((id == ModelId::M2 || id == ModelId::M4) && c.v_c < 0.0) return false;
  if (id == ModelId::M5 && s.v == 0.0) return true;
  return c.x_c - s.x >= admissible_bound(id, s, c, p) - tol;
}

double NominalSampler::next() {
  const int k = draws_++;
  if (k == 0) return -p_.a_n_min;
  if (k == 1) return p_.a_n_max;
  return rng_.uniform(-p_.a_n_min, p_.a_n_max);
}

namespace {
// x + gap, nudged upward until the recomputed difference is >= gap again, so
// boundary-exact draws pass the env test exactly.
double place_at_least(double x, double gap) {
  double x_c = x + gap;
  while (x_c - x < gap) x_c = std::nextafter(x_c, std::numeric_limits<double>::infinity());
  return x_c;
}
}  // namespace

SafetyConstraint ConstraintSampler::sample(const VehicleState& s) {
  SafetyConstraint c;
  if (id_ == ModelId::M2 || id_ == ModelId::M4)
    c.v_c = rng_.uniform(0.0, s.v + p_.a_n_max * p_.T + 5.0);
  const double bound = [&] {
    switch (id_) {
      case ModelId::M2:
      case ModelId::M4:
        return (s.v * s.v - c.v_c * c.v_c) / (2.0 * p_.a_s_min);
      default:
        return s.v * s.v / (2.0 * p_.a_s_min);
    }
  }();
  double gap = bound;
  if (rng_.uniform01() >= boundary_prob_)
    gap = bound + rng_.uniform(0.0, 4.0 * msd_conservative(s.v, p_.T, p_) + 10.0);
  c.x_c = place_at_least(s.x, gap);
  return c;
}

SafetyConstraint ConstraintSampler::sample_boundary(const VehicleState& s,
                                                    double v_c) {
  SafetyConstraint c;
  c.v_c = (id_ == ModelId::M2 || id_ == ModelId::M4) ? v_c : 0.0;
  const double bound = (id_ == ModelId::M2 || id_ == ModelId::M4)
                           ? (s.v * s.v - c.v_c * c.v_c) / (2.0 * p_.a_s_min)
                           : s.v * s.v / (2.0 * p_.a_s_min);
  c.x_c = place_at_least(s.x, bound);
  return c;
}

}  // namespace scw
