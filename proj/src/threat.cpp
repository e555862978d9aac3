#include "scw/threat.hpp"

#include <cmath>
#include <limits>

namespace scw {

namespace {
double stopping_term(double v_end, double v_target, double brake) {
  return (v_end * v_end - v_target * v_target) / (2.0 * brake);
}
}  // namespace

double msd_conservative(double v, double t, const SystemParams& p) {
  const double v_end = v + p.a_n_max * t;
  return v * t + 0.5 * p.a_n_max * t * t + (v_end * v_end) / (2.0 * p.a_s_min);
}

double msd_conservative_vc(double v, double v_c, double t, const SystemParams& p) {
  const double v_end = v + p.a_n_max * t;
  return v * t + 0.5 * p.a_n_max * t * t + stopping_term(v_end, v_c, p.a_s_min);
}

double msd_permissive(double v, double a_n, double t, const SystemParams& p) {
  const double v_end = v + a_n * t;
  if (v_end >= 0.0)
    return v * t + 0.5 * a_n * t * t + (v_end * v_end) / (2.0 * p.a_s_min);
  return -(v * v) / (2.0 * a_n);
}

double msd_permissive_vc(double v, double a_n, double v_c, double t,
                         const SystemParams& p) {
  const double v_end = v + a_n * t;
  if (v_end >= 0.0)
    return v * t + 0.5 * a_n * t * t + stopping_term(v_end, v_c, p.a_s_min);
  return -(v * v) / (2.0 * a_n);
}

double msd_wrong(double v, double a_n, double t, const SystemParams& p) {
  const double v_end = v + a_n * t;
  return v * t + 0.5 * a_n * t * t + (v_end * v_end) / (2.0 * p.a_s_min);
}

std::optional<double> a_req_zero(double v, double gap) {
  if (v == 0.0) return 0.0;  // at rest: nothing required, any gap
  if (gap <= 0.0) return std::nullopt;
  return -(v * v) / (2.0 * gap);
}

std::optional<double> a_req_horizon(double v, double a_n, double gap,
                                    const SystemParams& p) {
  const double v_end = v + a_n * p.T;
  if (v_end >= 0.0) {
    // Gap remaining after following a_n for the full period.
    const double rest = gap - v * p.T - 0.5 * a_n * p.T * p.T;
    if (rest > 0.0) return -(v_end * v_end) / (2.0 * rest);
    // The gap is consumed within the period. Moving past x_c is infeasible;
    // stopping exactly on it (v_end = 0, rest = 0) needs nothing further.
    if (v_end == 0.0 && (v == 0.0 || rest == 0.0)) return 0.0;
    return std::nullopt;
  }
  return a_req_zero(v, gap);
}

double a_threshold(double v, double a_n, const SystemParams& p,
                   ThresholdVariant variant) {
  if (v + a_n * p.T >= 0.0) return -p.a_n_min;
  return variant == ThresholdVariant::AsWritten ? -a_n : a_n;
}

double msd_areq(double v, double a_n, const SystemParams& p,
                ThresholdVariant variant) {
  const double v_end = v + a_n * p.T;
  if (v_end >= 0.0) {
    return v * p.T + 0.5 * a_n * p.T * p.T + (v_end * v_end) / (2.0 * p.a_n_min);
  }
  if (variant == ThresholdVariant::SignCorrected) return -(v * v) / (2.0 * a_n);
  // As written the otherwise-branch compares a nonpositive requirement
  // against -a_n > 0, so no finite gap admits the request.
  return std::numeric_limits<double>::infinity();
}

}  // namespace scw
