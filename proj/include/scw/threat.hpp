#pragma once

#include <optional>

namespace scw {

// The four symbolic system parameters. a_n_min and a_s_min are braking
// magnitudes: the nominal request is bounded to [-a_n_min, a_n_max] and the
// safety intervention applies -a_s_min.
struct SystemParams {
  double a_n_max{2.0};  // max nominal acceleration (m/s^2)
  double a_n_min{3.0};  // max nominal braking magnitude (m/s^2)
  double a_s_min{5.0};  // max safety braking magnitude (m/s^2)
  double T{0.5};        // sampling period (s)

  bool valid() const {
    return a_n_max > 0.0 && a_n_min > 0.0 && a_s_min > 0.0 && T > 0.0;
  }
  // The required-acceleration model additionally assumes a_n_min < a_s_min.
  bool valid_m5() const { return valid() && a_n_min < a_s_min; }
};

// Conservative minimal safe distance: accelerate at a_n_max for t, then brake
// at a_s_min to standstill.
double msd_conservative(double v, double t, const SystemParams& p);

// Conservative metric generalized to a critical velocity v_c >= 0: the final
// braking phase ends at v_c instead of standstill.
double msd_conservative_vc(double v, double v_c, double t, const SystemParams& p);

// Permissive metric: the actual request a_n replaces the worst case. When
// a_n brakes to a stop within t, the distance is the full stopping distance
// -v^2/(2 a_n) instead.
double msd_permissive(double v, double a_n, double t, const SystemParams& p);

// Permissive metric with critical velocity v_c >= 0.
double msd_permissive_vc(double v, double a_n, double v_c, double t,
                         const SystemParams& p);

// faulty: for study only. The permissive formula without the case split,
// known to produce unsafe decisions when the request brakes to a stop within
// t. Exists solely so the falsification studies can reproduce that defect;
// never use it in a controller outside those studies.
double msd_wrong(double v, double a_n, double t, const SystemParams& p);

// Constant acceleration that stops the vehicle in exactly `gap` meters:
// -v^2/(2 gap). nullopt = infeasible (gap <= 0 while moving: no finite
// braking suffices). A vehicle at rest needs 0 regardless of gap.
std::optional<double> a_req_zero(double v, double gap);

// Required acceleration after first following a_n for one period T.
// First case (v + a_n T >= 0): -(v + a_n T)^2 / (2 (gap - v T - a_n T^2/2)),
// infeasible when the post-horizon gap is not positive. Otherwise the request
// brakes to a stop within T and the zero-horizon formula applies.
std::optional<double> a_req_horizon(double v, double a_n, double gap,
                                    const SystemParams& p);

// The required-acceleration threshold is written in the source model as
// -a_n in its otherwise-branch, which never admits the request; the
// sign-corrected variant uses +a_n there, matching the permissive distance
// metric. Both are safe; as-written is merely more conservative.
enum class ThresholdVariant { AsWritten, SignCorrected };

double a_threshold(double v, double a_n, const SystemParams& p,
                   ThresholdVariant variant = ThresholdVariant::AsWritten);

// Gap at which the required-acceleration safe-condition flips, expressed as a
// distance so the models can be compared metric-to-metric. Returns +infinity
// when no finite gap is admitted (the as-written otherwise-branch).
double msd_areq(double v, double a_n, const SystemParams& p,
                ThresholdVariant variant = ThresholdVariant::AsWritten);

}  // namespace scw
