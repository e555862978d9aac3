#pragma once

#include <functional>
#include <optional>
#include <string>

#include "scw/kinematics.hpp"
#include "scw/threat.hpp"

namespace scw {

// Critical position/velocity pair: the vehicle must not exceed v_c at or
// beyond x_c.
struct SafetyConstraint {
  double x_c{0.0};
  double v_c{0.0};
};

// Decision of one controller invocation. When intervened is false, a_s is the
// nominal request unchanged; when true, a_s is the intervention value.
// infeasible marks decisions where no admissible intervention interval
// existed and the maximal braking fallback was forced.
struct ControlOutput {
  double a_s{0.0};
  bool intervened{false};
  bool infeasible{false};
};

enum class ModelId { M1, M2, M3, M4, M5, M3Wrong };

std::optional<ModelId> model_from_string(std::string_view name);
std::string to_string(ModelId id);

// Safety controllers for the five design variants. Each passes a_n through
// iff the model's safe-condition holds (non-strict comparison: equality
// admits the request), else commands -a_s_min.
ControlOutput ctrl_m1(const VehicleState& s, double a_n, const SafetyConstraint& c,
                      const SystemParams& p);
ControlOutput ctrl_m2(const VehicleState& s, double a_n, const SafetyConstraint& c,
                      const SystemParams& p);
ControlOutput ctrl_m3(const VehicleState& s, double a_n, const SafetyConstraint& c,
                      const SystemParams& p);
ControlOutput ctrl_m4(const VehicleState& s, double a_n, const SafetyConstraint& c,
                      const SystemParams& p);

// faulty: for study only. Model 3 decision taken with msd_wrong; reproduces
// the unsafe edge case of the falsification studies.
ControlOutput ctrl_m3_wrong(const VehicleState& s, double a_n,
                            const SafetyConstraint& c, const SystemParams& p);

// Required-acceleration controller. Safe iff a_req_horizon >= a_threshold;
// an infeasible requirement compares as unsafe. Throws std::invalid_argument
// unless a_n_min < a_s_min.
ControlOutput ctrl_m5(const VehicleState& s, double a_n, const SafetyConstraint& c,
                      const SystemParams& p,
                      ThresholdVariant variant = ThresholdVariant::AsWritten);

// Dispatch by model id (M3Wrong included for the studies).
ControlOutput ctrl(ModelId id, const VehicleState& s, double a_n,
                   const SafetyConstraint& c, const SystemParams& p,
                   ThresholdVariant m5_variant = ThresholdVariant::AsWritten);

// Chooses an intervention value from the closed interval [lo, hi]. Must be
// stateless (or externally synchronized): controllers are called from
// concurrent episode batches.
using InterventionChooser = std::function<double(double lo, double hi)>;

// Relaxed intervention: the safe branch is unchanged (Model 1 condition); the
// unsafe branch may apply any a_s with -a_s_min <= a_s <= a_req_zero. When
// that interval is empty or the requirement is infeasible, maximal braking is
// forced and the output is flagged infeasible. A chooser returning a value
// outside the interval is a contract violation (std::invalid_argument).
ControlOutput ctrl_relaxed(const VehicleState& s, double a_n,
                           const SafetyConstraint& c, const SystemParams& p,
                           const InterventionChooser& chooser);

}  // namespace scw
