#include "scw/controller.hpp"

#include <stdexcept>

namespace scw {

namespace {
ControlOutput decide(bool safe, double a_n, const SystemParams& p) {
  if (safe) return {a_n, false, false};
  return {-p.a_s_min, true, false};
}
}  // namespace

std::optional<ModelId> model_from_string(std::string_view name) {
  if (name == "m1") return ModelId::M1;
  if (name == "m2") return ModelId::M2;
  if (name == "m3") return ModelId::M3;
  if (name == "m4") return ModelId::M4;
  if (name == "m5") return ModelId::M5;
  if (name == "m3-wrong") return ModelId::M3Wrong;
  return std::nullopt;
}

std::string to_string(ModelId id) {
  switch (id) {
    case ModelId::M1: return "m1";
    case ModelId::M2: return "m2";
    case ModelId::M3: return "m3";
    case ModelId::M4: return "m4";
    case ModelId::M5: return "m5";
    case ModelId::M3Wrong: return "m3-wrong";
  }
  return "?";
}

ControlOutput ctrl_m1(const VehicleState& s, double a_n, const SafetyConstraint& c,
                      const SystemParams& p) {
  return decide(c.x_c - s.x >= msd_conservative(s.v, p.T, p), a_n, p);
}

ControlOutput ctrl_m2(const VehicleState& s, double a_n, const SafetyConstraint& c,
                      const SystemParams& p) {
  return decide(c.x_c - s.x >= msd_conservative_vc(s.v, c.v_c, p.T, p), a_n, p);
}

ControlOutput ctrl_m3(const VehicleState& s, double a_n, const SafetyConstraint& c,
                      const SystemParams& p) {
  return decide(c.x_c - s.x >= msd_permissive(s.v, a_n, p.T, p), a_n, p);
}

ControlOutput ctrl_m4(const VehicleState& s, double a_n, const SafetyConstraint& c,
                      const SystemParams& p) {
  return decide(c.x_c - s.x >= msd_permissive_vc(s.v, a_n, c.v_c, p.T, p), a_n, p);
}

ControlOutput ctrl_m3_wrong(const VehicleState& s, double a_n,
                            const SafetyConstraint& c, const SystemParams& p) {
  return decide(c.x_c - s.x >= msd_wrong(s.v, a_n, p.T, p), a_n, p);
}

ControlOutput ctrl_m5(const VehicleState& s, double a_n, const SafetyConstraint& c,
                      const SystemParams& p, ThresholdVariant variant) {
  if (!p.valid_m5())
    throw std::invalid_argument("ctrl_m5 requires a_n_min < a_s_min");
  const auto req = a_req_horizon(s.v, a_n, c.x_c - s.x, p);
  const bool safe = req && *req >= a_threshold(s.v, a_n, p, variant);
  return decide(safe, a_n, p);
}

ControlOutput ctrl(ModelId id, const VehicleState& s, double a_n,
                   const SafetyConstraint& c, const SystemParams& p,
                   ThresholdVariant m5_variant) {
  switch (id) {
    case ModelId::M1: return ctrl_m1(s, a_n, c, p);
    case ModelId::M2: return ctrl_m2(s, a_n, c, p);
    case ModelId::M3: return ctrl_m3(s, a_n, c, p);
    case ModelId::M4: return ctrl_m4(s, a_n, c, p);
    case ModelId::M5: return ctrl_m5(s, a_n, c, p, m5_variant);
    case ModelId::M3Wrong: return ctrl_m3_wrong(s, a_n, c, p);
  }
  throw std::logic_error("unknown model id");
}

ControlOutput ctrl_relaxed(const VehicleState& s, double a_n,
                           const SafetyConstraint& c, const SystemParams& p,
                           const InterventionChooser& chooser) {
  if (c.x_c - s.x >= msd_conservative(s.v, p.T, p)) return {a_n, false, false};
  const double lo = -p.a_s_min;
  const auto req = a_req_zero(s.v, c.x_c - s.x);
  if (!req || *req < lo) return {lo, true, true};  // empty interval: forced
  const double chosen = chooser(lo, *req);
  if (chosen < lo || chosen > *req)
    throw std::invalid_argument("intervention chooser left [lo, a_req]");
  return {chosen, true, false};
}

}  // namespace scw
