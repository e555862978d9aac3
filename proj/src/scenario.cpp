#include "scw/scenario.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace scw {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) known = true;
    if (!known) throw ScenarioError("unknown key '" + key + "' in " + where);
  }
}

double want_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw ScenarioError("missing or non-numeric '" + std::string(key) + "' in " + where);
  return obj[key].get<double>();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

EpisodeConfig parse_scenario_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ScenarioError("scenario root must be an object");
  reject_unknown(j,
                 {"description", "model", "params", "initial", "depth",
                  "dense_samples", "duration_policy", "constraint", "nominal",
                  "monitor", "boundary_prob", "seed", "m5_threshold"},
                 "scenario");

  EpisodeConfig cfg;
  if (!j.contains("model") || !j["model"].is_string())
    throw ScenarioError("missing 'model'");
  const auto id = model_from_string(j["model"].get<std::string>());
  if (!id) throw ScenarioError("unknown model '" + j["model"].get<std::string>() + "'");
  cfg.model = *id;

  if (!j.contains("params") || !j["params"].is_object())
    throw ScenarioError("missing 'params' object");
  reject_unknown(j["params"], {"a_n_max", "a_n_min", "a_s_min", "T"}, "params");
  cfg.params.a_n_max = want_number(j["params"], "a_n_max", "params");
  cfg.params.a_n_min = want_number(j["params"], "a_n_min", "params");
  cfg.params.a_s_min = want_number(j["params"], "a_s_min", "params");
  cfg.params.T = want_number(j["params"], "T", "params");

  if (!j.contains("initial") || !j["initial"].is_object())
    throw ScenarioError("missing 'initial' object");
  reject_unknown(j["initial"], {"x", "v"}, "initial");
  cfg.initial.x = want_number(j["initial"], "x", "initial");
  cfg.initial.v = want_number(j["initial"], "v", "initial");

  if (!j.contains("depth") || !j["depth"].is_number_integer())
    throw ScenarioError("missing integer 'depth'");
  cfg.depth = j["depth"].get<int>();
  if (j.contains("dense_samples")) {
    if (!j["dense_samples"].is_number_integer())
      throw ScenarioError("'dense_samples' must be an integer");
    cfg.dense_samples = j["dense_samples"].get<int>();
  }
  if (j.contains("duration_policy")) {
    const std::string p = j["duration_policy"].get<std::string>();
    if (p == "sampled")
      cfg.duration_policy = DurationPolicy::Sampled;
    else if (p == "always-T")
      cfg.duration_policy = DurationPolicy::AlwaysT;
    else
      throw ScenarioError("duration_policy must be 'sampled' or 'always-T'");
  }
  if (j.contains("constraint")) {
    const json& c = j["constraint"];
    reject_unknown(c, {"policy", "x_c", "v_c"}, "constraint");
    const std::string p = c.value("policy", "");
    if (p == "resample") {
      cfg.constraint_policy.kind = ConstraintPolicy::Kind::Resample;
    } else if (p == "fixed") {
      cfg.constraint_policy.kind = ConstraintPolicy::Kind::Fixed;
      cfg.constraint_policy.fixed.x_c = want_number(c, "x_c", "constraint");
      cfg.constraint_policy.fixed.v_c =
          c.contains("v_c") ? want_number(c, "v_c", "constraint") : 0.0;
    } else {
      throw ScenarioError("constraint.policy must be 'resample' or 'fixed'");
    }
  }
  if (j.contains("nominal")) {
    const json& nom = j["nominal"];
    reject_unknown(nom, {"policy", "values"}, "nominal");
    const std::string p = nom.value("policy", "");
    if (p == "random") {
      cfg.nominal_policy.kind = NominalPolicy::Kind::Random;
    } else if (p == "schedule") {
      cfg.nominal_policy.kind = NominalPolicy::Kind::Schedule;
      if (!nom.contains("values") || !nom["values"].is_array() || nom["values"].empty())
        throw ScenarioError("nominal schedule needs a nonempty 'values' array");
      for (const auto& v : nom["values"]) {
        if (!v.is_number()) throw ScenarioError("nominal values must be numbers");
        cfg.nominal_policy.schedule.push_back(v.get<double>());
      }
    } else {
      throw ScenarioError("nominal.policy must be 'random' or 'schedule'");
    }
  }
  if (j.contains("monitor")) {
    const std::string m = j["monitor"].get<std::string>();
    if (m == "dense")
      cfg.monitor = MonitorMode::Dense;
    else if (m == "end-of-step")
      cfg.monitor = MonitorMode::EndOfStepOnly;
    else
      throw ScenarioError("monitor must be 'dense' or 'end-of-step'");
  }
  if (j.contains("boundary_prob")) {
    cfg.boundary_prob = want_number(j, "boundary_prob", "scenario");
    if (cfg.boundary_prob < 0.0 || cfg.boundary_prob > 1.0)
      throw ScenarioError("boundary_prob must be in [0, 1]");
  }
  if (!j.contains("seed") || !j["seed"].is_number_integer())
    throw ScenarioError("missing integer 'seed'");
  cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("m5_threshold")) {
    const std::string m = j["m5_threshold"].get<std::string>();
    if (m == "as-written")
      cfg.m5_variant = ThresholdVariant::AsWritten;
    else if (m == "sign-corrected")
      cfg.m5_variant = ThresholdVariant::SignCorrected;
    else
      throw ScenarioError("m5_threshold must be 'as-written' or 'sign-corrected'");
  }
  return cfg;
}

EpisodeConfig load_scenario(const std::string& path) {
  return parse_scenario_text(read_file(path));
}

std::string scenario_to_text(const EpisodeConfig& cfg, const std::string& description) {
  json j;
  if (!description.empty()) j["description"] = description;
  j["model"] = to_string(cfg.model);
  j["params"] = {{"a_n_max", cfg.params.a_n_max},
                 {"a_n_min", cfg.params.a_n_min},
                 {"a_s_min", cfg.params.a_s_min},
                 {"T", cfg.params.T}};
  j["initial"] = {{"x", cfg.initial.x}, {"v", cfg.initial.v}};
  j["depth"] = cfg.depth;
  j["dense_samples"] = cfg.dense_samples;
  j["duration_policy"] =
      cfg.duration_policy == DurationPolicy::Sampled ? "sampled" : "always-T";
  if (cfg.constraint_policy.kind == ConstraintPolicy::Kind::Fixed) {
    j["constraint"] = {{"policy", "fixed"},
                       {"x_c", cfg.constraint_policy.fixed.x_c},
                       {"v_c", cfg.constraint_policy.fixed.v_c}};
  } else {
    j["constraint"] = {{"policy", "resample"}};
  }
  if (cfg.nominal_policy.kind == NominalPolicy::Kind::Schedule) {
    j["nominal"] = {{"policy", "schedule"}, {"values", cfg.nominal_policy.schedule}};
  } else {
    j["nominal"] = {{"policy", "random"}};
  }
  j["monitor"] = cfg.monitor == MonitorMode::Dense ? "dense" : "end-of-step";
  j["boundary_prob"] = cfg.boundary_prob;
  j["seed"] = cfg.seed;
  j["m5_threshold"] = cfg.m5_variant == ThresholdVariant::AsWritten
                          ? "as-written"
                          : "sign-corrected";
  return j.dump(2) + "\n";
}

ParamRanges parse_ranges_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("ranges file is not valid JSON: ") + e.what());
  }
  reject_unknown(j, {"a_s_min", "a_n_min", "a_n_max", "T", "v", "a_n"}, "ranges");
  ParamRanges r;
  const auto get = [&](const char* key, Interval& out) {
    if (!j.contains(key)) return;
    const json& a = j[key];
    if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
      throw ScenarioError(std::string("range '") + key + "' must be [lo, hi]");
    out.lo = a[0].get<double>();
    out.hi = a[1].get<double>();
  };
  get("a_s_min", r.a_s_min);
  get("a_n_min", r.a_n_min);
  get("a_n_max", r.a_n_max);
  get("T", r.T);
  get("v", r.v);
  get("a_n", r.a_n);
  return r;
}

ParamRanges load_ranges(const std::string& path) {
  return parse_ranges_text(read_file(path));
}

std::string trace_to_csv(const Trace& trace) {
  std::ostringstream os;
  os << "t,x,v,a_n,a_s,x_c,v_c,intervened\n";
  for (const auto& r : trace) {
    os << fmt(r.t) << "," << fmt(r.state.x) << "," << fmt(r.state.v) << ","
       << fmt(r.a_n) << "," << fmt(r.a_s) << "," << fmt(r.constraint.x_c) << ","
       << fmt(r.constraint.v_c) << "," << (r.intervened ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ScenarioError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw ScenarioError("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

}  // namespace scw
