#pragma once

#include <stdexcept>
#include <string>

#include "scw/analysis.hpp"
#include "scw/simulate.hpp"

namespace scw {

// Malformed scenario/ranges file: unreadable, bad schema, unknown keys.
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

EpisodeConfig parse_scenario_text(const std::string& text);
EpisodeConfig load_scenario(const std::string& path);

// Serializes a config back to scenario JSON (used for violation repro files).
std::string scenario_to_text(const EpisodeConfig& cfg,
                             const std::string& description = "");

ParamRanges parse_ranges_text(const std::string& text);
ParamRanges load_ranges(const std::string& path);

// Columns: t,x,v,a_n,a_s,x_c,v_c,intervened. Decimal, 17 significant digits.
std::string trace_to_csv(const Trace& trace);

std::string read_file(const std::string& path);

// Writes via a temporary file in the same directory plus rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace scw
