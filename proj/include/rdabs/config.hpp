#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdabs/dynamics.hpp"

namespace rdabs {

// Resolved run configuration shared by all CLI commands. Parsed from JSON with
// field-path diagnostics; every report embeds the resolved form plus its hash
// so runs are reproducible from their outputs alone.
struct RunConfig {
  nlohmann::json system;  // as given; resolved through make_system()
  int horizon = 1;
  std::vector<int> grid_counts;
  long samples = 10000;
  long entropy_samples = 10000;
  long lipschitz_samples = 4096;
  std::uint64_t seed = 0;
  int workers = 1;
  std::vector<double> s_grid;         // may contain infinity
  std::vector<double> rates;          // nats; populated from "cells" when given
  std::string c_mode = "both";        // "tightest" | "high-rate" | "both"
  std::string entropy_method = "auto";  // "auto" | "monte-carlo"
  bool exact_transitions = false;
  std::int64_t cell_guard = 100000;
  std::optional<double> target_distortion;  // when set, bound reports include R_lower
};

RunConfig parse_run_config(const nlohmann::json& j);

SystemDef make_system(const nlohmann::json& system_config);

// Canonical JSON of the resolved configuration (sorted keys, stable dump).
nlohmann::json resolved_config_json(const RunConfig& config);

// FNV-1a over the canonical dump; stable across platforms.
std::uint64_t config_hash(const nlohmann::json& resolved);

std::string tool_version();

}  // namespace rdabs
