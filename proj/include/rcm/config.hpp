// Experiment configuration: a JSON key-value file with a fixed schema per
// subcommand. Unknown keys are errors, as are missing or ill-typed required
// keys; validation happens before any sampling and reports every offending
// field at once.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcm/connection.hpp"

namespace rcm::cli {

struct ConfigError : std::runtime_error {
    std::vector<std::string> fields;
    explicit ConfigError(const std::vector<std::string>& offending);
};

struct ExperimentConfig {
    std::string subcommand;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out_dir = ".";
    nlohmann::json params;  // subcommand-specific keys, validated

    // The full config as JSON (round-trips unchanged through the manifest).
    nlohmann::json to_json() const;
};

// The fixed subcommand set, plus plot-data for post-processing.
const std::vector<std::string>& subcommand_names();

// Validate and normalize a raw JSON config. A {"config": {...}} wrapper
// (a manifest) is unwrapped first, so a manifest reproduces its run.
ExperimentConfig parse_config(const nlohmann::json& raw);
ExperimentConfig load_config_file(const std::string& path);

// Build the connection function described by a config "g" object:
// {"family": "indicator"|"exponential"|"power-law"|"table", "dim": d,
//  "radius"/"beta"/"alpha"/"table_path": ..., "cutoff": optional}.
ConnectionFunction connection_from_json(const nlohmann::json& j);

}  // namespace rcm::cli
