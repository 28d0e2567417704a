// Executes a validated experiment config: runs the computation in memory,
// then writes a results CSV, a JSON manifest (enough to reproduce the run)
// and a plain-text summary into the output directory. Writes are atomic and
// happen only after the computation succeeds.
//
// Exit codes: 0 completed (and any checked property held), 1 a verified
// property failed, 2 validation error (raised as ConfigError before run()).
#pragma once

#include <string>
#include <vector>

#include "rcm/config.hpp"

namespace rcm::cli {

struct RunResult {
    int exit_code = 0;
    std::vector<std::string> written_files;
    std::string summary;
};

RunResult run(const ExperimentConfig& cfg);

// Post-process a results CSV into a plot-ready CSV. kind "decay" expects
// (n, value, ...) rows and emits log-transformed columns; kind "trend"
// expects (N, rep, value) rows and emits per-N quartiles.
void emit_plot_data(const std::string& input_csv, const std::string& kind,
                    const std::string& out_path);

}  // namespace rcm::cli
