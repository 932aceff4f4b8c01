#pragma once

// Config-driven runs. Every run directory gets resolved.cfg (all keys with
// defaults filled in), the experiment's CSV files and manifest.txt.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "motility/io/config.hpp"

namespace motility::io {

/// Experiment names accepted by run_experiment.
const std::vector<std::string>& experiment_names();

/// $MOTILITY_OUTPUT_ROOT, or "runs" when unset or empty.
std::filesystem::path default_output_root();

struct RunOptions {
  std::string experiment;  // empty: taken from the "experiment" key
  std::optional<std::filesystem::path> output_dir;
  unsigned threads = 1;
};

struct RunReport {
  std::string experiment;
  std::filesystem::path output_dir;
  std::uint64_t parameter_hash = 0;
  std::vector<std::string> files;               // relative to output_dir, in write order
  std::map<std::string, std::string> results;   // headline numbers, also in the manifest
};

/// Throws ConfigError for invalid configs (before anything is written) and
/// std::runtime_error with the experiment name prepended for run failures.
RunReport run_experiment(const Config& config, const RunOptions& options = {});
RunReport run_experiment_file(const std::filesystem::path& config_path, const RunOptions& options = {});

struct SweepItem {
  std::filesystem::path output_dir;
  bool ok = false;
  std::string error;
  RunReport report;
};

/// Fans the configs described by a sweep file out to `options.threads` workers.
///   sweep.base = base.cfg       with sweep.key = beta, sweep.values = 50, 100, 150
///   sweep.configs = a.cfg, b.cfg
/// Paths are relative to the sweep file. Each job writes to <out>/<name>.
std::vector<SweepItem> run_sweep(const std::filesystem::path& sweep_path, const RunOptions& options = {});

}  // namespace motility::io
