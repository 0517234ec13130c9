#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "rdtf/fit.hpp"
#include "rdtf/grid.hpp"

namespace rdtf {

struct ExperimentSpec {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
};

struct ExperimentConfig {
  GridSpec grid;
  std::string generator = "flat";  // flat | cone | conformal
  nlohmann::json metric_params = nlohmann::json::object();
  double t_end = 1e-3;
  double sigma_cfl = 0.1;
  int snapshots = 12;
  int per_octave = 2;
  std::vector<ExperimentSpec> experiments;
  std::string output_dir = "rdtf_out";
  std::uint64_t seed = 1;
  int workers = 0;  // 0 → hardware concurrency
};

/// Parses and validates; throws Error(Config) naming the offending field.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Scalar check with a bound, one CSV row each.
struct CheckRow {
  std::string quantity;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct ExperimentOutcome {
  std::string name;
  std::string status;  // pass | fail | error
  std::string message;
  double wall_seconds = 0.0;
  std::vector<FitReport> fits;
  std::vector<CheckRow> checks;
  std::vector<std::string> files;
};

struct RunManifest {
  std::string config_hash;
  std::string version;
  std::vector<ExperimentOutcome> experiments;
  std::vector<std::string> files;
  bool passed = false;
};

/// FNV-1a 64-bit of the bytes, as 16 hex digits.
std::string content_hash(const std::string& bytes);

/// Runs every experiment, writes fits.csv, checks.csv, one summary per
/// experiment and manifest.json under the output directory. A non-empty
/// `output_root` (or RDTF_OUTPUT_ROOT) is prefixed to relative output dirs.
RunManifest run_experiments(const ExperimentConfig& config, const std::string& config_text,
                            const std::string& output_root = "");

/// Static table: name, required parameters, anchor.
std::string list_experiments();

}  // namespace rdtf
