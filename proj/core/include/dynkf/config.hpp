#pragma once

// Flat `key = value` run configuration. Lines starting with '#' are comments.
// Precedence (lowest to highest): built-in defaults, config file, command-line
// overrides.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "dynkf/tracker.hpp"

namespace dynkf {

struct RunConfig {
  int model_order = 3;
  bool dynamics_enabled = true;
  int transition_window = 8;
  int smoothing_window = 4;
  double dynamics_factor_v = 0.5;
  double dynamics_factor_a = 0.25;
  double dynamics_factor_j = 0.15;
  double process_noise = 1.0;
  double sigma_meas = 0.3;
  double gate_distance = 2.5;
  int min_hits = 3;
  int max_misses = 23;
  double dt = 0.1;
  std::uint64_t seed = 0;
  std::string cold_start = "cv";  // cv: [1,1,0,0], identity: [1,1,1,1]
  std::string covariance = "transition";  // transition: F P F^T, weighted: (FW) P (FW)^T

  /// Throws ConfigError naming the offending key.
  void validate() const;
  TrackerConfig tracker_config() const;
};

/// Applies `key = value` pairs on top of `base`. Unknown keys and malformed
/// values throw ConfigError naming the key (and line, for text input).
RunConfig parse_run_config(const std::string& text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});
RunConfig apply_overrides(RunConfig base, const std::map<std::string, std::string>& overrides);

/// Every key with its effective value, re-loadable by parse_run_config.
std::string format_run_config(const RunConfig& config);

}  // namespace dynkf
