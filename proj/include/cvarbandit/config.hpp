#pragma once

// Experiment configuration files (YAML; any JSON document is also valid).
//
//   environment:
//     kind: bounded                      # or gaussian
//     arms:                              # one entry per arm
//       - bernoulli: 0.9                 # bounded: shorthand for two atoms
//       - atoms: [[0.0, 0.5], [1.0, 0.5]]  # bounded: [value, mass] pairs
//       - beta: [2.0, 5.0]               # bounded: continuous law on [0, 1]
//       - {mean: 1.0, std_dev: 0.5}      # gaussian
//     action_set: [[0, 1], [1, 2]]       # explicit arm-id lists
//     variance_bounds: {lower: 0.25, upper: 1.0}  # gaussian only (N, M)
//   alpha: 0.3
//   horizon: 50000
//   seeds: {count: 20, master_seed: 7}
//   algorithms:
//     - name: sdcb
//     - {name: d-sdcb, epsilon: 0.001}   # epsilon defaults to alpha/((L+1)T)
//     - {name: cucb-g, round_convention: literal}  # or unified
//   workers: 4
//   thinning: 1
//   ground_truth: {monte_carlo_samples: 1000000, monte_carlo_seed: 24301,
//                  support_cap: 5000000}
//   output: {directory: out, trace_file: trace.csv, summary_file: summary.json}

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cvarbandit/harness.hpp"

namespace cvarbandit {

struct OutputPaths {
  std::string directory = ".";
  std::string trace_file = "trace.csv";
  std::string summary_file = "summary.json";

  bool operator==(const OutputPaths&) const = default;
};

struct ExperimentConfig {
  ExperimentSpec experiment;
  OutputPaths output;

  bool operator==(const ExperimentConfig&) const = default;
};

// Carries every violation found, each prefixed with its line when known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

ExperimentConfig parse_config_text(const std::string& text);
// Throws ConfigError for unreadable files as well.
ExperimentConfig parse_config_file(const std::string& path);

// Canonical form of the configuration; parse_config_text(dump) gives back
// an equal ExperimentConfig.
nlohmann::json config_to_json(const ExperimentConfig& config);

}  // namespace cvarbandit
