#pragma once

// Experiment configuration: a YAML file plus dotted key=value overrides.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "ddc/graph.hpp"
#include "ddc/model.hpp"
#include "ddc/splitting.hpp"

namespace ddc::experiment {

enum class ExperimentKind {
  kSplit,
  kLyapunov,
  kLyapunovPi,
  kRiccati,
  kRiccatiPi,
  kRobustB,
  kRobustNoise,
  kGammaSweep,
};

std::string to_string(ExperimentKind kind);

struct RobustSettings {
  /// Uncertainty (robust-b) or noise energy (robust-noise). When unset the
  /// run uses `fraction` times the threshold certified for the clean design.
  std::optional<double> level;
  double fraction = 0.9;
  std::size_t draws = 100;
  /// Multiples of the threshold swept for sweep.csv.
  std::vector<double> sweep = {0.1, 0.25, 0.5, 0.75, 0.9, 1.5, 3.0, 10.0};
  /// ||Delta_B|| of the input matrix that generated the robust-b data.
  double data_kappa = 0.05;
  /// Solve the main nominal design with the integral Riccati flow.
  bool distributed = true;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kLyapunovPi;
  std::uint64_t seed = 1;
  std::string system_label;
  LtiSystem system;
  std::size_t agents = 0;
  GraphSpec graph;
  std::optional<GraphSpec> allocation_graph;
  std::vector<double> gammas = {1000.0};
  /// Flow swept by gamma-sweep: "riccati" or "lyapunov" (coupled flows).
  std::string sweep_flow = "riccati";
  Matrix Q;
  Matrix R;
  double step = 1e-2;
  double horizon = 20.0;
  double tolerance = 1e-6;
  AllocationSettings allocation;
  double state_scale = 1.0;
  double input_scale = 1.0;
  RobustSettings robust;
  std::string output_dir = "out";

  /// Resolved configuration, echoed into summary.json.
  nlohmann::ordered_json echo() const;
};

/// Applies "a.b.c=value"; the value is parsed as YAML (scalar or flow
/// sequence). Throws ValidationError on malformed input.
void apply_override(YAML::Node& root, const std::string& assignment);

/// Validates and resolves a parsed document. Throws ValidationError naming
/// the offending key.
ExperimentConfig parse_config(const YAML::Node& root);

ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides);

}  // namespace ddc::experiment
