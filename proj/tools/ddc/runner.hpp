#pragma once

// Pipeline: generate data, allocate shares, run flows, validate against the
// oracles, certify; then write the artifacts.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ddc/config.hpp"
#include "ddc/flow.hpp"

namespace ddc::experiment {

struct RunOutput {
  std::vector<AgentRecord> records;  // trajectory.csv
  std::size_t agents = 0;
  bool plot_residual = false;
  std::string plot_title;
  nlohmann::ordered_json data;
  nlohmann::ordered_json allocation;
  nlohmann::ordered_json results;
  /// Additional CSV files (name, content), e.g. sweep.csv.
  std::vector<std::pair<std::string, std::string>> extra_files;
  /// Wall-clock seconds per stage; kept out of summary.json.
  std::vector<std::pair<std::string, double>> timings;
};

/// Runs the experiment. Throws ValidationError or NumericalError.
RunOutput execute(const ExperimentConfig& config);

/// Per-agent terminal values taken from the last record of each agent.
nlohmann::ordered_json terminal_values(const std::vector<AgentRecord>& records,
                                       std::size_t agents);

/// Writes trajectory.csv, plot.svg, extra files, timing.json and
/// summary.json to config.output_dir and returns the summary document.
nlohmann::ordered_json write_artifacts(const ExperimentConfig& config,
                                       const RunOutput& out, double wall_time);

}  // namespace ddc::experiment
