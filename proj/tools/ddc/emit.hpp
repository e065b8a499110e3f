#pragma once

// Run artifacts: trajectory.csv, summary.json, plot.svg.

#include <filesystem>
#include <string>
#include <vector>

#include "ddc/flow.hpp"

namespace ddc::experiment {

inline constexpr const char* kTrajectoryHeader =
    "t,agent,rel_error,disagreement,residual,lyap_V,lyap_bound";

inline constexpr int kSummarySchemaVersion = 1;

/// %.17g; non-finite values print as nan/inf.
std::string format_double(double x);

/// Header plus one row per record, in record order.
std::string trajectory_csv(const std::vector<AgentRecord>& records);

/// Log-scale line chart of one record column against t, one polyline per
/// agent. `use_residual` selects the residual column instead of rel_error.
std::string plot_svg(const std::vector<AgentRecord>& records,
                     std::size_t agents, const std::string& title,
                     bool use_residual);

/// Writes `content` to dir/name, creating dir. Throws ValidationError when
/// the directory or the file cannot be written.
void write_text(const std::filesystem::path& dir, const std::string& name,
                const std::string& content);

}  // namespace ddc::experiment
