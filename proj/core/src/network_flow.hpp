#pragma once

#include <cstddef>
#include <vector>

#include "ddc/flow.hpp"
#include "ddc/graph.hpp"

namespace ddc::detail {

/// Network matrix flow
///   P_i' = N (A_i^T P_i + P_i A_i) + Q - P_i D P_i + gamma sum_j (P_j - P_i)
///          [+ gamma sum_j (Y_j - Y_i)]
///   Y_i' = -gamma sum_j (P_j - P_i)                         (integral mode)
/// with neighbour sums in ascending index order and symmetrization after
/// every step. A single agent with share A is the centralized flow.
struct NetworkFlowSpec {
  std::vector<Matrix> shares;
  Matrix Q;
  Matrix D;  // empty for Lyapunov flows
  const CommGraph* graph = nullptr;
  double gamma = 0.0;
  bool integral = false;
  std::vector<Matrix> P0;
  std::vector<Matrix> Y0;
  double max_step = 0.0;
  double horizon = 0.0;
  const char* name = "flow";
};

double step_rule(const NetworkFlowSpec& spec, double lambda_max,
                 double max_p_norm);

FlowResult run_network_flow(const NetworkFlowSpec& spec,
                            const FlowOptions& options);

}  // namespace ddc::detail
