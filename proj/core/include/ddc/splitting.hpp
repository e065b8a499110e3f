#pragma once

// Distributed computation of a right inverse of the (never assembled) data
// matrix and the rank-one shares A_i with A = sum_i A_i.

#include <cstddef>
#include <optional>
#include <vector>

#include "ddc/graph.hpp"
#include "ddc/model.hpp"
#include "ddc/numerics.hpp"

namespace ddc {

/// Find w(i) with sum_i v(i) w(i)^T = target, each agent knowing only v(i).
struct AllocationProblem {
  std::vector<Vector> v;  // per agent, length n1
  Matrix target;          // n1 x n2, known to every agent
  CommGraph graph;
  double k_w = 1.0;
  double tolerance = 1e-8;
  double max_horizon = 1e5;
  /// Upper bound on the integration step; the actual step also obeys an
  /// RK4 stability rule derived from the graph and the data.
  double max_step = 0.5;
};

struct AllocationResult {
  std::vector<Vector> w;
  /// ||sum_i v(i) w(i)^T - target||_F at the stopping time.
  double residual = 0.0;
  /// max_i ||Lambda_i - mean_j Lambda_j||_F over the multiplier matrices.
  double dual_disagreement = 0.0;
  double time = 0.0;
  std::size_t steps = 0;
  double step = 0.0;
  /// (t, residual) sampled along the run.
  std::vector<std::pair<double, double>> residual_history;
};

/// Integrates the primal-dual flow
///   w'(i)      = -k_w w(i) + Lambda_i^T v(i)
///   Mu'_i      = -sum_{j in N_i} (Lambda_i - Lambda_j)
///   Lambda'_i  =  sum_{j in N_i} (Mu_i - Mu_j) - v(i) w(i)^T + target / N
/// from zero until the harness-level stopping test holds: constraint residual
/// <= tolerance, multipliers in consensus to within tolerance and
/// ||w'||_inf <= tolerance. Throws NumericalError carrying the residual
/// history if that does not happen within max_horizon.
AllocationResult allocate(const AllocationProblem& p);

/// Share held by one agent: A_i = r_i y_i^T.
struct Share {
  std::size_t agent = 0;
  Vector r;  // r_hat_i (B known) or r_i (extended mode)
  Vector y;
  Matrix A;
};

/// With `input_matrix` the shares use r_hat = r - B u; without it they use r
/// directly, which is exact when the y_i also annihilate the inputs
/// (extended_allocation).
std::vector<Share> build_shares(const FragmentedDataset& ds,
                                const std::vector<Vector>& y,
                                const std::optional<Matrix>& input_matrix);

std::vector<Matrix> share_matrices(const std::vector<Share>& shares);

/// Sum of the share matrices. Only the harness and oracles call this.
Matrix sum_shares(const std::vector<Matrix>& shares);

struct AllocationSettings {
  double k_w = 1.0;
  double tolerance = 1e-8;
  double max_horizon = 1e5;
  double max_step = 0.5;
};

/// Plain allocation: v(i) = x(t_i), target = I_n.
AllocationResult right_inverse_allocation(const FragmentedDataset& ds,
                                          const CommGraph& graph,
                                          const AllocationSettings& settings);

/// Extended allocation for unknown B: v(i) = [x(t_i); u(t_i)],
/// target = [I_n; 0_{m x n}], so that sum x_i y_i^T = I and sum u_i y_i^T = 0.
AllocationResult extended_allocation(const FragmentedDataset& ds,
                                     const CommGraph& graph,
                                     const AllocationSettings& settings);

}  // namespace ddc
