#pragma once

// Lyapunov equation sum_i (A_i^T P + P A_i) + Q = 0 solved by network flows
// over the shares A_i.

#include <vector>

#include "ddc/flow.hpp"
#include "ddc/graph.hpp"
#include "ddc/numerics.hpp"
#include "ddc/structured.hpp"

namespace ddc {

struct LyapunovProblem {
  std::vector<Matrix> shares;
  Matrix Q;
  CommGraph graph;
  double gamma = 1e3;
  /// Upper bound on the step; the flow applies
  /// min(step, 0.5 / (N max_i ||A_i|| + gamma lambda_max(L))).
  double step = 1e-2;
  double horizon = 20.0;
};

/// P' = A^T P + P A + Q.
FlowResult dle_centralized(const Matrix& A, const Matrix& Q, const Matrix& P0,
                           double step, double horizon,
                           const FlowOptions& options = {});

/// P_i' = N (A_i^T P_i + P_i A_i) + Q + gamma sum_{j in N_i} (P_j - P_i).
/// Converges to a neighbourhood of P* that shrinks as gamma grows.
FlowResult dist_dle_coupled(const LyapunovProblem& p,
                            const std::vector<Matrix>& P0,
                            const FlowOptions& options = {});

struct LyapunovCertificate {
  Matrix P;  // agent average at the horizon
  /// ||A^T P + P A + Q||_F with A = sum_i A_i.
  double residual = 0.0;
  double tolerance = 0.0;
  /// ||P_i - P_ref||_F / ||P_ref||_F with P_ref the options' reference when
  /// given and the certificate's P otherwise.
  std::vector<double> final_rel_errors;
};

struct LyapunovPiResult {
  FlowResult flow;
  LyapunovCertificate certificate;
};

/// Integral-coupled flow
///   P_i' = N (A_i^T P_i + P_i A_i) + Q + gamma sum_j (P_j - P_i)
///          + gamma sum_j (Y_j - Y_i)
///   Y_i' = -gamma sum_j (P_j - P_i),
/// which converges to P* exactly for gamma above gamma_bound_dle. Throws
/// NumericalError (with the sampled residual history) if the consensus
/// residual at the horizon exceeds `tolerance` or the consensus is not
/// positive definite.
LyapunovPiResult dist_dle_pi(const LyapunovProblem& p,
                             const std::vector<Matrix>& P0,
                             const std::vector<Matrix>& Y0,
                             const FlowOptions& options = {},
                             double tolerance = 1e-6);

/// V = tr(S (P - P*) S (P - P*)), S = P*^{-1}. Throws ValidationError unless
/// P* is symmetric positive definite.
double lyapunov_V(const Matrix& P, const Matrix& P_star);

/// Smallest gamma with 2 gamma Lambda > A22 + A22^T
/// + (A12^T Pbar + A21) Qbar^{-1} (Pbar A12 + A21^T), where
/// Pbar = P*^{-1} kron P*^{-1} and Qbar = -(A_bar^T Pbar + Pbar A_bar).
/// Returns 0 when every positive gamma qualifies.
double gamma_bound_dle(const std::vector<Matrix>& shares,
                       const CommGraph& graph, const Matrix& Q,
                       const Matrix& P_star);

/// Structured coordinates of a Lyapunov network state (see structured.hpp).
StructuredCoords structured_coords_dle(const std::vector<Matrix>& P,
                                       const std::vector<Matrix>& Y,
                                       const SpectralSplit& split,
                                       const std::vector<Matrix>& shares,
                                       double gamma, const Matrix& P_star);

}  // namespace ddc
