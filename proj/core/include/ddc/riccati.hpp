#pragma once

// Algebraic Riccati equation sum_i (A_i^T P + P A_i) + Q - P D P = 0,
// D = B R^{-1} B^T, solved by network flows from the zero matrix.

#include <vector>

#include "ddc/flow.hpp"
#include "ddc/graph.hpp"
#include "ddc/numerics.hpp"
#include "ddc/structured.hpp"

namespace ddc {

struct RiccatiProblem {
  std::vector<Matrix> shares;
  Matrix B;
  Matrix Q;
  Matrix R;
  CommGraph graph;
  double gamma = 500.0;
  /// Upper bound on the step. The flow uses
  /// min(step, 0.5 / (N max ||A_i|| + gamma lambda_max(L) + 2 ||D|| max ||P_i||)),
  /// re-evaluated every 100 steps.
  double step = 1e-2;
  double horizon = 20.0;
};

/// P' = A^T P + P A + Q - P D P from a symmetric positive semidefinite P0.
/// Throws ValidationError for an indefinite P0 and NumericalError on finite
/// escape or if the final state leaves the cone by more than 1e-8.
FlowResult dre_centralized(const Matrix& A, const Matrix& B, const Matrix& Q,
                           const Matrix& R, const Matrix& P0, double step,
                           double horizon, const FlowOptions& options = {});

/// P_i' = N (A_i^T P_i + P_i A_i) + Q - P_i D P_i + gamma sum_j (P_j - P_i),
/// P_i(0) = 0.
FlowResult dist_dre_coupled(const RiccatiProblem& p,
                            const FlowOptions& options = {});

struct RiccatiCertificate {
  Matrix P;  // agent average at the horizon
  Matrix K;  // -R^{-1} B^T P
  /// ARE residual with A = sum_i A_i.
  double are_residual = 0.0;
  /// ||P^{1/2} Q^{-1} P^{1/2}||_2.
  double rho = 0.0;
  /// Spectral abscissa of sum_i A_i + B K.
  double closed_loop_abscissa = 0.0;
  double tolerance = 0.0;
  std::vector<double> final_rel_errors;
};

struct RiccatiPiResult {
  FlowResult flow;
  RiccatiCertificate certificate;
};

/// Integral-coupled Riccati flow from P_i(0) = Y_i(0) = 0. Throws
/// NumericalError with the sampled residual history when the residual at
/// the horizon exceeds `tolerance` or the gain does not stabilize the sum of
/// the shares.
RiccatiPiResult dist_dre_pi(const RiccatiProblem& p,
                            const FlowOptions& options = {},
                            double tolerance = 1e-6);

struct RiccatiDecay {
  double V = 0.0;
  double rho = 0.0;
};

/// V(P, P*) as in lyapunov_V and rho = ||P*^{1/2} Q^{-1} P*^{1/2}||_2.
RiccatiDecay riccati_V(const Matrix& P, const Matrix& P_star, const Matrix& Q);

/// V0 exp(-2 t / rho).
double riccati_bound(double V0, double t, double rho);

/// ||P^{1/2} Q^{-1} P^{1/2}||_2.
double decay_constant(const Matrix& P, const Matrix& Q);

/// I_n kron (mat(v) D).
Matrix phi_r(const Vector& v, const Matrix& D);

/// (D mat(v))^T kron I_n. vec(V1 D V2) = phi_r(vec V1) vec V2
/// = phi_l(vec V2) vec V1.
Matrix phi_l(const Vector& v, const Matrix& D);

/// Structured coordinates of a Riccati network state. The equilibrium shift
/// coincides with the Lyapunov one because the quadratic term is identical
/// across agents at consensus.
StructuredCoords structured_coords_dre(const std::vector<Matrix>& P,
                                       const std::vector<Matrix>& Y,
                                       const SpectralSplit& split,
                                       const std::vector<Matrix>& shares,
                                       double gamma, const Matrix& P_star);

}  // namespace ddc
