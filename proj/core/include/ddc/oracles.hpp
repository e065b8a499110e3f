#pragma once

// Centralized reference solvers. The distributed flows never call these; they
// exist for validation, certificates and diagnostics.

#include <vector>

#include "ddc/numerics.hpp"

namespace ddc {

/// Solves A^T P + P A + Q = 0 through the n^2 x n^2 Kronecker system
/// (I kron A^T + A^T kron I) vec(P) = -vec(Q), with one step of iterative
/// refinement. The result is symmetrized when Q is symmetric. Throws
/// NumericalError when the Kronecker matrix is singular (some eigenvalue pair
/// of A sums to zero).
Matrix solve_lyapunov_direct(const Matrix& A, const Matrix& Q);

/// ||A^T P + P A + Q - P D P||_F. D may be empty (treated as zero).
double riccati_residual(const Matrix& A, const Matrix& D, const Matrix& Q,
                        const Matrix& P);

/// ||A^T P + P A + Q||_F.
double lyapunov_residual(const Matrix& A, const Matrix& Q, const Matrix& P);

/// B R^{-1} B^T. Throws ValidationError unless R is symmetric positive
/// definite and conformable with B.
Matrix input_weight(const Matrix& B, const Matrix& R);

struct AreSolution {
  Matrix P;
  Matrix K;  // -R^{-1} B^T P
  double residual = 0.0;
  int iterations = 0;
  /// tr(P_k) after every Newton step.
  std::vector<double> trace_history;
};

/// Newton-Kleinman iteration for A^T P + P A + Q - P B R^{-1} B^T P = 0.
/// Without K0 the iteration starts from K = 0 when A is Hurwitz and otherwise
/// from the shifted-Gramian gain K0 = -R^{-1} B^T Z^{-1}, where
/// (A + s I) Z + Z (A + s I)^T = 2 B R^{-1} B^T with s > ||A||_2. Throws
/// NumericalError when no stabilizing start is found, when the closed loop
/// loses stability, or when the best residual exceeds
/// 1e-10 * max(1, ‖Q‖_F + ‖P D P‖_F) with D = B R^{-1} B^T.
AreSolution solve_are_newton(const Matrix& A, const Matrix& B, const Matrix& Q,
                             const Matrix& R, const Matrix* K0 = nullptr);

/// LQR cost tr((Q + K^T R K) W) with (A + B K) W + W (A + B K)^T + I = 0.
/// Throws ValidationError when A + B K is not Hurwitz.
double lqr_cost(const Matrix& A, const Matrix& B, const Matrix& K,
                const Matrix& Q, const Matrix& R);

/// Throws ValidationError naming `what` unless m is symmetric (to 1e-12
/// relative) with smallest eigenvalue > 0.
void require_positive_definite(const Matrix& m, const char* what);

}  // namespace ddc
