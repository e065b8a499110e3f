#pragma once

// Consensus / disagreement coordinates of a network matrix flow. With
// L = U Gamma U^T, omega = 1 kron I and calU = U kron I (identity of size n^2):
//   xi1 = mean_i vec(P_i) - vec(P*)     xi2 = calU^T p
//   xi3 = calU^T y - y*                 xi4 = mean_i vec(Y_i)
// where p, y stack vec(P_i), vec(Y_i) and y* = Lambda^{-1} A21 vec(P*) / gamma.

#include <utility>
#include <vector>

#include "ddc/graph.hpp"
#include "ddc/numerics.hpp"

namespace ddc {

struct StructuredCoords {
  Vector xi1;  // n^2
  Vector xi2;  // (N-1) n^2
  Vector xi3;  // (N-1) n^2
  Vector xi4;  // n^2

  /// [xi1; xi2; xi3; xi4].
  Vector stacked() const;
  static StructuredCoords split(const Vector& stacked, Eigen::Index n2,
                                Eigen::Index blocks);
};

/// Matrices of the linear part in structured coordinates, built from
/// Abar_i = I kron A_i^T + A_i^T kron I:
///   A_bar = sum_i Abar_i
///   A12 = (1/N) omega^T calA calU, A21 = calU^T calA omega,
///   A22 = calU^T calA calU, A23 = Lambda = Gamma kron I,
/// with calA = N blkdiag(Abar_i).
struct StructuredBlocks {
  Matrix A_bar;
  Matrix A12;
  Matrix A21;
  Matrix A22;
  Vector lambda;  // diagonal of A23
  Eigen::Index n = 0;
  std::size_t agents = 0;
};

StructuredBlocks structured_blocks(const std::vector<Matrix>& shares,
                                   const SpectralSplit& split);

/// y* for coupling gain gamma.
Vector equilibrium_shift(const StructuredBlocks& blocks, double gamma,
                         const Matrix& P_star);

/// Y may be empty (flows without integral states), meaning Y_i = 0.
StructuredCoords structured_coords(const std::vector<Matrix>& P,
                                   const std::vector<Matrix>& Y,
                                   const SpectralSplit& split,
                                   const StructuredBlocks& blocks,
                                   double gamma, const Matrix& P_star);

/// Inverse of structured_coords: returns (P_i, Y_i).
std::pair<std::vector<Matrix>, std::vector<Matrix>> structured_inverse(
    const StructuredCoords& xi, const SpectralSplit& split,
    const StructuredBlocks& blocks, double gamma, const Matrix& P_star);

/// Linear map xi' = M xi of the integral-coupled Lyapunov flow:
///   [[A_bar, A12,               0,           0],
///    [A21,   A22 - g Lambda,    -g Lambda,   0],
///    [0,     g Lambda,          0,           0],
///    [0,     0,                 0,           0]].
Matrix compact_dle_matrix(const StructuredBlocks& blocks, double gamma);

}  // namespace ddc
