#include "ddc/structured.hpp"

#include <sstream>

#include "ddc/errors.hpp"

namespace ddc {

namespace {

Matrix lifted(const Matrix& a) {
  const Eigen::Index n = a.rows();
  const Matrix I = Matrix::Identity(n, n);
  return kron(I, a.transpose()) + kron(a.transpose(), I);
}

void check_split(const SpectralSplit& split, std::size_t agents) {
  if (static_cast<std::size_t>(split.U.rows()) != agents ||
      split.U.cols() != split.gamma.size() ||
      static_cast<std::size_t>(split.U.cols()) + 1 != agents) {
    throw ValidationError("structured coordinates: spectral split does not "
                          "match the number of agents");
  }
}

}  // namespace

Vector StructuredCoords::stacked() const {
  Vector out(xi1.size() + xi2.size() + xi3.size() + xi4.size());
  out << xi1, xi2, xi3, xi4;
  return out;
}

StructuredCoords StructuredCoords::split(const Vector& stacked,
                                         Eigen::Index n2,
                                         Eigen::Index blocks) {
  if (stacked.size() != n2 * (2 + 2 * blocks)) {
    throw ValidationError("StructuredCoords::split: length mismatch");
  }
  StructuredCoords xi;
  xi.xi1 = stacked.segment(0, n2);
  xi.xi2 = stacked.segment(n2, n2 * blocks);
  xi.xi3 = stacked.segment(n2 + n2 * blocks, n2 * blocks);
  xi.xi4 = stacked.segment(n2 + 2 * n2 * blocks, n2);
  return xi;
}

StructuredBlocks structured_blocks(const std::vector<Matrix>& shares,
                                   const SpectralSplit& split) {
  const std::size_t N = shares.size();
  if (N < 2) throw ValidationError("structured_blocks: need at least 2 agents");
  check_split(split, N);
  const Eigen::Index n = shares.front().rows();
  const Eigen::Index n2 = n * n;
  const Eigen::Index K = split.U.cols();
  const double dN = static_cast<double>(N);

  std::vector<Matrix> lift;
  lift.reserve(N);
  for (const Matrix& a : shares) {
    if (a.rows() != n || a.cols() != n) {
      throw ValidationError("structured_blocks: shares must be n x n");
    }
    lift.push_back(lifted(a));
  }

  StructuredBlocks b;
  b.n = n;
  b.agents = N;
  b.A_bar = Matrix::Zero(n2, n2);
  for (const Matrix& l : lift) b.A_bar += l;
  b.A12 = Matrix::Zero(n2, n2 * K);
  b.A21 = Matrix::Zero(n2 * K, n2);
  b.A22 = Matrix::Zero(n2 * K, n2 * K);
  for (Eigen::Index k = 0; k < K; ++k) {
    for (std::size_t i = 0; i < N; ++i) {
      const double u = split.U(static_cast<Eigen::Index>(i), k);
      b.A12.middleCols(k * n2, n2) += u * lift[i];
      b.A21.middleRows(k * n2, n2) += dN * u * lift[i];
    }
  }
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index l = 0; l < K; ++l) {
      auto blk = b.A22.block(k * n2, l * n2, n2, n2);
      for (std::size_t i = 0; i < N; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        blk += dN * split.U(ii, k) * split.U(ii, l) * lift[i];
      }
    }
  }
  b.lambda.resize(n2 * K);
  for (Eigen::Index k = 0; k < K; ++k) {
    b.lambda.segment(k * n2, n2).setConstant(split.gamma(k));
  }
  return b;
}

Vector equilibrium_shift(const StructuredBlocks& blocks, double gamma,
                         const Matrix& P_star) {
  if (!(gamma > 0.0)) throw ValidationError("equilibrium_shift: gamma <= 0");
  return (blocks.A21 * vec(P_star)).cwiseQuotient(blocks.lambda) / gamma;
}

StructuredCoords structured_coords(const std::vector<Matrix>& P,
                                   const std::vector<Matrix>& Y,
                                   const SpectralSplit& split,
                                   const StructuredBlocks& blocks,
                                   double gamma, const Matrix& P_star) {
  const std::size_t N = P.size();
  if (N != blocks.agents || (!Y.empty() && Y.size() != N)) {
    throw ValidationError("structured_coords: agent count mismatch");
  }
  check_split(split, N);
  const Eigen::Index n2 = blocks.n * blocks.n;
  const Eigen::Index K = split.U.cols();
  StructuredCoords xi;
  xi.xi1 = Vector::Zero(n2);
  xi.xi4 = Vector::Zero(n2);
  xi.xi2 = Vector::Zero(n2 * K);
  xi.xi3 = Vector::Zero(n2 * K);
  for (std::size_t i = 0; i < N; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const Vector p = vec(P[i]);
    xi.xi1 += p;
    for (Eigen::Index k = 0; k < K; ++k)
      xi.xi2.segment(k * n2, n2) += split.U(ii, k) * p;
    if (!Y.empty()) {
      const Vector y = vec(Y[i]);
      xi.xi4 += y;
      for (Eigen::Index k = 0; k < K; ++k)
        xi.xi3.segment(k * n2, n2) += split.U(ii, k) * y;
    }
  }
  const double dN = static_cast<double>(N);
  xi.xi1 = xi.xi1 / dN - vec(P_star);
  xi.xi4 /= dN;
  xi.xi3 -= equilibrium_shift(blocks, gamma, P_star);
  return xi;
}

std::pair<std::vector<Matrix>, std::vector<Matrix>> structured_inverse(
    const StructuredCoords& xi, const SpectralSplit& split,
    const StructuredBlocks& blocks, double gamma, const Matrix& P_star) {
  const std::size_t N = blocks.agents;
  check_split(split, N);
  const Eigen::Index n = blocks.n;
  const Eigen::Index n2 = n * n;
  const Eigen::Index K = split.U.cols();
  const Vector p_mean = xi.xi1 + vec(P_star);
  const Vector y_proj = xi.xi3 + equilibrium_shift(blocks, gamma, P_star);
  std::vector<Matrix> P, Y;
  for (std::size_t i = 0; i < N; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    Vector p = p_mean;
    Vector y = xi.xi4;
    for (Eigen::Index k = 0; k < K; ++k) {
      p += split.U(ii, k) * xi.xi2.segment(k * n2, n2);
      y += split.U(ii, k) * y_proj.segment(k * n2, n2);
    }
    P.push_back(mat(p, n, n));
    Y.push_back(mat(y, n, n));
  }
  return {std::move(P), std::move(Y)};
}

Matrix compact_dle_matrix(const StructuredBlocks& b, double gamma) {
  const Eigen::Index n2 = b.n * b.n;
  const Eigen::Index m = b.lambda.size();
  Matrix M = Matrix::Zero(2 * n2 + 2 * m, 2 * n2 + 2 * m);
  const Matrix gL = (gamma * b.lambda).asDiagonal();
  M.block(0, 0, n2, n2) = b.A_bar;
  M.block(0, n2, n2, m) = b.A12;
  M.block(n2, 0, m, n2) = b.A21;
  M.block(n2, n2, m, m) = b.A22 - gL;
  M.block(n2, n2 + m, m, m) = -gL;
  M.block(n2 + m, n2, m, m) = gL;
  return M;
}

}  // namespace ddc
