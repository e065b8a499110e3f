#include "ddc/splitting.hpp"

#include <gtest/gtest.h>

#include "ddc/errors.hpp"
#include "ddc/random.hpp"
#include "support/reference.hpp"

namespace ddc {
namespace {

GraphSpec kind(GraphKind k) {
  GraphSpec s;
  s.kind = k;
  return s;
}

LtiSystem random_system(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  Rng rng(seed);
  return LtiSystem(rng.uniform_matrix(n, n, -1, 1), rng.uniform_matrix(n, m, -1, 1));
}

FragmentedDataset data(const LtiSystem& sys, std::size_t N, std::uint64_t seed,
                       bool with_inputs = false) {
  SamplingOptions o;
  o.agents = N;
  o.seed = seed;
  o.require_input_rank = with_inputs;
  return sample_algebraic(sys, o);
}

TEST(Allocation, MatchesPseudoinverseMinimumNorm) {
  const LtiSystem sys = random_system(3, 0, 1);
  const FragmentedDataset ds = data(sys, 5, 2);
  AllocationSettings settings;
  settings.tolerance = 1e-9;
  const AllocationResult r =
      right_inverse_allocation(ds, make_graph(kind(GraphKind::kComplete), 5), settings);
  EXPECT_LE(r.residual, settings.tolerance);
  const Matrix Y = testing::pseudoinverse(ds.states());  // N x n
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_LE((r.w[i] - Y.row(static_cast<Eigen::Index>(i)).transpose()).norm(),
              10 * settings.tolerance);
  }
}

TEST(Allocation, SharesSumToSystemMatrix) {
  const LtiSystem sys = random_system(3, 2, 4);
  const FragmentedDataset ds = data(sys, 6, 5);
  const AllocationResult r =
      right_inverse_allocation(ds, make_graph(kind(GraphKind::kComplete), 6), {});
  const std::vector<Share> shares = build_shares(ds, r.w, sys.B);
  Matrix sum_xy = Matrix::Zero(3, 3);
  for (std::size_t i = 0; i < shares.size(); ++i) {
    EXPECT_LE((shares[i].A - shares[i].r * shares[i].y.transpose()).norm(), 1e-15);
    sum_xy += ds.samples[i].x * shares[i].y.transpose();
  }
  EXPECT_LE((sum_xy - Matrix::Identity(3, 3)).norm(), 1e-7);
  EXPECT_LE((sum_shares(share_matrices(shares)) - sys.A).norm(), 1e-6);
}

TEST(Allocation, GenericTarget) {
  Rng rng(3);
  AllocationProblem p;
  for (int i = 0; i < 4; ++i) p.v.push_back(rng.uniform_matrix(2, 1, -1, 1));
  p.target = rng.uniform_matrix(2, 3, -1, 1);
  p.graph = make_graph(kind(GraphKind::kPath), 4);
  const AllocationResult r = allocate(p);
  Matrix sum = Matrix::Zero(2, 3);
  for (int i = 0; i < 4; ++i) sum += p.v[i] * r.w[i].transpose();
  EXPECT_LE((sum - p.target).norm(), p.tolerance);
  EXPECT_LE(r.dual_disagreement, p.tolerance);
  EXPECT_FALSE(r.residual_history.empty());
  EXPECT_EQ(r.residual_history.back().first, r.time);
}

TEST(Allocation, ExtendedSharesAnnihilateInputs) {
  const LtiSystem sys = random_system(3, 2, 6);
  const FragmentedDataset ds = data(sys, 7, 7, true);
  const AllocationResult r =
      extended_allocation(ds, make_graph(kind(GraphKind::kComplete), 7), {});
  Matrix sum_uy = Matrix::Zero(2, 3);
  for (std::size_t i = 0; i < 7; ++i) sum_uy += ds.samples[i].u * r.w[i].transpose();
  EXPECT_LE(sum_uy.norm(), 1e-7);
  const Matrix A0 = sum_shares(share_matrices(build_shares(ds, r.w, std::nullopt)));
  EXPECT_LE((A0 - sys.A).norm(), 1e-6);
}

TEST(Allocation, ExtendedSharesDoNotDependOnB) {
  // Same A, x and u; r recomputed for a different B.
  const LtiSystem sys = random_system(3, 1, 8);
  const FragmentedDataset ds = data(sys, 6, 9, true);
  FragmentedDataset other = ds;
  Rng rng(10);
  const Matrix B2 = rng.uniform_matrix(3, 1, -1, 1);
  for (DataSample& s : other.samples) s.r = sys.A * s.x + B2 * s.u;

  const CommGraph g = make_graph(kind(GraphKind::kComplete), 6);
  const AllocationResult r1 = extended_allocation(ds, g, {});
  const AllocationResult r2 = extended_allocation(other, g, {});
  const Matrix A1 = sum_shares(share_matrices(build_shares(ds, r1.w, std::nullopt)));
  const Matrix A2 = sum_shares(share_matrices(build_shares(other, r2.w, std::nullopt)));
  EXPECT_LE((A1 - A2).norm(), 1e-8);
}

TEST(Allocation, RankDeficientDataIsRejected) {
  AllocationProblem p;
  p.v = {Vector::Unit(2, 0), Vector::Unit(2, 0), 2 * Vector::Unit(2, 0)};
  p.target = Matrix::Identity(2, 2);
  p.graph = make_graph(kind(GraphKind::kRing), 3);
  EXPECT_THROW(allocate(p), ValidationError);
}

TEST(Allocation, ValidatesInputs) {
  AllocationProblem p;
  p.v = {Vector::Unit(2, 0), Vector::Unit(2, 1)};
  p.target = Matrix::Identity(2, 2);
  p.graph = make_graph(kind(GraphKind::kRing), 3);
  EXPECT_THROW(allocate(p), ValidationError);
  p.graph = make_graph(kind(GraphKind::kRing), 2);
  p.k_w = 0.0;
  EXPECT_THROW(allocate(p), ValidationError);
  p.k_w = 1.0;
  p.v[1] = Vector::Ones(3);
  EXPECT_THROW(allocate(p), ValidationError);
}

TEST(Allocation, HorizonExhaustionReportsHistory) {
  AllocationProblem p;
  p.v = {Vector::Unit(2, 0), Vector::Unit(2, 1)};
  p.target = Matrix::Identity(2, 2);
  p.graph = make_graph(kind(GraphKind::kRing), 2);
  p.max_horizon = 1.0;
  try {
    allocate(p);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_FALSE(e.history().empty());
  }
}

}  // namespace
}  // namespace ddc
