#include "ddc/structured.hpp"

#include <gtest/gtest.h>

#include "ddc/lyapunov.hpp"
#include "ddc/model.hpp"
#include "ddc/oracles.hpp"
#include "ddc/riccati.hpp"
#include "ddc/splitting.hpp"
#include "support/reference.hpp"

namespace ddc {
namespace {

struct Network {
  Matrix A, B;
  std::vector<Matrix> shares;
  CommGraph graph;
  SpectralSplit split;
  Matrix P_lyap;
};

Network make_setup(std::size_t N, std::uint64_t seed) {
  Rng rng(seed);
  Network s;
  s.A = testing::random_hurwitz(2, rng, 0.5);
  s.B = rng.uniform_matrix(2, 1, -1, 1);
  SamplingOptions o;
  o.agents = N;
  o.seed = seed;
  const FragmentedDataset ds = sample_algebraic(LtiSystem(s.A, s.B), o);
  GraphSpec complete;
  complete.kind = GraphKind::kComplete;
  const AllocationResult r = right_inverse_allocation(ds, make_graph(complete, N), {});
  s.shares = share_matrices(build_shares(ds, r.w, s.B));
  s.graph = make_graph(GraphSpec{}, N);
  s.split = spectral_split(laplacian(s.graph));
  s.P_lyap = solve_lyapunov_direct(s.A, Matrix::Identity(2, 2));
  return s;
}

TEST(Structured, InverseRoundTrip) {
  const Network s = make_setup(4, 1);
  const StructuredBlocks blocks = structured_blocks(s.shares, s.split);
  Rng rng(2);
  std::vector<Matrix> P, Y;
  for (int i = 0; i < 4; ++i) {
    P.push_back(symmetrize(rng.uniform_matrix(2, 2, -1, 1)));
    Y.push_back(symmetrize(rng.uniform_matrix(2, 2, -1, 1)));
  }
  const StructuredCoords xi = structured_coords(P, Y, s.split, blocks, 50.0, s.P_lyap);
  EXPECT_EQ(xi.xi1.size(), 4);
  EXPECT_EQ(xi.xi2.size(), 12);
  const auto [P2, Y2] = structured_inverse(xi, s.split, blocks, 50.0, s.P_lyap);
  for (int i = 0; i < 4; ++i) {
    EXPECT_LE((P2[i] - P[i]).norm(), 1e-12);
    EXPECT_LE((Y2[i] - Y[i]).norm(), 1e-12);
  }
  const StructuredCoords back = StructuredCoords::split(xi.stacked(), 4, 3);
  EXPECT_EQ(back.stacked(), xi.stacked());
}

TEST(Structured, ConsensusAtReferenceIsOrigin) {
  const Network s = make_setup(3, 3);
  const StructuredBlocks blocks = structured_blocks(s.shares, s.split);
  const std::vector<Matrix> P(3, s.P_lyap);
  const StructuredCoords xi = structured_coords(P, {}, s.split, blocks, 10.0, s.P_lyap);
  EXPECT_LE(xi.xi1.norm(), 1e-15);
  EXPECT_LE(xi.xi2.norm(), 1e-12);
  EXPECT_LE(xi.xi4.norm(), 1e-15);
}

TEST(Structured, SumOfLiftedSharesIsLiftedSum) {
  const Network s = make_setup(4, 4);
  const StructuredBlocks blocks = structured_blocks(s.shares, s.split);
  const Matrix A = sum_shares(s.shares);
  const Matrix I = Matrix::Identity(2, 2);
  const Matrix lifted = kron(I, A.transpose()) + kron(A.transpose(), I);
  EXPECT_LE((blocks.A_bar - lifted).norm(), 1e-12);
}

TEST(Structured, CompactDynamicsReproduceIntegralFlow) {
  const Network s = make_setup(4, 5);
  const double gamma = 20.0;
  const StructuredBlocks blocks = structured_blocks(s.shares, s.split);
  LyapunovProblem p{s.shares, Matrix::Identity(2, 2), s.graph, gamma, 1e-2, 1.0};
  FlowOptions o;
  o.keep_every = 1;
  Rng rng(6);
  std::vector<Matrix> P0, Y0;
  for (int i = 0; i < 4; ++i) {
    P0.push_back(symmetrize(rng.uniform_matrix(2, 2, -1, 1)));
    Y0.push_back(Matrix::Zero(2, 2));
  }
  const Matrix P_star = solve_lyapunov_direct(sum_shares(s.shares), Matrix::Identity(2, 2));
  const FlowResult flow = dist_dle_pi(p, P0, Y0, o, 1e9).flow;
  ASSERT_GE(flow.snapshots.size(), 2u);

  const Matrix M = compact_dle_matrix(blocks, gamma);
  OdeProblem ode;
  ode.dimension = M.rows();
  ode.rhs = [&](double, const Vector& x, Vector& dx) { dx.noalias() = M * x; };
  ode.initial_state =
      structured_coords_dle(P0, Y0, s.split, s.shares, gamma, P_star).stacked();
  ode.step = flow.step_sizes.front();
  ode.horizon = 1.0;
  const Trajectory tr = integrate(ode);
  const Vector expected = structured_coords_dle(flow.P, flow.Y, s.split, s.shares,
                                                gamma, P_star).stacked();
  EXPECT_LE((tr.final_state() - expected).norm(), 1e-8);

  const Vector xi4_0 = StructuredCoords::split(ode.initial_state, 4, 3).xi4;
  for (const FlowSnapshot& snap : flow.snapshots) {
    const StructuredCoords xi =
        structured_coords_dle(snap.P, snap.Y, s.split, s.shares, gamma, P_star);
    EXPECT_LE((xi.xi4 - xi4_0).norm(), 1e-9) << "t " << snap.t;
  }
}

TEST(Structured, ZeroStartMapsToMinusReference) {
  const Network s = make_setup(3, 7);
  const Matrix P_are = solve_are_newton(s.A, s.B, Matrix::Identity(2, 2),
                                        Matrix::Identity(1, 1)).P;
  const std::vector<Matrix> zeros(3, Matrix::Zero(2, 2));
  const StructuredCoords xi =
      structured_coords_dre(zeros, zeros, s.split, s.shares, 100.0, P_are);
  EXPECT_LE((xi.xi1 + vec(P_are)).norm(), 1e-10);
  EXPECT_LE(xi.xi2.norm(), 1e-15);
}

}  // namespace
}  // namespace ddc
