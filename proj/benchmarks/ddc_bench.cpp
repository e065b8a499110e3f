#include <benchmark/benchmark.h>

#include "ddc/graph.hpp"
#include "ddc/lyapunov.hpp"
#include "ddc/model.hpp"
#include "ddc/oracles.hpp"
#include "ddc/random.hpp"
#include "ddc/riccati.hpp"
#include "ddc/splitting.hpp"

namespace {

using namespace ddc;

Matrix hurwitz_matrix(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix A = rng.uniform_matrix(n, n, -1, 1);
  A -= (spectral_abscissa(A) + 0.5) * Matrix::Identity(n, n);
  return A;
}

struct Fixture {
  Matrix A;
  Matrix B;
  FragmentedDataset data;
  std::vector<Matrix> shares;
};

Fixture fixture(Eigen::Index n, Eigen::Index m, std::size_t N) {
  Fixture f;
  f.A = hurwitz_matrix(n, 11);
  f.B = Rng(12).uniform_matrix(n, m, -1, 1);
  SamplingOptions o;
  o.agents = N;
  o.seed = 13;
  o.require_input_rank = m > 0;
  f.data = sample_algebraic(LtiSystem(f.A, f.B), o);
  GraphSpec complete;
  complete.kind = GraphKind::kComplete;
  const AllocationResult r =
      right_inverse_allocation(f.data, make_graph(complete, N), {});
  f.shares = share_matrices(build_shares(f.data, r.w, f.B));
  return f;
}

void BM_LyapunovDirect(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Matrix A = hurwitz_matrix(n, 1);
  const Matrix Q = Matrix::Identity(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lyapunov_direct(A, Q));
}
BENCHMARK(BM_LyapunovDirect)->Arg(4)->Arg(8)->Arg(16);

void BM_NewtonKleinman(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Matrix A = hurwitz_matrix(n, 2) + 0.8 * Matrix::Identity(n, n);
  const Matrix B = Rng(3).uniform_matrix(n, 2, -1, 1);
  const Matrix Q = Matrix::Identity(n, n);
  const Matrix R = Matrix::Identity(2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(solve_are_newton(A, B, Q, R));
}
BENCHMARK(BM_NewtonKleinman)->Arg(4)->Arg(8);

void BM_Allocation(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const Matrix A = hurwitz_matrix(4, 4);
  SamplingOptions o;
  o.agents = N;
  o.seed = 5;
  const FragmentedDataset ds =
      sample_algebraic(LtiSystem(A, Matrix::Zero(4, 0)), o);
  GraphSpec complete;
  complete.kind = GraphKind::kComplete;
  const CommGraph g = make_graph(complete, N);
  for (auto _ : state)
    benchmark::DoNotOptimize(right_inverse_allocation(ds, g, {}));
}
BENCHMARK(BM_Allocation)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_DistDleCoupled(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const Fixture f = fixture(4, 0, N);
  LyapunovProblem p;
  p.shares = f.shares;
  p.Q = Matrix::Identity(4, 4);
  p.graph = make_graph(GraphSpec{}, N);
  p.horizon = 5.0;
  const std::vector<Matrix> zero(N, Matrix::Zero(4, 4));
  for (auto _ : state)
    benchmark::DoNotOptimize(dist_dle_coupled(p, zero));
}
BENCHMARK(BM_DistDleCoupled)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_DistDreCoupled(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const Fixture f = fixture(4, 2, N);
  RiccatiProblem p;
  p.shares = f.shares;
  p.B = f.B;
  p.Q = Matrix::Identity(4, 4);
  p.R = Matrix::Identity(2, 2);
  p.graph = make_graph(GraphSpec{}, N);
  p.horizon = 5.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(dist_dre_coupled(p));
}
BENCHMARK(BM_DistDreCoupled)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
