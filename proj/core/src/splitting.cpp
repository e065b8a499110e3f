#include "ddc/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ddc/errors.hpp"

namespace ddc {

namespace {

// The stopping test is evaluated every kCheckEvery steps.
constexpr std::size_t kCheckEvery = 10;

// Per-agent block of the allocation state: [w (n2) | Mu (n1 x n2) | Lambda].
struct AllocationLayout {
  Eigen::Index n1 = 0;
  Eigen::Index n2 = 0;
  Eigen::Index block() const { return n2 + 2 * n1 * n2; }
  Eigen::Index w(std::size_t i) const {
    return static_cast<Eigen::Index>(i) * block();
  }
  Eigen::Index mu(std::size_t i) const { return w(i) + n2; }
  Eigen::Index lambda(std::size_t i) const { return mu(i) + n1 * n2; }
};

struct StopMetrics {
  double residual = 0.0;
  double dual_disagreement = 0.0;
  double primal_rate = 0.0;
};

StopMetrics measure(const AllocationProblem& p, const AllocationLayout& lay,
                    const Vector& x) {
  const std::size_t N = p.v.size();
  Matrix sum = -p.target;
  Matrix mean_lambda = Matrix::Zero(lay.n1, lay.n2);
  for (std::size_t i = 0; i < N; ++i) {
    sum.noalias() += p.v[i] * x.segment(lay.w(i), lay.n2).transpose();
    mean_lambda += Eigen::Map<const Matrix>(x.data() + lay.lambda(i), lay.n1,
                                            lay.n2);
  }
  mean_lambda /= static_cast<double>(N);
  StopMetrics m;
  m.residual = sum.norm();
  for (std::size_t i = 0; i < N; ++i) {
    Eigen::Map<const Matrix> lam(x.data() + lay.lambda(i), lay.n1, lay.n2);
    m.dual_disagreement =
        std::max(m.dual_disagreement, (lam - mean_lambda).norm());
    const Vector rate = -p.k_w * x.segment(lay.w(i), lay.n2) +
                        lam.transpose() * p.v[i];
    m.primal_rate = std::max(m.primal_rate, rate.lpNorm<Eigen::Infinity>());
  }
  return m;
}

}  // namespace

AllocationResult allocate(const AllocationProblem& p) {
  const std::size_t N = p.v.size();
  if (N == 0) throw ValidationError("allocate: no agents");
  if (p.graph.agents() != N) {
    std::ostringstream os;
    os << "allocate: graph has " << p.graph.agents() << " agents, data has "
       << N;
    throw ValidationError(os.str());
  }
  const Eigen::Index n1 = p.target.rows();
  const Eigen::Index n2 = p.target.cols();
  for (const Vector& vi : p.v) {
    if (vi.size() != n1) {
      throw ValidationError("allocate: every v(i) must have length rows(M)");
    }
  }
  if (!(p.k_w > 0.0)) throw ValidationError("allocate: k_w must be positive");
  if (!(p.tolerance > 0.0)) {
    throw ValidationError("allocate: tolerance must be positive");
  }
  Matrix stacked(n1, static_cast<Eigen::Index>(N));
  for (std::size_t i = 0; i < N; ++i)
    stacked.col(static_cast<Eigen::Index>(i)) = p.v[i];
  if (stacked.cols() < n1 || singular_extremes(stacked).sigma_min <= 1e-10) {
    throw ValidationError(
        "allocate: stacked vectors v(i) do not have full row rank; the "
        "constraint is not solvable");
  }

  const Matrix L = laplacian(p.graph);
  const double lambda_max =
      N > 1 ? Eigen::SelfAdjointEigenSolver<Matrix>(L).eigenvalues().maxCoeff()
            : 0.0;
  double v_max = 0.0;
  for (const Vector& vi : p.v) v_max = std::max(v_max, vi.norm());
  const double step = std::min(p.max_step, 1.0 / (lambda_max + v_max + p.k_w));

  AllocationLayout lay{n1, n2};
  const double inv_n = 1.0 / static_cast<double>(N);

  OdeProblem ode;
  ode.dimension = lay.block() * static_cast<Eigen::Index>(N);
  ode.initial_state = Vector::Zero(ode.dimension);
  ode.step = step;
  ode.horizon = std::max(p.max_horizon, step);
  ode.rhs = [&](double, const Vector& x, Vector& dx) {
    for (std::size_t i = 0; i < N; ++i) {
      Eigen::Map<const Matrix> mu_i(x.data() + lay.mu(i), n1, n2);
      Eigen::Map<const Matrix> lam_i(x.data() + lay.lambda(i), n1, n2);
      auto w_i = x.segment(lay.w(i), n2);

      Eigen::Map<Matrix> dmu(dx.data() + lay.mu(i), n1, n2);
      Eigen::Map<Matrix> dlam(dx.data() + lay.lambda(i), n1, n2);
      dx.segment(lay.w(i), n2).noalias() =
          -p.k_w * w_i + lam_i.transpose() * p.v[i];
      dmu.setZero();
      dlam.noalias() = inv_n * p.target - p.v[i] * w_i.transpose();
      for (std::size_t j : p.graph.neighbors(i)) {
        Eigen::Map<const Matrix> mu_j(x.data() + lay.mu(j), n1, n2);
        Eigen::Map<const Matrix> lam_j(x.data() + lay.lambda(j), n1, n2);
        dmu -= lam_i - lam_j;
        dlam += mu_i - mu_j;
      }
    }
  };

  const auto total_steps = static_cast<std::size_t>(ode.horizon / step) + 1;
  const std::size_t stride =
      kCheckEvery * std::max<std::size_t>(1, total_steps / (2000 * kCheckEvery));

  AllocationResult result;
  result.step = step;
  StopMetrics last;
  bool converged = false;
  const Trajectory traj = integrate(
      ode,
      [&](std::size_t k, double t, const Vector& x) {
        if (k % kCheckEvery != 0 && k + 1 < total_steps) return true;
        last = measure(p, lay, x);
        if (k % stride == 0) result.residual_history.emplace_back(t, last.residual);
        converged = last.residual <= p.tolerance &&
                    last.dual_disagreement <= p.tolerance &&
                    last.primal_rate <= p.tolerance;
        result.steps = k;
        return !converged;
      },
      IntegrateOptions{0});

  result.time = traj.final_time();
  result.residual = last.residual;
  result.dual_disagreement = last.dual_disagreement;
  if (!converged) {
    std::vector<double> history;
    history.reserve(result.residual_history.size());
    for (const auto& [t, r] : result.residual_history) history.push_back(r);
    std::ostringstream os;
    os << "allocate: constraint residual " << last.residual
       << " (dual disagreement " << last.dual_disagreement
       << ") did not reach tolerance " << p.tolerance << " within horizon "
       << p.max_horizon;
    throw NumericalError(os.str(), std::move(history));
  }
  if (result.residual_history.empty() ||
      result.residual_history.back().first != result.time) {
    result.residual_history.emplace_back(result.time, result.residual);
  }
  const Vector& x = traj.final_state();
  result.w.reserve(N);
  for (std::size_t i = 0; i < N; ++i) result.w.push_back(x.segment(lay.w(i), n2));
  return result;
}

std::vector<Share> build_shares(const FragmentedDataset& ds,
                                const std::vector<Vector>& y,
                                const std::optional<Matrix>& input_matrix) {
  if (y.size() != ds.size()) {
    std::ostringstream os;
    os << "build_shares: " << y.size() << " vectors for " << ds.size()
       << " samples";
    throw ValidationError(os.str());
  }
  if (input_matrix &&
      (input_matrix->rows() != ds.n || input_matrix->cols() != ds.m)) {
    throw ValidationError("build_shares: input matrix has wrong dimensions");
  }
  std::vector<Share> shares;
  shares.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const DataSample& s = ds.samples[i];
    if (y[i].size() != ds.n || s.x.size() != ds.n || s.r.size() != ds.n) {
      throw ValidationError("build_shares: vector length mismatch");
    }
    Share share;
    share.agent = i;
    share.r = s.r;
    if (input_matrix && ds.m > 0) share.r -= *input_matrix * s.u;
    share.y = y[i];
    share.A = share.r * share.y.transpose();
    shares.push_back(std::move(share));
  }
  return shares;
}

std::vector<Matrix> share_matrices(const std::vector<Share>& shares) {
  std::vector<Matrix> out;
  out.reserve(shares.size());
  for (const Share& s : shares) out.push_back(s.A);
  return out;
}

Matrix sum_shares(const std::vector<Matrix>& shares) {
  if (shares.empty()) throw ValidationError("sum_shares: no shares");
  Matrix sum = Matrix::Zero(shares.front().rows(), shares.front().cols());
  for (const Matrix& a : shares) sum += a;
  return sum;
}

AllocationResult right_inverse_allocation(const FragmentedDataset& ds,
                                          const CommGraph& graph,
                                          const AllocationSettings& settings) {
  AllocationProblem p;
  for (const DataSample& s : ds.samples) p.v.push_back(s.x);
  p.target = Matrix::Identity(ds.n, ds.n);
  p.graph = graph;
  p.k_w = settings.k_w;
  p.tolerance = settings.tolerance;
  p.max_horizon = settings.max_horizon;
  p.max_step = settings.max_step;
  return allocate(p);
}

AllocationResult extended_allocation(const FragmentedDataset& ds,
                                     const CommGraph& graph,
                                     const AllocationSettings& settings) {
  if (ds.m == 0) return right_inverse_allocation(ds, graph, settings);
  AllocationProblem p;
  for (const DataSample& s : ds.samples) {
    Vector v(ds.n + ds.m);
    v << s.x, s.u;
    p.v.push_back(std::move(v));
  }
  p.target = Matrix::Zero(ds.n + ds.m, ds.n);
  p.target.topRows(ds.n).setIdentity();
  p.graph = graph;
  p.k_w = settings.k_w;
  p.tolerance = settings.tolerance;
  p.max_horizon = settings.max_horizon;
  p.max_step = settings.max_step;
  return allocate(p);
}

}  // namespace ddc
