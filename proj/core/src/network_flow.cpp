#include "network_flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ddc/errors.hpp"
#include "ddc/oracles.hpp"

namespace ddc {

Matrix FlowResult::consensus() const {
  if (P.empty()) throw ValidationError("consensus: empty flow result");
  Matrix mean = Matrix::Zero(P.front().rows(), P.front().cols());
  for (const Matrix& p : P) mean += p;
  return mean / static_cast<double>(P.size());
}

double FlowResult::max_rel_error(const Matrix& reference) const {
  const double scale = reference.norm();
  double worst = 0.0;
  for (const Matrix& p : P) worst = std::max(worst, (p - reference).norm() / scale);
  return worst;
}

namespace detail {

namespace {

constexpr std::size_t kRefreshSteps = 100;
constexpr double kEscapeNorm = 1e12;

class Layout {
 public:
  Layout(std::size_t agents, Eigen::Index n, bool integral)
      : agents_(agents), n_(n), integral_(integral) {}

  Eigen::Index dimension() const {
    return static_cast<Eigen::Index>(agents_) * n_ * n_ * (integral_ ? 2 : 1);
  }
  Eigen::Index p(std::size_t i) const {
    return static_cast<Eigen::Index>(i) * n_ * n_;
  }
  Eigen::Index y(std::size_t i) const {
    return static_cast<Eigen::Index>(agents_ + i) * n_ * n_;
  }
  Eigen::Map<const Matrix> P(const Vector& x, std::size_t i) const {
    return {x.data() + p(i), n_, n_};
  }
  Eigen::Map<const Matrix> Y(const Vector& x, std::size_t i) const {
    return {x.data() + y(i), n_, n_};
  }
  Eigen::Map<Matrix> P(Vector& x, std::size_t i) const {
    return {x.data() + p(i), n_, n_};
  }
  Eigen::Map<Matrix> Y(Vector& x, std::size_t i) const {
    return {x.data() + y(i), n_, n_};
  }
  std::size_t agents() const { return agents_; }
  bool integral() const { return integral_; }

 private:
  std::size_t agents_;
  Eigen::Index n_;
  bool integral_;
};

void validate(const NetworkFlowSpec& s) {
  const std::string name = s.name;
  if (s.shares.empty()) throw ValidationError(name + ": no agents");
  if (s.graph == nullptr || s.graph->agents() != s.shares.size()) {
    throw ValidationError(name + ": graph size does not match the shares");
  }
  const Eigen::Index n = s.Q.rows();
  require_positive_definite(s.Q, "Q");
  for (const Matrix& a : s.shares) {
    if (a.rows() != n || a.cols() != n) {
      throw ValidationError(name + ": every share must be n x n with n = dim Q");
    }
  }
  if (s.D.size() > 0 && (s.D.rows() != n || s.D.cols() != n)) {
    throw ValidationError(name + ": D must be n x n");
  }
  if (s.shares.size() > 1 && !(s.gamma > 0.0)) {
    throw ValidationError(name + ": gamma must be positive");
  }
  if (!(s.max_step > 0.0) || !(s.horizon > 0.0)) {
    throw ValidationError(name + ": step and horizon must be positive");
  }
  if (s.P0.size() != s.shares.size()) {
    throw ValidationError(name + ": one initial P per agent required");
  }
  for (const Matrix& p : s.P0) {
    if (p.rows() != n || p.cols() != n || !all_finite(p)) {
      throw ValidationError(name + ": initial P must be finite n x n");
    }
  }
  if (s.integral) {
    if (s.Y0.size() != s.shares.size()) {
      throw ValidationError(name + ": one initial Y per agent required");
    }
    for (const Matrix& y : s.Y0) {
      if (y.rows() != n || y.cols() != n || !all_finite(y)) {
        throw ValidationError(name + ": initial Y must be finite n x n");
      }
    }
  }
}

}  // namespace

double step_rule(const NetworkFlowSpec& spec, double lambda_max,
                 double max_p_norm) {
  const double N = static_cast<double>(spec.shares.size());
  double a_max = 0.0;
  for (const Matrix& a : spec.shares) a_max = std::max(a_max, norm2(a));
  double rate = N * a_max + spec.gamma * lambda_max;
  if (spec.D.size() > 0) rate += 2.0 * norm2(spec.D) * max_p_norm;
  if (!(rate > 0.0)) return spec.max_step;
  return std::min(spec.max_step, 0.5 / rate);
}

FlowResult run_network_flow(const NetworkFlowSpec& spec,
                            const FlowOptions& options) {
  validate(spec);
  const std::size_t N = spec.shares.size();
  const Eigen::Index n = spec.Q.rows();
  const Layout lay(N, n, spec.integral);
  const bool riccati = spec.D.size() > 0 && spec.D.norm() > 0.0;
  const double gamma = N > 1 ? spec.gamma : 0.0;

  double lambda_max = 0.0;
  if (N > 1) {
    lambda_max = Eigen::SelfAdjointEigenSolver<Matrix>(laplacian(*spec.graph))
                     .eigenvalues()
                     .maxCoeff();
  }

  std::vector<Matrix> scaled;
  scaled.reserve(N);
  for (const Matrix& a : spec.shares) scaled.push_back(static_cast<double>(N) * a);
  Matrix A_sum = Matrix::Zero(n, n);
  for (const Matrix& a : spec.shares) A_sum += a;

  // D = G G^T so that P D P = (P G)(P G)^T.
  Matrix G;
  if (riccati) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(spec.D));
    const Vector& ev = eig.eigenvalues();
    const double cut = 1e-14 * ev.cwiseAbs().maxCoeff();
    Eigen::Index first = 0;
    while (first < n && ev(first) <= cut) ++first;
    G = eig.eigenvectors().rightCols(n - first) *
        ev.tail(n - first).cwiseSqrt().asDiagonal();
  }

  // Reference-derived diagnostics.
  std::optional<Matrix> ref_inv;
  double ref_norm = 0.0;
  double rho = 0.0;
  if (options.reference) {
    const Matrix& ref = *options.reference;
    if (ref.rows() != n || ref.cols() != n) {
      throw ValidationError(std::string(spec.name) +
                            ": reference has wrong dimensions");
    }
    require_positive_definite(ref, "reference solution");
    ref_inv = Eigen::LLT<Matrix>(ref).solve(Matrix::Identity(n, n));
    ref_norm = ref.norm();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(ref);
    const Matrix root = eig.operatorSqrt();
    rho = norm2(root * Eigen::LLT<Matrix>(spec.Q).solve(root));
  }
  auto lyap_v = [&](const Matrix& P) {
    const Matrix m = *ref_inv * (P - *options.reference);
    return (m * m).trace();
  };

  Vector x(lay.dimension());
  for (std::size_t i = 0; i < N; ++i) {
    lay.P(x, i) = symmetrize(spec.P0[i]);
    if (spec.integral) lay.Y(x, i) = spec.Y0[i];
  }

  // Work buffers reused by every right-hand-side evaluation.
  Matrix T(n, n), PG(n, G.cols()), acc(n, n);
  OdeProblem ode;
  ode.dimension = lay.dimension();
  ode.rhs = [&](double, const Vector& s, Vector& ds) {
    for (std::size_t i = 0; i < N; ++i) {
      const auto Pi = lay.P(s, i);
      auto dPi = lay.P(ds, i);
      T.noalias() = Pi * scaled[i];
      dPi = T + T.transpose() + spec.Q;
      if (riccati) {
        PG.noalias() = Pi * G;
        T.noalias() = PG * PG.transpose();
        dPi -= 0.5 * (T + T.transpose());
      }
      if (gamma > 0.0) {
        acc.setZero();
        for (std::size_t j : spec.graph->neighbors(i)) acc += lay.P(s, j) - Pi;
        dPi += gamma * acc;
        if (spec.integral) {
          lay.Y(ds, i) = -gamma * acc;
          acc.setZero();
          const auto Yi = lay.Y(s, i);
          for (std::size_t j : spec.graph->neighbors(i)) acc += lay.Y(s, j) - Yi;
          dPi += gamma * acc;
        }
      } else if (spec.integral) {
        lay.Y(ds, i).setZero();
      }
    }
  };
  auto symmetrize_in_place = [n](Eigen::Map<Matrix> m) {
    for (Eigen::Index c = 0; c < n; ++c) {
      for (Eigen::Index r = c + 1; r < n; ++r) {
        const double v = 0.5 * (m(r, c) + m(c, r));
        m(r, c) = v;
        m(c, r) = v;
      }
    }
  };
  ode.project = [&](Vector& s) {
    for (std::size_t i = 0; i < N; ++i) {
      symmetrize_in_place(lay.P(s, i));
      if (spec.integral) symmetrize_in_place(lay.Y(s, i));
    }
  };

  FlowResult result;
  const std::size_t intervals =
      options.max_records > 2 ? options.max_records - 2 : 1;
  const double record_dt = spec.horizon / static_cast<double>(intervals);
  double next_record = 0.0;
  std::vector<double> v0(N, 0.0);
  std::vector<double> escape_history;

  auto record = [&](double t, const Vector& s) {
    Matrix mean = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < N; ++i) mean += lay.P(s, i);
    mean /= static_cast<double>(N);
    for (std::size_t i = 0; i < N; ++i) {
      const Matrix Pi = lay.P(s, i);
      AgentRecord r;
      r.t = t;
      r.agent = i;
      if (N > 1) r.disagreement = (Pi - mean).norm();
      r.residual = riccati_residual(A_sum, spec.D, spec.Q, Pi);
      if (options.reference) {
        r.rel_error = (Pi - *options.reference).norm() / ref_norm;
        r.lyap_v = lyap_v(Pi);
        if (options.decay_bound) {
          if (t == 0.0) v0[i] = *r.lyap_v;
          r.lyap_bound = v0[i] * std::exp(-2.0 * t / rho);
        }
      }
      result.records.push_back(r);
    }
  };
  auto snapshot = [&](double t, const Vector& s) {
    FlowSnapshot snap;
    snap.t = t;
    for (std::size_t i = 0; i < N; ++i) {
      snap.P.push_back(lay.P(s, i));
      if (spec.integral) snap.Y.push_back(lay.Y(s, i));
    }
    result.snapshots.push_back(std::move(snap));
  };

  double t0 = 0.0;
  bool escaped = false;
  std::size_t base = 0;
  bool first_chunk = true;
  while (true) {
    double max_p = 0.0;
    for (std::size_t i = 0; i < N; ++i) max_p = std::max(max_p, norm2(lay.P(x, i)));
    double h = step_rule(spec, lambda_max, max_p);
    const double remaining = spec.horizon - t0;
    double span = remaining;
    if (riccati) span = std::min(remaining, static_cast<double>(kRefreshSteps) * h);
    const bool last_chunk = span >= remaining;
    h = std::min(h, span);
    result.step_sizes.push_back(h);

    ode.initial_state = x;
    ode.step = h;
    ode.horizon = span;
    std::size_t chunk_steps = 0;
    auto observer = [&](std::size_t k, double t, const Vector& s) {
      if (k == 0 && !first_chunk) return true;
      const bool final_state = last_chunk && t == span;
      const double tg = final_state ? spec.horizon : t0 + t;
      const std::size_t kg = base + k;
      chunk_steps = k;
      double worst = 0.0;
      for (std::size_t i = 0; i < N; ++i) worst = std::max(worst, lay.P(s, i).norm());
      if (!(worst <= kEscapeNorm)) {
        escaped = true;
        std::ostringstream os;
        os << spec.name << ": finite escape at step " << kg << " (t=" << tg
           << ", max ||P_i||_F=" << worst << ")";
        throw NumericalError(os.str(), escape_history);
      }
      if (tg >= next_record || final_state) {
        record(tg, s);
        escape_history.push_back(worst);
        next_record =
            (std::floor(tg / record_dt + 1e-9) + 1.0) * record_dt;
      }
      if (options.keep_every > 0 &&
          (kg % options.keep_every == 0 || final_state)) {
        snapshot(tg, s);
      }
      return true;
    };
    try {
      x = integrate(ode, observer, IntegrateOptions{0}).final_state();
    } catch (const NumericalError& e) {
      if (escaped) throw;
      std::ostringstream os;
      os << spec.name << ": " << e.what() << " (chunk starting at t=" << t0
         << ", step " << h << ")";
      throw NumericalError(os.str(), escape_history);
    }
    base += chunk_steps;
    first_chunk = false;
    if (last_chunk) break;
    t0 += span;
  }

  result.time = spec.horizon;
  result.steps = base;
  for (std::size_t i = 0; i < N; ++i) {
    result.P.push_back(lay.P(x, i));
    if (spec.integral) result.Y.push_back(lay.Y(x, i));
  }
  return result;
}

}  // namespace detail
}  // namespace ddc
