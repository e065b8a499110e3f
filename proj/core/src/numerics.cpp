#include "ddc/numerics.hpp"

#include <cmath>
#include <sstream>

#include "ddc/errors.hpp"

namespace ddc {

Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix mat(const Vector& v, Eigen::Index n, Eigen::Index m) {
  if (n < 0 || m < 0 || v.size() != n * m) {
    std::ostringstream os;
    os << "mat: vector of length " << v.size() << " cannot be reshaped to "
       << n << "x" << m;
    throw ValidationError(os.str());
  }
  return Eigen::Map<const Matrix>(v.data(), n, m);
}

Matrix mat(const Vector& v) {
  const auto n = static_cast<Eigen::Index>(
      std::llround(std::sqrt(static_cast<double>(v.size()))));
  return mat(v, n, n);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

SingularExtremes singular_extremes(const Matrix& m) {
  if (m.size() == 0) {
    throw ValidationError("singular_extremes: empty matrix");
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  return {s.minCoeff(), s.maxCoeff()};
}

double norm2(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_extremes(m).sigma_max;
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

bool all_finite(const Matrix& m) { return m.allFinite(); }

Trajectory integrate(const OdeProblem& p, const StepObserver& observer,
                     IntegrateOptions options) {
  if (!(p.step > 0.0) || !std::isfinite(p.step)) {
    throw ValidationError("integrate: step must be positive");
  }
  if (!(p.horizon >= p.step)) {
    throw ValidationError("integrate: horizon must be at least one step");
  }
  if (p.initial_state.size() != p.dimension) {
    std::ostringstream os;
    os << "integrate: initial state has length " << p.initial_state.size()
       << ", dimension is " << p.dimension;
    throw ValidationError(os.str());
  }
  if (!p.rhs) throw ValidationError("integrate: missing right-hand side");

  const Eigen::Index dim = p.dimension;
  Vector x = p.initial_state;
  Vector k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);

  // Number of steps such that (steps - 1) * step < horizon <= steps * step.
  auto steps = static_cast<std::size_t>(std::ceil(p.horizon / p.step));
  if (steps == 0) steps = 1;
  if (static_cast<double>(steps - 1) * p.step >= p.horizon) --steps;

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x);
  if (observer && !observer(0, 0.0, x)) return traj;

  double t = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t_next =
        (k == steps) ? p.horizon : static_cast<double>(k) * p.step;
    const double h = t_next - t;

    p.rhs(t, x, k1);
    tmp.noalias() = x + 0.5 * h * k1;
    p.rhs(t + 0.5 * h, tmp, k2);
    tmp.noalias() = x + 0.5 * h * k2;
    p.rhs(t + 0.5 * h, tmp, k3);
    tmp.noalias() = x + h * k3;
    p.rhs(t_next, tmp, k4);
    x.noalias() += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (p.project) p.project(x);
    t = t_next;

    if (!x.allFinite()) {
      std::ostringstream os;
      os << "integrate: non-finite state at step " << k << " (t=" << t
         << "); the flow is unstable or the step is too large";
      throw NumericalError(os.str());
    }

    const bool keep_going = !observer || observer(k, t, x);
    const bool last = (k == steps) || !keep_going;
    if (last || (options.record_every > 0 && k % options.record_every == 0)) {
      traj.times.push_back(t);
      traj.states.push_back(x);
    }
    if (!keep_going) break;
  }
  return traj;
}

}  // namespace ddc
