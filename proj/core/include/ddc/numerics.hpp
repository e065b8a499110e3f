#pragma once

// Dense linear-algebra helpers and the fixed-step integrator shared by every
// flow in the library. Matrices are Eigen column-major, which makes vec()
// column stacking and keeps vec(ABC) = (C^T kron A) vec(B) exact.

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace ddc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Column-major stacking of m.
Vector vec(const Matrix& m);

/// Inverse of vec: reshapes v into an n x m matrix. Throws ValidationError if
/// v.size() != n * m.
Matrix mat(const Vector& v, Eigen::Index n, Eigen::Index m);

/// Square matricization, n inferred from v.size() = n^2.
Matrix mat(const Vector& v);

Matrix kron(const Matrix& a, const Matrix& b);

struct SingularExtremes {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

/// Smallest and largest singular value of a nonempty matrix. For a
/// rectangular matrix sigma_min is the min(rows, cols)-th singular value.
SingularExtremes singular_extremes(const Matrix& m);

/// Spectral (2-) norm.
double norm2(const Matrix& m);

/// (m + m^T) / 2.
Matrix symmetrize(const Matrix& m);

bool all_finite(const Matrix& m);

/// Right-hand side signature: writes dx/dt at (t, x) into dxdt. dxdt is
/// pre-sized to the problem dimension.
using OdeRhs = std::function<void(double t, const Vector& x, Vector& dxdt)>;

struct OdeProblem {
  Eigen::Index dimension = 0;
  OdeRhs rhs;
  Vector initial_state;
  double step = 0.0;
  double horizon = 0.0;
  /// Optional projection applied to the state after every accepted step
  /// (e.g. symmetrization of matrix states).
  std::function<void(Vector&)> project;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;

  bool empty() const { return times.empty(); }
  double final_time() const { return times.back(); }
  const Vector& final_state() const { return states.back(); }
};

/// Called after every accepted step with the step index (1-based; 0 for the
/// initial state), the time and the state. Returning false stops the
/// integration early; the stopping state is recorded.
using StepObserver =
    std::function<bool(std::size_t step, double t, const Vector& x)>;

struct IntegrateOptions {
  /// Store every k-th state in the returned trajectory; the initial and the
  /// final state are always stored. 0 stores only those two.
  std::size_t record_every = 1;
};

/// Classical fixed-step RK4 from t = 0 to p.horizon. The last step is
/// shortened so the final time equals the horizon exactly. Time points are
/// computed as k * step (not accumulated), so identical inputs give
/// bit-identical outputs. Throws NumericalError naming the step index when
/// the state becomes non-finite.
Trajectory integrate(const OdeProblem& p, const StepObserver& observer = {},
                     IntegrateOptions options = {});

}  // namespace ddc
