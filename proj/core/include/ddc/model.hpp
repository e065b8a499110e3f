#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ddc/numerics.hpp"

namespace ddc {

/// Ground-truth continuous-time system x' = A x + B u. Only the data generator
/// and the validation oracles look at it; agents never do.
struct LtiSystem {
  Matrix A;
  Matrix B;  // n x m, m may be 0 for autonomous systems

  LtiSystem() = default;
  LtiSystem(Matrix a, Matrix b);

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B.cols(); }
};

/// One measurement {x(t_i), r(t_i), u(t_i)} held by agent `index`. `d` is the
/// injected derivative noise (zero for clean data); it is kept for the
/// harness only.
struct DataSample {
  std::size_t index = 0;
  Vector x;
  Vector r;
  Vector u;
  Vector d;
};

struct FragmentedDataset {
  std::vector<DataSample> samples;
  Eigen::Index n = 0;
  Eigen::Index m = 0;

  std::size_t size() const { return samples.size(); }
  /// X0 = [x(t_1) ... x(t_N)].
  Matrix states() const;
  /// U0 = [u(t_1) ... u(t_N)] (m x N).
  Matrix inputs() const;
  /// [r(t_1) ... r(t_N)].
  Matrix derivatives() const;
  /// Delta_d = [d(t_1) ... d(t_N)].
  Matrix noise() const;
};

struct SamplingOptions {
  std::size_t agents = 0;
  std::uint64_t seed = 0;
  double state_scale = 1.0;
  double input_scale = 1.0;
  /// Spectral norm of the assembled noise matrix Delta_d (exact, not a bound).
  double noise_energy = 0.0;
  /// Require rank [X0; U0] = n + m instead of rank X0 = n.
  bool require_input_rank = false;
  /// Extra attempts after the first draw when the rank test fails.
  int max_resamples = 10;
};

/// Draws independent (x, u) points uniformly on the scaled unit box, computes
/// r = A x + B u pointwise and adds noise of exact energy
/// `noise_energy`. Throws ValidationError when the rank assumption cannot be
/// met after the allowed resamples.
FragmentedDataset sample_algebraic(const LtiSystem& sys,
                                   const SamplingOptions& options);

/// Copy of `clean` with r(t_i) += noise.col(i) and d(t_i) = noise.col(i).
/// Throws ValidationError unless noise is n x N.
FragmentedDataset add_noise(const FragmentedDataset& clean, const Matrix& noise);

struct RankCheck {
  bool satisfied = false;
  double sigma_min = 0.0;
};

/// sigma_min of X0 (or of [X0; U0] when with_inputs); satisfied iff the data
/// matrix has full row rank with sigma_min > 1e-10.
RankCheck check_rank(const FragmentedDataset& ds, bool with_inputs);

/// Largest real part among the eigenvalues of a square matrix.
double spectral_abscissa(const Matrix& a);

/// True iff every eigenvalue has real part < -1e-10.
bool hurwitz(const Matrix& a);

}  // namespace ddc
