#include "ddc/model.hpp"

#include <sstream>

#include "ddc/errors.hpp"
#include "ddc/random.hpp"

namespace ddc {

namespace {

constexpr double kRankThreshold = 1e-10;

Matrix stack_columns(const std::vector<DataSample>& samples, Eigen::Index rows,
                     const Vector DataSample::*field) {
  Matrix out(rows, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Vector& v = samples[i].*field;
    if (v.size() == rows) {
      out.col(static_cast<Eigen::Index>(i)) = v;
    } else {
      out.col(static_cast<Eigen::Index>(i)).setZero();
    }
  }
  return out;
}

}  // namespace

LtiSystem::LtiSystem(Matrix a, Matrix b) : A(std::move(a)), B(std::move(b)) {
  if (A.rows() != A.cols()) {
    throw ValidationError("LtiSystem: A must be square");
  }
  if (B.size() == 0) B.resize(A.rows(), 0);
  if (B.rows() != A.rows()) {
    std::ostringstream os;
    os << "LtiSystem: B has " << B.rows() << " rows, A is " << A.rows() << "x"
       << A.cols();
    throw ValidationError(os.str());
  }
  if (!A.allFinite() || !B.allFinite()) {
    throw ValidationError("LtiSystem: non-finite entries");
  }
}

Matrix FragmentedDataset::states() const {
  return stack_columns(samples, n, &DataSample::x);
}
Matrix FragmentedDataset::inputs() const {
  return stack_columns(samples, m, &DataSample::u);
}
Matrix FragmentedDataset::derivatives() const {
  return stack_columns(samples, n, &DataSample::r);
}
Matrix FragmentedDataset::noise() const {
  return stack_columns(samples, n, &DataSample::d);
}

FragmentedDataset sample_algebraic(const LtiSystem& sys,
                                   const SamplingOptions& options) {
  const Eigen::Index n = sys.n();
  const Eigen::Index m = sys.m();
  const auto agents = static_cast<Eigen::Index>(options.agents);
  const Eigen::Index needed = options.require_input_rank ? n + m : n;
  if (agents < needed) {
    std::ostringstream os;
    os << "sample_algebraic: " << agents << " agents cannot satisfy the rank "
       << "assumption, need at least " << needed;
    throw ValidationError(os.str());
  }
  if (options.noise_energy < 0.0) {
    throw ValidationError("sample_algebraic: noise energy must be >= 0");
  }

  Rng rng(options.seed);
  double best_sigma = 0.0;
  for (int attempt = 0; attempt <= options.max_resamples; ++attempt) {
    const Matrix X = rng.uniform_matrix(n, agents, -1.0, 1.0) *
                     options.state_scale;
    const Matrix U = rng.uniform_matrix(m, agents, -1.0, 1.0) *
                     options.input_scale;
    Matrix noise = Matrix::Zero(n, agents);
    if (options.noise_energy > 0.0) {
      noise = rng.normal_matrix(n, agents);
      noise *= options.noise_energy / norm2(noise);
    }
    const Matrix R = sys.A * X + sys.B * U + noise;

    FragmentedDataset ds;
    ds.n = n;
    ds.m = m;
    ds.samples.reserve(options.agents);
    for (Eigen::Index i = 0; i < agents; ++i) {
      ds.samples.push_back(DataSample{static_cast<std::size_t>(i), X.col(i),
                                      R.col(i), U.col(i), noise.col(i)});
    }
    const RankCheck rank = check_rank(ds, options.require_input_rank);
    if (rank.satisfied) return ds;
    best_sigma = std::max(best_sigma, rank.sigma_min);
  }
  std::ostringstream os;
  os << "sample_algebraic: rank assumption on "
     << (options.require_input_rank ? "[X0; U0]" : "X0")
     << " not satisfied after " << options.max_resamples
     << " resamples (best sigma_min " << best_sigma << ")";
  throw ValidationError(os.str());
}

RankCheck check_rank(const FragmentedDataset& ds, bool with_inputs) {
  Matrix data = ds.states();
  if (with_inputs && ds.m > 0) {
    Matrix stacked(ds.n + ds.m, data.cols());
    stacked << data, ds.inputs();
    data = std::move(stacked);
  }
  if (data.size() == 0 || data.cols() < data.rows()) return {false, 0.0};
  const double sigma = singular_extremes(data).sigma_min;
  return {sigma > kRankThreshold, sigma};
}

double spectral_abscissa(const Matrix& a) {
  if (a.rows() != a.cols() || a.size() == 0) {
    throw ValidationError("spectral_abscissa: matrix must be square");
  }
  Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
  return es.eigenvalues().real().maxCoeff();
}

bool hurwitz(const Matrix& a) { return spectral_abscissa(a) < -1e-10; }

FragmentedDataset add_noise(const FragmentedDataset& clean,
                            const Matrix& noise) {
  if (noise.rows() != clean.n ||
      noise.cols() != static_cast<Eigen::Index>(clean.size())) {
    throw ValidationError("add_noise: noise must be n x N");
  }
  FragmentedDataset out = clean;
  for (std::size_t i = 0; i < out.size(); ++i) {
    DataSample& s = out.samples[i];
    const Vector d = noise.col(static_cast<Eigen::Index>(i));
    s.r = clean.samples[i].r - clean.samples[i].d + d;
    s.d = d;
  }
  return out;
}

}  // namespace ddc
