#include "ddc/robustness.hpp"

#include <cmath>
#include <sstream>

#include "ddc/errors.hpp"
#include "ddc/model.hpp"
#include "ddc/oracles.hpp"
#include "ddc/riccati.hpp"

namespace ddc {

Matrix draw_unit_perturbation(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  if (rows == 0 || cols == 0) return Matrix::Zero(rows, cols);
  Matrix delta = rng.normal_matrix(rows, cols);
  double s = norm2(delta);
  while (!(s > 0.0)) {
    delta = rng.normal_matrix(rows, cols);
    s = norm2(delta);
  }
  return delta / s;
}

Matrix realize_input_matrix(const UncertaintyModel& model, Rng& rng) {
  if (!(model.kappa >= 0.0) || model.kappa > model.epsilon) {
    std::ostringstream os;
    os << "uncertainty: kappa " << model.kappa << " must lie in [0, epsilon="
       << model.epsilon << "]";
    throw ValidationError(os.str());
  }
  return model.B0 +
         model.kappa *
             draw_unit_perturbation(model.B0.rows(), model.B0.cols(), rng);
}

NominalDesign nominal_design(const std::vector<Matrix>& shares,
                             const Matrix& B0, const Matrix& Q,
                             const Matrix& R, const DistributedDesign* flow) {
  if (shares.empty()) throw ValidationError("nominal_design: no shares");
  Matrix A0 = Matrix::Zero(shares.front().rows(), shares.front().cols());
  for (const Matrix& a : shares) A0 += a;
  const AreSolution oracle = solve_are_newton(A0, B0, Q, R);

  NominalDesign d;
  if (flow == nullptr) {
    d.P = oracle.P;
    d.K = oracle.K;
    return d;
  }
  RiccatiProblem p;
  p.shares = shares;
  p.B = B0;
  p.Q = Q;
  p.R = R;
  p.graph = flow->graph;
  p.gamma = flow->gamma;
  p.step = flow->step;
  p.horizon = flow->horizon;
  RiccatiPiResult run = dist_dre_pi(p, flow->options, flow->tolerance);
  d.P = run.certificate.P;
  d.K = run.certificate.K;
  d.distributed = true;
  d.flow = std::move(run.flow);
  d.oracle_gap = (d.P - oracle.P).norm() / oracle.P.norm();
  if (!(d.oracle_gap <= 1e-5)) {
    std::ostringstream os;
    os << "nominal_design: distributed solution differs from the oracle by "
       << d.oracle_gap << " (relative)";
    throw NumericalError(os.str());
  }
  return d;
}

RobustnessCertificate certify_uncertain_B(const Matrix& P0, const Matrix& K0,
                                          const Matrix& Q, const Matrix& R,
                                          double epsilon) {
  require_positive_definite(P0, "P0");
  if (!(epsilon >= 0.0)) {
    throw ValidationError("certify_uncertain_B: epsilon must be >= 0");
  }
  const double root = std::sqrt(singular_extremes(Q).sigma_min *
                                singular_extremes(R).sigma_min);
  const double tr = P0.trace();
  RobustnessCertificate c;
  c.kind = CertificateKind::kUncertainB;
  c.parameter = epsilon;
  c.threshold = root / (2.0 * tr);
  c.P0 = P0;
  c.K0 = K0;
  if (epsilon < c.threshold) {
    c.issued = true;
    c.factor = 1.0 - 2.0 * epsilon * tr / root;
    c.cost_bound = tr / c.factor;
  }
  return c;
}

RobustnessCertificate certify_noisy(const Matrix& P0, const Matrix& K0,
                                    const Matrix& Q, const Matrix& X0,
                                    double tau) {
  require_positive_definite(P0, "P0");
  if (!(tau >= 0.0)) throw ValidationError("certify_noisy: tau must be >= 0");
  if (X0.rows() != P0.rows() || X0.cols() < X0.rows()) {
    throw ValidationError("certify_noisy: X0 must be n x N with N >= n");
  }
  const double sx = singular_extremes(X0).sigma_min;
  if (!(sx > 1e-10)) {
    throw ValidationError("certify_noisy: X0 does not have full row rank");
  }
  const double scale = singular_extremes(Q).sigma_min * sx;
  const double tr = P0.trace();
  RobustnessCertificate c;
  c.kind = CertificateKind::kNoisyData;
  c.parameter = tau;
  c.threshold = scale / (2.0 * tr);
  c.P0 = P0;
  c.K0 = K0;
  if (tau < c.threshold) {
    c.issued = true;
    c.factor = scale / (scale - 2.0 * tau * tr);
    c.cost_bound = c.factor * tr;
  }
  return c;
}

std::optional<double> realized_cost(const Matrix& A, const Matrix& B,
                                    const Matrix& K, const Matrix& Q,
                                    const Matrix& R) {
  const Matrix Acl = B.cols() > 0 ? Matrix(A + B * K) : A;
  if (!hurwitz(Acl)) return std::nullopt;
  return lqr_cost(A, B, K, Q, R);
}

}  // namespace ddc
