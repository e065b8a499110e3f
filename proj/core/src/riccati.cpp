#include "ddc/riccati.hpp"

#include <cmath>
#include <sstream>

#include "ddc/errors.hpp"
#include "ddc/lyapunov.hpp"
#include "ddc/model.hpp"
#include "ddc/oracles.hpp"
#include "network_flow.hpp"

namespace ddc {

namespace {

double min_eigenvalue(const Matrix& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(symmetrize(m)).eigenvalues()(0);
}

void check_weights(const Matrix& B, const Matrix& Q, const Matrix& R) {
  require_positive_definite(Q, "Q");
  if (B.rows() != Q.rows()) {
    throw ValidationError("Riccati flow: B must have n rows");
  }
  if (B.cols() > 0) require_positive_definite(R, "R");
}

detail::NetworkFlowSpec riccati_spec(const RiccatiProblem& p,
                                     const char* name) {
  check_weights(p.B, p.Q, p.R);
  const Eigen::Index n = p.Q.rows();
  detail::NetworkFlowSpec spec;
  spec.shares = p.shares;
  spec.Q = p.Q;
  spec.D = input_weight(p.B, p.R);
  spec.graph = &p.graph;
  spec.gamma = p.gamma;
  spec.P0.assign(p.shares.size(), Matrix::Zero(n, n));
  spec.max_step = p.step;
  spec.horizon = p.horizon;
  spec.name = name;
  return spec;
}

}  // namespace

FlowResult dre_centralized(const Matrix& A, const Matrix& B, const Matrix& Q,
                           const Matrix& R, const Matrix& P0, double step,
                           double horizon, const FlowOptions& options) {
  check_weights(B, Q, R);
  if (P0.rows() != Q.rows() || P0.cols() != Q.cols()) {
    throw ValidationError("dre_centralized: P0 must be n x n");
  }
  if ((P0 - P0.transpose()).norm() > 1e-12 * std::max(1.0, P0.norm()) ||
      min_eigenvalue(P0) < -1e-12 * std::max(1.0, P0.norm())) {
    throw ValidationError(
        "dre_centralized: P0 must be symmetric positive semidefinite");
  }
  const CommGraph single(1, {});
  detail::NetworkFlowSpec spec;
  spec.shares = {A};
  spec.Q = Q;
  spec.D = input_weight(B, R);
  spec.graph = &single;
  spec.P0 = {P0};
  spec.max_step = step;
  spec.horizon = horizon;
  spec.name = "dre_centralized";
  FlowResult r = detail::run_network_flow(spec, options);
  const double lmin = min_eigenvalue(r.P.front());
  if (lmin < -1e-8) {
    std::ostringstream os;
    os << "dre_centralized: final state left the positive semidefinite cone "
          "(smallest eigenvalue "
       << lmin << ")";
    throw NumericalError(os.str());
  }
  return r;
}

FlowResult dist_dre_coupled(const RiccatiProblem& p,
                            const FlowOptions& options) {
  return detail::run_network_flow(riccati_spec(p, "dist_dre_coupled"),
                                  options);
}

RiccatiPiResult dist_dre_pi(const RiccatiProblem& p,
                            const FlowOptions& options, double tolerance) {
  detail::NetworkFlowSpec spec = riccati_spec(p, "dist_dre_pi");
  spec.integral = true;
  spec.Y0 = spec.P0;

  RiccatiPiResult out;
  out.flow = detail::run_network_flow(spec, options);
  RiccatiCertificate& cert = out.certificate;
  cert.tolerance = tolerance;
  cert.P = symmetrize(out.flow.consensus());
  Matrix A = Matrix::Zero(p.Q.rows(), p.Q.cols());
  for (const Matrix& a : p.shares) A += a;
  cert.are_residual = riccati_residual(A, spec.D, p.Q, cert.P);
  if (p.B.cols() > 0) {
    cert.K = -Eigen::LLT<Matrix>(p.R).solve(p.B.transpose() * cert.P);
    cert.closed_loop_abscissa = spectral_abscissa(A + p.B * cert.K);
  } else {
    cert.K = Matrix::Zero(0, p.Q.rows());
    cert.closed_loop_abscissa = spectral_abscissa(A);
  }
  const Matrix& ref = options.reference ? *options.reference : cert.P;
  for (const Matrix& Pi : out.flow.P) {
    cert.final_rel_errors.push_back((Pi - ref).norm() / ref.norm());
  }

  std::vector<double> history;
  for (const AgentRecord& rec : out.flow.records) {
    if (rec.agent == 0 && rec.residual) history.push_back(*rec.residual);
  }
  if (!(cert.are_residual <= tolerance)) {
    std::ostringstream os;
    os << "dist_dre_pi: consensus ARE residual " << cert.are_residual
       << " above tolerance " << tolerance << " at t=" << out.flow.time;
    throw NumericalError(os.str(), std::move(history));
  }
  if (!(min_eigenvalue(cert.P) > 0.0) || !(cert.closed_loop_abscissa < 0.0)) {
    throw NumericalError(
        "dist_dre_pi: consensus solution is not the stabilizing one",
        std::move(history));
  }
  cert.rho = decay_constant(cert.P, p.Q);
  return out;
}

double decay_constant(const Matrix& P, const Matrix& Q) {
  require_positive_definite(P, "P*");
  require_positive_definite(Q, "Q");
  const Matrix root = Eigen::SelfAdjointEigenSolver<Matrix>(P).operatorSqrt();
  return norm2(root * Eigen::LLT<Matrix>(Q).solve(root));
}

RiccatiDecay riccati_V(const Matrix& P, const Matrix& P_star,
                       const Matrix& Q) {
  RiccatiDecay d;
  d.V = lyapunov_V(P, P_star);
  d.rho = decay_constant(P_star, Q);
  return d;
}

double riccati_bound(double V0, double t, double rho) {
  if (!(rho > 0.0)) throw ValidationError("riccati_bound: rho must be positive");
  return V0 * std::exp(-2.0 * t / rho);
}

Matrix phi_r(const Vector& v, const Matrix& D) {
  const Matrix V = mat(v);
  if (D.rows() != V.rows() || D.cols() != V.cols()) {
    throw ValidationError("phi_r: D must be n x n with n^2 = len(v)");
  }
  return kron(Matrix::Identity(V.rows(), V.rows()), V * D);
}

Matrix phi_l(const Vector& v, const Matrix& D) {
  const Matrix V = mat(v);
  if (D.rows() != V.rows() || D.cols() != V.cols()) {
    throw ValidationError("phi_l: D must be n x n with n^2 = len(v)");
  }
  return kron((D * V).transpose(), Matrix::Identity(V.rows(), V.rows()));
}

StructuredCoords structured_coords_dre(const std::vector<Matrix>& P,
                                       const std::vector<Matrix>& Y,
                                       const SpectralSplit& split,
                                       const std::vector<Matrix>& shares,
                                       double gamma, const Matrix& P_star) {
  return structured_coords_dle(P, Y, split, shares, gamma, P_star);
}

}  // namespace ddc
