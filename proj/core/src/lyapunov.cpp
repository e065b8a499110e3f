#include "ddc/lyapunov.hpp"

#include <algorithm>
#include <sstream>

#include "ddc/errors.hpp"
#include "ddc/oracles.hpp"
#include "network_flow.hpp"

namespace ddc {

namespace {

std::vector<double> residual_history(const FlowResult& r) {
  std::vector<double> h;
  for (const AgentRecord& rec : r.records) {
    if (rec.agent == 0 && rec.residual) h.push_back(*rec.residual);
  }
  return h;
}

}  // namespace

FlowResult dle_centralized(const Matrix& A, const Matrix& Q, const Matrix& P0,
                           double step, double horizon,
                           const FlowOptions& options) {
  const CommGraph single(1, {});
  detail::NetworkFlowSpec spec;
  spec.shares = {A};
  spec.Q = Q;
  spec.graph = &single;
  spec.P0 = {P0};
  spec.max_step = step;
  spec.horizon = horizon;
  spec.name = "dle_centralized";
  return detail::run_network_flow(spec, options);
}

FlowResult dist_dle_coupled(const LyapunovProblem& p,
                            const std::vector<Matrix>& P0,
                            const FlowOptions& options) {
  detail::NetworkFlowSpec spec;
  spec.shares = p.shares;
  spec.Q = p.Q;
  spec.graph = &p.graph;
  spec.gamma = p.gamma;
  spec.P0 = P0;
  spec.max_step = p.step;
  spec.horizon = p.horizon;
  spec.name = "dist_dle_coupled";
  return detail::run_network_flow(spec, options);
}

LyapunovPiResult dist_dle_pi(const LyapunovProblem& p,
                             const std::vector<Matrix>& P0,
                             const std::vector<Matrix>& Y0,
                             const FlowOptions& options, double tolerance) {
  detail::NetworkFlowSpec spec;
  spec.shares = p.shares;
  spec.Q = p.Q;
  spec.graph = &p.graph;
  spec.gamma = p.gamma;
  spec.integral = true;
  spec.P0 = P0;
  spec.Y0 = Y0;
  spec.max_step = p.step;
  spec.horizon = p.horizon;
  spec.name = "dist_dle_pi";

  LyapunovPiResult out;
  out.flow = detail::run_network_flow(spec, options);
  LyapunovCertificate& cert = out.certificate;
  cert.P = symmetrize(out.flow.consensus());
  cert.tolerance = tolerance;
  Matrix A = Matrix::Zero(p.Q.rows(), p.Q.cols());
  for (const Matrix& a : p.shares) A += a;
  cert.residual = lyapunov_residual(A, p.Q, cert.P);
  const Matrix& ref = options.reference ? *options.reference : cert.P;
  for (const Matrix& Pi : out.flow.P) {
    cert.final_rel_errors.push_back((Pi - ref).norm() / ref.norm());
  }
  if (!(cert.residual <= tolerance)) {
    std::ostringstream os;
    os << "dist_dle_pi: consensus residual " << cert.residual
       << " above tolerance " << tolerance << " at t=" << out.flow.time;
    throw NumericalError(os.str(), residual_history(out.flow));
  }
  if (Eigen::SelfAdjointEigenSolver<Matrix>(cert.P).eigenvalues()(0) <= 0.0) {
    throw NumericalError("dist_dle_pi: consensus solution is not positive "
                         "definite",
                         residual_history(out.flow));
  }
  return out;
}

double lyapunov_V(const Matrix& P, const Matrix& P_star) {
  require_positive_definite(P_star, "P*");
  if (P.rows() != P_star.rows() || P.cols() != P_star.cols()) {
    throw ValidationError("lyapunov_V: P and P* differ in size");
  }
  const Matrix m = Eigen::LLT<Matrix>(P_star).solve(P - P_star);
  return (m * m).trace();
}

double gamma_bound_dle(const std::vector<Matrix>& shares,
                       const CommGraph& graph, const Matrix& Q,
                       const Matrix& P_star) {
  require_positive_definite(Q, "Q");
  require_positive_definite(P_star, "P*");
  const SpectralSplit split = spectral_split(laplacian(graph));
  const StructuredBlocks b = structured_blocks(shares, split);
  const Eigen::Index n = P_star.rows();
  const Matrix S = Eigen::LLT<Matrix>(P_star).solve(Matrix::Identity(n, n));
  const Matrix Pbar = kron(S, S);
  const Matrix Qbar = symmetrize(-(b.A_bar.transpose() * Pbar + Pbar * b.A_bar));
  Eigen::LLT<Matrix> q_llt(Qbar);
  if (q_llt.info() != Eigen::Success) {
    throw NumericalError("gamma_bound_dle: sum of shares is not Hurwitz with "
                         "the given P*");
  }
  const Matrix M = b.A12.transpose() * Pbar + b.A21;
  Matrix rhs = b.A22 + b.A22.transpose() + M * q_llt.solve(M.transpose());
  const Vector scale = b.lambda.cwiseSqrt().cwiseInverse();
  rhs = scale.asDiagonal() * rhs * scale.asDiagonal();
  const double top =
      Eigen::SelfAdjointEigenSolver<Matrix>(symmetrize(rhs)).eigenvalues().maxCoeff();
  return std::max(0.0, 0.5 * top);
}

StructuredCoords structured_coords_dle(const std::vector<Matrix>& P,
                                       const std::vector<Matrix>& Y,
                                       const SpectralSplit& split,
                                       const std::vector<Matrix>& shares,
                                       double gamma, const Matrix& P_star) {
  const StructuredBlocks b = structured_blocks(shares, split);
  return structured_coords(P, Y, split, b, gamma, P_star);
}

}  // namespace ddc
