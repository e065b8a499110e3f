#pragma once

// Certainty-equivalent LQR designs and their suboptimality certificates under
// an uncertain input matrix or noisy derivative data.

#include <cstdint>
#include <optional>
#include <vector>

#include "ddc/flow.hpp"
#include "ddc/graph.hpp"
#include "ddc/numerics.hpp"
#include "ddc/random.hpp"

namespace ddc {

/// True input matrix B0 + Delta_B with ||Delta_B||_2 = kappa <= epsilon.
struct UncertaintyModel {
  Matrix B0;
  double epsilon = 0.0;
  double kappa = 0.0;
  std::uint64_t seed = 0;
};

/// Gaussian direction rescaled to spectral norm 1.
Matrix draw_unit_perturbation(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// B0 + kappa Delta with Delta from draw_unit_perturbation. Throws
/// ValidationError when kappa > epsilon or kappa < 0.
Matrix realize_input_matrix(const UncertaintyModel& model, Rng& rng);

/// Settings for computing a nominal design with the integral Riccati flow.
struct DistributedDesign {
  CommGraph graph;
  double gamma = 500.0;
  double step = 1e-2;
  double horizon = 20.0;
  double tolerance = 1e-6;
  FlowOptions options;
};

struct NominalDesign {
  Matrix P;
  Matrix K;
  /// ||P - P_newton||_F / ||P_newton||_F; zero when the oracle produced P.
  double oracle_gap = 0.0;
  bool distributed = false;
  /// The integral Riccati flow run (empty for oracle designs).
  FlowResult flow;
};

/// Stabilizing solution of the ARE with A0 = sum_i A_i and input matrix B0,
/// K0 = -R^{-1} B0^T P0. With `flow` the solution comes from the integral
/// Riccati flow and is cross-checked against Newton-Kleinman (relative gap
/// above 1e-5 throws NumericalError); without it Newton-Kleinman is used
/// directly. Throws NumericalError when (A0, B0) is not stabilizable.
NominalDesign nominal_design(const std::vector<Matrix>& shares,
                             const Matrix& B0, const Matrix& Q,
                             const Matrix& R,
                             const DistributedDesign* flow = nullptr);

enum class CertificateKind { kUncertainB, kNoisyData };

struct RobustnessCertificate {
  CertificateKind kind = CertificateKind::kUncertainB;
  bool issued = false;
  double parameter = 0.0;  // epsilon or tau
  /// Largest admissible epsilon (or tau); certificates need parameter < it.
  double threshold = 0.0;
  double factor = 0.0;      // eta in (0, 1] or zeta >= 1
  double cost_bound = 0.0;  // tr(P0) / eta or zeta tr(P0)
  std::optional<double> realized_cost;
  Matrix P0;
  Matrix K0;
};

/// Certificate for ||Delta_B||_2 <= epsilon:
/// issued iff epsilon < sqrt(smin(Q) smin(R)) / (2 tr P0), with
/// eta = 1 - 2 epsilon tr P0 / sqrt(smin(Q) smin(R)).
RobustnessCertificate certify_uncertain_B(const Matrix& P0, const Matrix& K0,
                                          const Matrix& Q, const Matrix& R,
                                          double epsilon);

/// Certificate for derivative noise with ||Delta_d||_2 <= tau:
/// issued iff tau < smin(Q) smin(X0) / (2 tr P0), with
/// zeta = smin(Q) smin(X0) / (smin(Q) smin(X0) - 2 tau tr P0).
RobustnessCertificate certify_noisy(const Matrix& P0, const Matrix& K0,
                                    const Matrix& Q, const Matrix& X0,
                                    double tau);

/// LQR cost of u = K x on (A, B), or nothing when A + B K is not Hurwitz.
std::optional<double> realized_cost(const Matrix& A, const Matrix& B,
                                    const Matrix& K, const Matrix& Q,
                                    const Matrix& R);

}  // namespace ddc
