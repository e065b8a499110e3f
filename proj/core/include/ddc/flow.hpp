#pragma once

// Result types shared by the Lyapunov and Riccati network flows.

#include <cstddef>
#include <optional>
#include <vector>

#include "ddc/numerics.hpp"

namespace ddc {

/// One sampled row of a flow: harness-side diagnostics for one agent.
/// Fields that do not apply to a run are left empty.
struct AgentRecord {
  double t = 0.0;
  std::size_t agent = 0;
  std::optional<double> rel_error;     // ||P_i - P*||_F / ||P*||_F
  std::optional<double> disagreement;  // ||P_i - mean_j P_j||_F
  std::optional<double> residual;      // equation residual of P_i
  std::optional<double> lyap_v;        // V(P_i, P*)
  std::optional<double> lyap_bound;    // V(0) exp(-2 t / rho)
};

struct FlowOptions {
  /// Reference solution used for rel_error and V; usually an oracle value.
  std::optional<Matrix> reference;
  /// Record the exponential decay bound next to V (centralized flows).
  bool decay_bound = false;
  /// Sampled rows per agent, spread uniformly in time. The first and the
  /// final state are always included.
  std::size_t max_records = 2000;
  /// Keep every k-th integrator state (and the final one); 0 keeps none.
  std::size_t keep_every = 0;
};

struct FlowSnapshot {
  double t = 0.0;
  std::vector<Matrix> P;
  std::vector<Matrix> Y;  // empty unless the flow has integral states
};

struct FlowResult {
  std::vector<Matrix> P;  // final per-agent states
  std::vector<Matrix> Y;  // final integral states (PI flows)
  double time = 0.0;
  std::size_t steps = 0;
  /// Integration steps used, in order of the chunks they applied to. Flows
  /// with a state-dependent step rule refresh it every 100 steps.
  std::vector<double> step_sizes;
  std::vector<AgentRecord> records;
  std::vector<FlowSnapshot> snapshots;

  /// Mean of the final P_i.
  Matrix consensus() const;
  /// max_i ||P_i - P*||_F / ||P*||_F at the final time.
  double max_rel_error(const Matrix& reference) const;
};

}  // namespace ddc
