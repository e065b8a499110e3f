#include "ddc/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>

#include "ddc/emit.hpp"
#include "ddc/errors.hpp"
#include "ddc/lyapunov.hpp"
#include "ddc/model.hpp"
#include "ddc/oracles.hpp"
#include "ddc/random.hpp"
#include "ddc/riccati.hpp"
#include "ddc/robustness.hpp"
#include "ddc/splitting.hpp"

namespace ddc::experiment {

namespace {

using ordered_json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

// Independent random streams derived from the configured seed.
constexpr std::uint64_t kDataStream = 0;
constexpr std::uint64_t kInputMatrixStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kMonteCarloStream = 3;

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ordered_json matrix_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json optional_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string csv_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

struct DataStage {
  FragmentedDataset data;
  CommGraph flow_graph;
  CommGraph allocation_graph;
  AllocationResult allocation;
  std::vector<Matrix> shares;
};

SamplingOptions sampling_options(const ExperimentConfig& c, bool with_inputs) {
  SamplingOptions so;
  so.agents = c.agents;
  so.seed = stream_seed(c.seed, kDataStream);
  so.state_scale = c.state_scale;
  so.input_scale = c.input_scale;
  so.require_input_rank = with_inputs;
  return so;
}

/// Samples `truth`, allocates and builds shares. With `known_B` the shares
/// use r - B u; without it the extended allocation is used.
DataStage prepare(const ExperimentConfig& c, const LtiSystem& truth,
                  const std::optional<Matrix>& known_B, RunOutput& out) {
  DataStage s;
  const auto t0 = Clock::now();
  s.data = sample_algebraic(truth, sampling_options(c, !known_B.has_value()));
  s.flow_graph = make_graph(c.graph, c.agents);
  s.allocation_graph = make_graph(c.allocation_graph.value_or(c.graph), c.agents);
  s.allocation = known_B ? right_inverse_allocation(s.data, s.allocation_graph,
                                                    c.allocation)
                         : extended_allocation(s.data, s.allocation_graph,
                                               c.allocation);
  s.shares = share_matrices(build_shares(s.data, s.allocation.w, known_B));
  out.timings.emplace_back("allocation", seconds_since(t0));

  const RankCheck rank = check_rank(s.data, !known_B.has_value());
  out.data = {{"samples", s.data.size()},
              {"sigma_min", rank.sigma_min},
              {"input_rank_required", !known_B.has_value()}};
  const Matrix A_sum = sum_shares(s.shares);
  out.allocation = {{"mode", known_B ? "right-inverse" : "extended"},
                    {"residual", s.allocation.residual},
                    {"dual_disagreement", s.allocation.dual_disagreement},
                    {"time", s.allocation.time},
                    {"steps", s.allocation.steps},
                    {"step", s.allocation.step},
                    {"share_sum_error", (A_sum - truth.A).norm()}};
  return s;
}

FlowOptions flow_options(const Matrix& reference) {
  FlowOptions o;
  o.reference = reference;
  return o;
}

std::vector<double> rel_errors(const FlowResult& flow, const Matrix& ref) {
  std::vector<double> e;
  for (const Matrix& P : flow.P) e.push_back((P - ref).norm() / ref.norm());
  return e;
}

ordered_json flow_json(const FlowResult& flow) {
  return {{"time", flow.time},
          {"steps", flow.steps},
          {"final_step", flow.step_sizes.empty() ? 0.0 : flow.step_sizes.back()}};
}

// ---------------------------------------------------------------- split

RunOutput run_split(const ExperimentConfig& c) {
  RunOutput out;
  DataStage s = prepare(c, c.system, c.system.B, out);
  const Matrix X0 = s.data.states();
  // Minimum-norm right inverse of X0, row i belongs to agent i.
  const Matrix Y = X0.transpose() * (X0 * X0.transpose()).inverse();
  double gap = 0.0;
  for (std::size_t i = 0; i < c.agents; ++i) {
    gap = std::max(gap,
                   (s.allocation.w[i] - Y.row(static_cast<Eigen::Index>(i))
                                            .transpose())
                       .norm());
  }
  out.results = {{"min_norm_gap", gap},
                 {"share_sum_error", out.allocation["share_sum_error"]},
                 {"residual", s.allocation.residual}};

  const auto& hist = s.allocation.residual_history;
  const std::size_t stride = std::max<std::size_t>(1, (hist.size() + 1998) / 1999);
  for (std::size_t k = 0; k < hist.size(); ++k) {
    if (k % stride != 0 && k + 1 != hist.size()) continue;
    AgentRecord r;
    r.t = hist[k].first;
    r.agent = 0;
    r.residual = hist[k].second;
    out.records.push_back(r);
  }
  out.agents = 1;
  out.plot_residual = true;
  out.plot_title = "Share allocation residual";
  return out;
}

// ------------------------------------------------------------ lyapunov

RunOutput run_lyapunov(const ExperimentConfig& c, bool integral) {
  RunOutput out;
  DataStage s = prepare(c, c.system, c.system.B, out);
  const Eigen::Index n = c.system.n();
  const Matrix P_star = solve_lyapunov_direct(c.system.A, c.Q);

  LyapunovProblem p{s.shares, c.Q, s.flow_graph, c.gammas.front(), c.step,
                    c.horizon};
  const std::vector<Matrix> zeros(c.agents, Matrix::Zero(n, n));
  const auto t0 = Clock::now();
  FlowResult flow;
  ordered_json extra;
  if (integral) {
    LyapunovPiResult r =
        dist_dle_pi(p, zeros, zeros, flow_options(P_star), c.tolerance);
    extra["residual"] = r.certificate.residual;
    extra["tolerance"] = r.certificate.tolerance;
    extra["gamma_bound"] =
        gamma_bound_dle(s.shares, s.flow_graph, c.Q, P_star);
    extra["P"] = matrix_json(r.certificate.P);
    flow = std::move(r.flow);
  } else {
    flow = dist_dle_coupled(p, zeros, flow_options(P_star));
    extra["residual"] =
        lyapunov_residual(sum_shares(s.shares), c.Q, flow.consensus());
  }
  out.timings.emplace_back("flow", seconds_since(t0));

  const std::vector<double> errors = rel_errors(flow, P_star);
  out.results = {{"flow", integral ? "lyapunov-pi" : "lyapunov"},
                 {"gamma", p.gamma},
                 {"oracle_residual", lyapunov_residual(c.system.A, c.Q, P_star)},
                 {"max_rel_error", *std::max_element(errors.begin(), errors.end())},
                 {"rel_errors", errors}};
  out.results.update(extra);
  out.results["run"] = flow_json(flow);
  out.records = std::move(flow.records);
  out.agents = c.agents;
  out.plot_title = integral ? "Lyapunov flow with integral coupling"
                            : "Lyapunov flow with proportional coupling";
  return out;
}

// ------------------------------------------------------------- riccati

RunOutput run_riccati(const ExperimentConfig& c, bool integral) {
  RunOutput out;
  DataStage s = prepare(c, c.system, c.system.B, out);
  const AreSolution oracle = solve_are_newton(c.system.A, c.system.B, c.Q, c.R);

  RiccatiProblem p{s.shares, c.system.B, c.Q,     c.R,
                   s.flow_graph, c.gammas.front(), c.step, c.horizon};
  const auto t0 = Clock::now();
  FlowResult flow;
  Matrix P;
  Matrix K;
  const Matrix D = input_weight(c.system.B, c.R);
  if (integral) {
    RiccatiPiResult r = dist_dre_pi(p, flow_options(oracle.P), c.tolerance);
    P = r.certificate.P;
    K = r.certificate.K;
    flow = std::move(r.flow);
  } else {
    flow = dist_dre_coupled(p, flow_options(oracle.P));
    P = flow.consensus();
    K = -c.R.llt().solve(c.system.B.transpose() * P);
  }
  out.timings.emplace_back("flow", seconds_since(t0));

  const std::vector<double> errors = rel_errors(flow, oracle.P);
  const Matrix A_sum = sum_shares(s.shares);
  out.results = {
      {"flow", integral ? "riccati-pi" : "riccati"},
      {"gamma", p.gamma},
      {"oracle_residual", oracle.residual},
      {"oracle_iterations", oracle.iterations},
      {"are_residual", riccati_residual(A_sum, D, c.Q, P)},
      {"closed_loop_abscissa", spectral_abscissa(c.system.A + c.system.B * K)},
      {"oracle_gap", (P - oracle.P).norm() / oracle.P.norm()},
      {"max_rel_error", *std::max_element(errors.begin(), errors.end())},
      {"rel_errors", errors},
      {"P", matrix_json(P)},
      {"K", matrix_json(K)},
      {"run", flow_json(flow)}};
  if (integral) out.results["tolerance"] = c.tolerance;
  out.records = std::move(flow.records);
  out.agents = c.agents;
  out.plot_title = integral ? "Riccati flow with integral coupling"
                            : "Riccati flow with proportional coupling";
  return out;
}

// --------------------------------------------------------- gamma sweep

RunOutput run_gamma_sweep(const ExperimentConfig& c) {
  RunOutput out;
  const bool riccati = c.sweep_flow == "riccati";
  DataStage s = prepare(c, c.system, c.system.B, out);
  const Eigen::Index n = c.system.n();
  const Matrix P_star =
      riccati ? solve_are_newton(c.system.A, c.system.B, c.Q, c.R).P
              : solve_lyapunov_direct(c.system.A, c.Q);

  std::vector<double> gammas = c.gammas;
  std::string sweep = "gamma,max_rel_error,mean_rel_error,steps\n";
  ordered_json runs = ordered_json::array();
  std::vector<std::pair<double, double>> terminal;
  FlowResult last;
  for (double gamma : gammas) {
    const auto t0 = Clock::now();
    FlowResult flow;
    if (riccati) {
      RiccatiProblem p{s.shares, c.system.B, c.Q, c.R, s.flow_graph, gamma,
                       c.step, c.horizon};
      flow = dist_dre_coupled(p, flow_options(P_star));
    } else {
      LyapunovProblem p{s.shares, c.Q, s.flow_graph, gamma, c.step, c.horizon};
      flow = dist_dle_coupled(p, std::vector<Matrix>(c.agents, Matrix::Zero(n, n)),
                              flow_options(P_star));
    }
    out.timings.emplace_back("flow_gamma_" + format_double(gamma),
                             seconds_since(t0));
    const std::vector<double> errors = rel_errors(flow, P_star);
    const double max_e = *std::max_element(errors.begin(), errors.end());
    double mean_e = 0.0;
    for (double e : errors) mean_e += e;
    mean_e /= static_cast<double>(errors.size());
    sweep += format_double(gamma) + ',' + format_double(max_e) + ',' +
             format_double(mean_e) + ',' + std::to_string(flow.steps) + '\n';
    runs.push_back({{"gamma", gamma},
                    {"max_rel_error", max_e},
                    {"mean_rel_error", mean_e},
                    {"run", flow_json(flow)}});
    terminal.emplace_back(gamma, max_e);
    out.extra_files.emplace_back(
        "trajectory_gamma_" + format_double(gamma) + ".csv",
        trajectory_csv(flow.records));
    last = std::move(flow);
  }
  std::sort(terminal.begin(), terminal.end());
  bool decreasing = true;
  for (std::size_t k = 1; k < terminal.size(); ++k) {
    decreasing = decreasing && terminal[k].second < terminal[k - 1].second;
  }
  out.results = {{"flow", riccati ? "riccati" : "lyapunov"},
                 {"runs", runs},
                 {"strictly_decreasing", decreasing}};
  out.extra_files.emplace_back("sweep.csv", sweep);
  out.records = std::move(last.records);
  out.agents = c.agents;
  out.plot_title = "Proportional coupling, gamma = " + format_double(gammas.back());
  return out;
}

// ----------------------------------------------------------- robustness

DistributedDesign design_settings(const ExperimentConfig& c,
                                  const CommGraph& graph,
                                  const Matrix& reference) {
  DistributedDesign d;
  d.graph = graph;
  d.gamma = c.gammas.front();
  d.step = c.step;
  d.horizon = c.horizon;
  d.tolerance = c.tolerance;
  d.options = flow_options(reference);
  return d;
}

ordered_json certificate_json(const RobustnessCertificate& cert) {
  ordered_json j;
  j["issued"] = cert.issued;
  j["parameter"] = cert.parameter;
  j["threshold"] = cert.threshold;
  j["factor"] = cert.issued ? ordered_json(cert.factor) : ordered_json(nullptr);
  j["cost_bound"] =
      cert.issued ? ordered_json(cert.cost_bound) : ordered_json(nullptr);
  j["realized_cost"] = optional_json(cert.realized_cost);
  return j;
}

struct MonteCarloTally {
  std::size_t draws = 0;
  std::size_t unstable = 0;
  std::size_t uncertified = 0;
  std::size_t bound_violations = 0;
  std::optional<double> max_cost;
  /// Largest realized_cost / cost_bound over certified stable draws.
  std::optional<double> max_ratio;

  void add(const std::optional<double>& cost, const RobustnessCertificate& cert) {
    ++draws;
    if (!cost) {
      ++unstable;
    } else {
      max_cost = std::max(max_cost.value_or(*cost), *cost);
    }
    if (!cert.issued) {
      ++uncertified;
      return;
    }
    if (cost) {
      const double ratio = *cost / cert.cost_bound;
      max_ratio = std::max(max_ratio.value_or(ratio), ratio);
      if (*cost > cert.cost_bound) ++bound_violations;
    }
  }

  bool all_within_bound() const {
    return draws > 0 && unstable == 0 && uncertified == 0 &&
           bound_violations == 0;
  }

  ordered_json json() const {
    return {{"draws", draws},
            {"unstable", unstable},
            {"uncertified", uncertified},
            {"bound_violations", bound_violations},
            {"max_realized_cost", optional_json(max_cost)},
            {"max_cost_to_bound", optional_json(max_ratio)},
            {"all_within_bound", all_within_bound()}};
  }
};

RunOutput run_robust_b(const ExperimentConfig& c) {
  RunOutput out;
  const Eigen::Index n = c.system.n();
  const Eigen::Index m = c.system.m();
  const Matrix& A = c.system.A;
  const Matrix& B0 = c.system.B;

  Rng b_rng(stream_seed(c.seed, kInputMatrixStream));
  const Matrix B_data =
      B0 + c.robust.data_kappa * draw_unit_perturbation(n, m, b_rng);
  DataStage s = prepare(c, LtiSystem(A, B_data), std::nullopt, out);

  const Matrix A0 = sum_shares(s.shares);
  const AreSolution oracle = solve_are_newton(A0, B0, c.Q, c.R);
  const DistributedDesign settings =
      design_settings(c, s.flow_graph, oracle.P);
  const auto t0 = Clock::now();
  NominalDesign design = nominal_design(s.shares, B0, c.Q, c.R,
                                        c.robust.distributed ? &settings : nullptr);
  out.timings.emplace_back("design", seconds_since(t0));

  const double threshold =
      certify_uncertain_B(design.P, design.K, c.Q, c.R, 0.0).threshold;
  const double epsilon = c.robust.level.value_or(c.robust.fraction * threshold);
  RobustnessCertificate cert =
      certify_uncertain_B(design.P, design.K, c.Q, c.R, epsilon);
  cert.realized_cost = realized_cost(A, B_data, design.K, c.Q, c.R);

  // Draws on the boundary ||Delta_B|| = epsilon, common across the sweep.
  auto monte_carlo = [&](double eps) {
    const RobustnessCertificate ce =
        certify_uncertain_B(design.P, design.K, c.Q, c.R, eps);
    Rng rng(stream_seed(c.seed, kMonteCarloStream));
    MonteCarloTally tally;
    for (std::size_t k = 0; k < c.robust.draws; ++k) {
      const Matrix B = B0 + eps * draw_unit_perturbation(n, m, rng);
      tally.add(realized_cost(A, B, design.K, c.Q, c.R), ce);
    }
    return std::make_pair(ce, tally);
  };
  const auto t1 = Clock::now();
  const auto [main_cert, main_tally] = monte_carlo(epsilon);

  std::string sweep =
      "multiple,epsilon,issued,cost_bound,max_realized_cost,unstable_draws,"
      "bound_violations\n";
  for (double multiple : c.robust.sweep) {
    const auto [ce, tally] = monte_carlo(multiple * threshold);
    sweep += format_double(multiple) + ',' + format_double(multiple * threshold) +
             ',' + (ce.issued ? "1" : "0") + ',' +
             (ce.issued ? format_double(ce.cost_bound) : std::string()) + ',' +
             csv_optional(tally.max_cost) + ',' + std::to_string(tally.unstable) +
             ',' + std::to_string(tally.bound_violations) + '\n';
  }
  out.timings.emplace_back("monte_carlo", seconds_since(t1));
  out.extra_files.emplace_back("sweep.csv", sweep);

  out.results = {
      {"threshold", threshold},
      {"epsilon", epsilon},
      {"data_kappa", c.robust.data_kappa},
      {"data_within_ball", c.robust.data_kappa <= epsilon},
      {"nominal",
       {{"distributed", design.distributed},
        {"oracle_gap", design.oracle_gap},
        {"trace_P", design.P.trace()},
        {"are_residual",
         riccati_residual(A0, input_weight(B0, c.R), c.Q, design.P)},
        {"P", matrix_json(design.P)},
        {"K", matrix_json(design.K)}}},
      {"certificate", certificate_json(cert)},
      {"monte_carlo", main_tally.json()}};
  if (design.distributed) out.results["nominal"]["run"] = flow_json(design.flow);
  out.records = std::move(design.flow.records);
  out.agents = design.distributed ? c.agents : 0;
  out.plot_title = "Nominal Riccati design, input matrix uncertainty";
  return out;
}

RunOutput run_robust_noise(const ExperimentConfig& c) {
  RunOutput out;
  const Eigen::Index n = c.system.n();
  const Matrix& A = c.system.A;
  const Matrix& B = c.system.B;
  DataStage s = prepare(c, c.system, B, out);
  const Matrix X0 = s.data.states();
  const auto N = static_cast<Eigen::Index>(c.agents);

  // The allocation depends on the states only, so noisy derivatives reuse it.
  auto noisy_shares = [&](const Matrix& noise) {
    return share_matrices(
        build_shares(add_noise(s.data, noise), s.allocation.w, B));
  };

  const AreSolution clean = solve_are_newton(sum_shares(s.shares), B, c.Q, c.R);
  const double threshold = certify_noisy(clean.P, clean.K, c.Q, X0, 0.0).threshold;
  const double tau = c.robust.level.value_or(c.robust.fraction * threshold);

  Rng dir_rng(stream_seed(c.seed, kNoiseStream));
  const Matrix direction = draw_unit_perturbation(n, N, dir_rng);
  const std::vector<Matrix> shares = noisy_shares(tau * direction);
  const AreSolution oracle = solve_are_newton(sum_shares(shares), B, c.Q, c.R);
  const DistributedDesign settings = design_settings(c, s.flow_graph, oracle.P);
  const auto t0 = Clock::now();
  NominalDesign design =
      nominal_design(shares, B, c.Q, c.R, c.robust.distributed ? &settings : nullptr);
  out.timings.emplace_back("design", seconds_since(t0));
  RobustnessCertificate cert = certify_noisy(design.P, design.K, c.Q, X0, tau);
  cert.realized_cost = realized_cost(A, B, design.K, c.Q, c.R);

  const auto t1 = Clock::now();
  Rng rng(stream_seed(c.seed, kMonteCarloStream));
  MonteCarloTally tally;
  for (std::size_t k = 0; k < c.robust.draws; ++k) {
    const Matrix noise = tau * draw_unit_perturbation(n, N, rng);
    try {
      const NominalDesign d = nominal_design(noisy_shares(noise), B, c.Q, c.R);
      tally.add(realized_cost(A, B, d.K, c.Q, c.R),
                certify_noisy(d.P, d.K, c.Q, X0, tau));
    } catch (const NumericalError&) {
      RobustnessCertificate none;
      tally.add(std::nullopt, none);
    }
  }

  std::string sweep =
      "multiple,tau,issued,threshold,zeta,cost_bound,realized_cost\n";
  bool bound_monotone = true;
  std::optional<double> previous_bound;
  for (double multiple : c.robust.sweep) {
    const double t = multiple * threshold;
    std::string row = format_double(multiple) + ',' + format_double(t) + ',';
    try {
      const NominalDesign d = nominal_design(noisy_shares(t * direction), B, c.Q, c.R);
      const RobustnessCertificate ce = certify_noisy(d.P, d.K, c.Q, X0, t);
      const std::optional<double> cost = realized_cost(A, B, d.K, c.Q, c.R);
      row += std::string(ce.issued ? "1" : "0") + ',' +
             format_double(ce.threshold) + ',' +
             (ce.issued ? format_double(ce.factor) : std::string()) + ',' +
             (ce.issued ? format_double(ce.cost_bound) : std::string()) + ',' +
             csv_optional(cost);
      if (ce.issued) {
        if (previous_bound && ce.cost_bound < *previous_bound) {
          bound_monotone = false;
        }
        previous_bound = ce.cost_bound;
      }
    } catch (const NumericalError&) {
      row += "0,,,,";
    }
    sweep += row + '\n';
  }
  out.timings.emplace_back("monte_carlo", seconds_since(t1));
  out.extra_files.emplace_back("sweep.csv", sweep);

  out.results = {
      {"clean_threshold", threshold},
      {"tau", tau},
      {"sigma_min_X0", singular_extremes(X0).sigma_min},
      {"clean_trace_P", clean.P.trace()},
      {"nominal",
       {{"distributed", design.distributed},
        {"oracle_gap", design.oracle_gap},
        {"trace_P", design.P.trace()},
        {"are_residual", riccati_residual(sum_shares(shares), input_weight(B, c.R),
                                          c.Q, design.P)},
        {"P", matrix_json(design.P)},
        {"K", matrix_json(design.K)}}},
      {"certificate", certificate_json(cert)},
      {"monte_carlo", tally.json()},
      {"sweep_bound_monotone", bound_monotone}};
  if (design.distributed) out.results["nominal"]["run"] = flow_json(design.flow);
  out.records = std::move(design.flow.records);
  out.agents = design.distributed ? c.agents : 0;
  out.plot_title = "Nominal Riccati design, noisy derivative data";
  return out;
}

}  // namespace

RunOutput execute(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::kSplit: return run_split(config);
    case ExperimentKind::kLyapunov: return run_lyapunov(config, false);
    case ExperimentKind::kLyapunovPi: return run_lyapunov(config, true);
    case ExperimentKind::kRiccati: return run_riccati(config, false);
    case ExperimentKind::kRiccatiPi: return run_riccati(config, true);
    case ExperimentKind::kRobustB: return run_robust_b(config);
    case ExperimentKind::kRobustNoise: return run_robust_noise(config);
    case ExperimentKind::kGammaSweep: return run_gamma_sweep(config);
  }
  throw ValidationError("unknown experiment kind");
}

ordered_json terminal_values(const std::vector<AgentRecord>& records,
                             std::size_t agents) {
  std::vector<const AgentRecord*> last(agents, nullptr);
  for (const AgentRecord& r : records) {
    if (r.agent < agents) last[r.agent] = &r;
  }
  ordered_json out = ordered_json::array();
  for (std::size_t a = 0; a < agents; ++a) {
    if (!last[a]) continue;
    out.push_back({{"agent", a},
                   {"t", last[a]->t},
                   {"rel_error", optional_json(last[a]->rel_error)},
                   {"disagreement", optional_json(last[a]->disagreement)},
                   {"residual", optional_json(last[a]->residual)}});
  }
  return out;
}

ordered_json write_artifacts(const ExperimentConfig& config,
                             const RunOutput& out, double wall_time) {
  const std::filesystem::path dir(config.output_dir);
  std::vector<std::string> files;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_text(dir, name, content);
    files.push_back(name);
  };
  emit("trajectory.csv", trajectory_csv(out.records));
  emit("plot.svg", plot_svg(out.records, out.agents,
                            out.plot_title.empty() ? to_string(config.kind)
                                                   : out.plot_title,
                            out.plot_residual));
  for (const auto& [name, content] : out.extra_files) emit(name, content);

  ordered_json timing;
  timing["wall_time_s"] = wall_time;
  for (const auto& [stage, seconds] : out.timings) timing["stages"][stage] = seconds;
  emit("timing.json", timing.dump(2) + '\n');

  ordered_json summary;
  summary["schema_version"] = kSummarySchemaVersion;
  summary["status"] = "ok";
  summary["experiment"] = to_string(config.kind);
  summary["config"] = config.echo();
  summary["data"] = out.data;
  summary["allocation"] = out.allocation;
  summary["results"] = out.results;
  summary["agents"] = terminal_values(out.records, out.agents);
  summary["trajectory_rows"] = out.records.size();
  files.push_back("summary.json");
  summary["files"] = files;
  write_text(dir, "summary.json", summary.dump(2) + '\n');
  return summary;
}

}  // namespace ddc::experiment
