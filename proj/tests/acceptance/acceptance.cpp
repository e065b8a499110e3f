// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any
// failure. Experiment-level criteria go through the CLI with the configs in
// configs/; property criteria call the library directly.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddc/cli.hpp"
#include "ddc/errors.hpp"
#include "ddc/lyapunov.hpp"
#include "ddc/model.hpp"
#include "ddc/oracles.hpp"
#include "ddc/riccati.hpp"
#include "ddc/splitting.hpp"
#include "ddc/structured.hpp"
#include "support/reference.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ddc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(slurp(p));
  std::string line;
  std::getline(ss, line);  // header
  while (std::getline(ss, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

class Harness {
 public:
  explicit Harness(fs::path work) : work_(std::move(work)) {}

  /// Runs configs/<name>.yaml once into work/<name>/first; throws on failure.
  const json& run(const std::string& name) {
    auto it = summaries_.find(name);
    if (it != summaries_.end()) return it->second;
    run_into(name, "first");
    timing_[name] = json::parse(slurp(dir(name, "first") / "timing.json"));
    return summaries_[name] = json::parse(slurp(dir(name, "first") / "summary.json"));
  }

  void run_into(const std::string& name, const std::string& tag) {
    const fs::path out = dir(name, tag);
    fs::remove_all(out);
    const std::string cfg = std::string(DDC_SOURCE_DIR) + "/configs/" + name + ".yaml";
    const std::string out_s = out.string();
    const char* argv[] = {"ddc", "run", cfg.c_str(), "--out", out_s.c_str()};
    std::ostringstream o, e;
    const int code = experiment::run_cli(5, argv, o, e);
    if (code != 0) {
      throw std::runtime_error(name + " exited with " + std::to_string(code) + ": " +
                               e.str());
    }
  }

  double wall(const std::string& name) const {
    return timing_.at(name)["wall_time_s"];
  }
  fs::path dir(const std::string& name, const std::string& tag) const {
    return work_ / name / tag;
  }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : summaries_) out.push_back(k);
    return out;
  }

 private:
  fs::path work_;
  std::map<std::string, json> summaries_;
  std::map<std::string, json> timing_;
};

std::vector<std::pair<double, double>> sweep_errors(const json& summary) {
  std::vector<std::pair<double, double>> runs;
  for (const auto& r : summary["results"]["runs"]) {
    runs.emplace_back(r["gamma"].get<double>(), r["max_rel_error"].get<double>());
  }
  std::sort(runs.begin(), runs.end());
  return runs;
}

// ---------------------------------------------------------------------------

Outcome share_exactness() {
  const Eigen::Index n = 4;
  const std::size_t N = 8;
  Rng rng(1);
  const Matrix A = rng.uniform_matrix(n, n, -1, 1);
  SamplingOptions so;
  so.agents = N;
  so.seed = 1;
  const FragmentedDataset ds = sample_algebraic(LtiSystem(A, Matrix::Zero(n, 0)), so);
  const auto t0 = std::chrono::steady_clock::now();
  const AllocationResult r = right_inverse_allocation(ds, make_graph(GraphSpec{}, N), {});
  const Matrix sum =
      sum_shares(share_matrices(build_shares(ds, r.w, Matrix::Zero(n, 0))));
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const Matrix Y = testing::pseudoinverse(ds.states());
  double gap = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    gap = std::max(gap, (r.w[i] - Y.row(static_cast<Eigen::Index>(i)).transpose()).norm());
  }
  const double a_err = (sum - A).norm();
  Outcome o;
  o.pass = r.residual <= 1e-8 && a_err <= 1e-6 && gap <= 1e-5 && wall < 5.0;
  o.detail = "residual " + sci(r.residual) + " (<=1e-8), |sum A_i - A| " + sci(a_err) +
             " (<=1e-6), min-norm gap " + sci(gap) + " (<=1e-5), " + sci(wall) +
             " s (<5)";
  return o;
}

Outcome lyapunov_exactness(Harness& h) {
  const json& s = h.run("tank4_lyapunov_pi");
  const auto errors = s["results"]["rel_errors"].get<std::vector<double>>();
  const double worst = *std::max_element(errors.begin(), errors.end());
  const double oracle = s["results"]["oracle_residual"];
  const double wall = h.wall("tank4_lyapunov_pi");
  Outcome o;
  o.pass = errors.size() == 4 && worst <= 1e-4 && oracle <= 1e-10 && wall < 30.0;
  o.detail = "max agent rel error " + sci(worst) + " (<=1e-4), oracle residual " +
             sci(oracle) + " (<=1e-10), " + sci(wall) + " s (<30)";
  return o;
}

Outcome practical_gap(Harness& h) {
  const double pi_error = h.run("tank4_lyapunov_pi")["results"]["max_rel_error"];
  const auto runs = sweep_errors(h.run("tank4_gamma_sweep"));
  bool ok = runs.size() == 3 && runs[0].first == 1e2 && runs[1].first == 1e3 &&
            runs[2].first == 1e4;
  std::string detail;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    ok = ok && runs[k].second > pi_error;
    if (k > 0) ok = ok && runs[k].second < runs[k - 1].second;
    detail += "gamma " + sci(runs[k].first) + ": " + sci(runs[k].second) + ", ";
  }
  detail += "integral coupling " + sci(pi_error);
  return {ok, detail};
}

Outcome riccati_exactness(Harness& h) {
  const json& r = h.run("heli8_riccati_pi")["results"];
  const double res = r["are_residual"];
  const double alpha = r["closed_loop_abscissa"];
  const double gap = r["oracle_gap"];
  const double wall = h.wall("heli8_riccati_pi");
  Outcome o;
  o.pass = res <= 1e-6 && alpha < 0.0 && gap <= 1e-5 && wall < 120.0;
  o.detail = "ARE residual " + sci(res) + " (<=1e-6), closed-loop abscissa " + sci(alpha) +
             " (<0), gap to Newton " + sci(gap) + " (<=1e-5), " + sci(wall) + " s (<120)";
  return o;
}

Outcome riccati_monotonicity(Harness& h) {
  const auto runs = sweep_errors(h.run("heli8_gamma_sweep"));
  bool ok = runs.size() == 3 && runs[0].first == 50 && runs[1].first == 500 &&
            runs[2].first == 5000;
  std::string detail;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (k > 0) ok = ok && runs[k].second < runs[k - 1].second;
    detail += (k ? ", gamma " : "gamma ") + sci(runs[k].first) + ": " + sci(runs[k].second);
  }
  return {ok, detail};
}

Outcome decay_certificates() {
  Rng rng(6);
  std::size_t dle_rows = 0, dre_rows = 0, dle_bad = 0, dre_bad = 0;
  double worst_excess = -1e300;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 4;
    const Eigen::Index m = 1 + trial % 2;
    const Matrix Q = testing::random_spd(n, rng);

    const Matrix A_s = testing::random_hurwitz(n, rng);
    FlowOptions ol;
    ol.reference = solve_lyapunov_direct(A_s, Q);
    const Matrix P0 = 2.0 * symmetrize(rng.uniform_matrix(n, n, -1, 1));
    const FlowResult dle = dle_centralized(A_s, Q, P0, 1e-2, 10.0, ol);
    const double v0 = *dle.records.front().lyap_v;
    for (std::size_t k = 1; k < dle.records.size(); ++k) {
      ++dle_rows;
      // Monotone up to round-off relative to the initial value.
      if (*dle.records[k].lyap_v > *dle.records[k - 1].lyap_v + 1e-12 * v0) ++dle_bad;
    }

    const Matrix A = rng.uniform_matrix(n, n, -1, 1);
    const Matrix B = rng.uniform_matrix(n, m, -1, 1);
    const Matrix R = Matrix::Identity(m, m);
    FlowOptions orr;
    orr.reference = solve_are_newton(A, B, Q, R).P;
    orr.decay_bound = true;
    const Matrix S = rng.uniform_matrix(n, n, -1, 1);
    const FlowResult dre = dre_centralized(A, B, Q, R, S * S.transpose(), 1e-2, 10.0, orr);
    for (const AgentRecord& row : dre.records) {
      ++dre_rows;
      const double excess = *row.lyap_v - *row.lyap_bound;
      worst_excess = std::max(worst_excess, excess);
      if (excess > 1e-6) ++dre_bad;
    }
  }
  Outcome o;
  o.pass = dle_bad == 0 && dre_bad == 0 && dle_rows > 0 && dre_rows > 0;
  o.detail = "20 instances; DLE V increases at " + std::to_string(dle_bad) + "/" +
             std::to_string(dle_rows) + " rows; DRE V above bound+1e-6 at " +
             std::to_string(dre_bad) + "/" + std::to_string(dre_rows) +
             " rows (max V - bound " + sci(worst_excess) + ")";
  return o;
}

Outcome coordinate_checks() {
  const Eigen::Index n = 3;
  const std::size_t N = 5;
  Rng rng(7);
  const Matrix A = testing::random_hurwitz(n, rng, 0.5);
  const Matrix B = rng.uniform_matrix(n, 1, -1, 1);
  const Matrix Q = Matrix::Identity(n, n);
  const Matrix R = Matrix::Identity(1, 1);
  SamplingOptions so;
  so.agents = N;
  so.seed = 7;
  const FragmentedDataset ds = sample_algebraic(LtiSystem(A, B), so);
  GraphSpec complete;
  complete.kind = GraphKind::kComplete;
  const AllocationResult alloc = right_inverse_allocation(ds, make_graph(complete, N), {});
  const std::vector<Matrix> shares = share_matrices(build_shares(ds, alloc.w, B));
  const CommGraph graph = make_graph(GraphSpec{}, N);
  const SpectralSplit split = spectral_split(laplacian(graph));
  const Matrix A_sum = sum_shares(shares);
  const Matrix P_lyap = solve_lyapunov_direct(A_sum, Q);
  const Matrix P_are = solve_are_newton(A_sum, B, Q, R).P;

  FlowOptions keep;
  keep.keep_every = 10;
  const double gamma = 50.0;

  // xi4 along both integral flows.
  std::vector<Matrix> P0, Y0;
  for (std::size_t i = 0; i < N; ++i) {
    P0.push_back(symmetrize(rng.uniform_matrix(n, n, -1, 1)));
    Y0.push_back(symmetrize(rng.uniform_matrix(n, n, -1, 1)));
  }
  double drift = 0.0;
  LyapunovProblem lp{shares, Q, graph, gamma, 1e-2, 10.0};
  const FlowResult dle = dist_dle_pi(lp, P0, Y0, keep, 1e9).flow;
  const Vector xi4_dle = structured_coords_dle(P0, Y0, split, shares, gamma, P_lyap).xi4;
  for (const FlowSnapshot& s : dle.snapshots) {
    const Vector xi4 = structured_coords_dle(s.P, s.Y, split, shares, gamma, P_lyap).xi4;
    drift = std::max(drift, (xi4 - xi4_dle).cwiseAbs().maxCoeff());
  }
  RiccatiProblem rp{shares, B, Q, R, graph, gamma, 1e-2, 10.0};
  const FlowResult dre = dist_dre_pi(rp, keep, 1e9).flow;
  for (const FlowSnapshot& s : dre.snapshots) {
    const Vector xi4 = structured_coords_dre(s.P, s.Y, split, shares, gamma, P_are).xi4;
    drift = std::max(drift, xi4.cwiseAbs().maxCoeff());
  }

  // Zero start of the Riccati flow.
  const std::vector<Matrix> zeros(N, Matrix::Zero(n, n));
  const double start_gap =
      (structured_coords_dre(zeros, zeros, split, shares, gamma, P_are).xi1 + vec(P_are))
          .cwiseAbs()
          .maxCoeff();

  // Structured linear dynamics against the transformed original trajectory.
  LyapunovProblem short_p{shares, Q, graph, gamma, 1e-2, 1.0};
  const FlowResult run = dist_dle_pi(short_p, P0, Y0, {}, 1e9).flow;
  const Matrix M = compact_dle_matrix(structured_blocks(shares, split), gamma);
  OdeProblem ode;
  ode.dimension = M.rows();
  ode.rhs = [&](double, const Vector& x, Vector& dx) { dx.noalias() = M * x; };
  ode.initial_state = structured_coords_dle(P0, Y0, split, shares, gamma, P_lyap).stacked();
  ode.step = run.step_sizes.front();
  ode.horizon = 1.0;
  const Vector expected =
      structured_coords_dle(run.P, run.Y, split, shares, gamma, P_lyap).stacked();
  const double replay = (integrate(ode).final_state() - expected).cwiseAbs().maxCoeff();

  Outcome o;
  o.pass = drift <= 1e-9 && start_gap <= 1e-10 && replay <= 1e-8;
  o.detail = "xi4 drift " + sci(drift) + " (<=1e-9), xi1(0) + vec P* " + sci(start_gap) +
             " (<=1e-10), structured replay gap " + sci(replay) + " (<=1e-8)";
  return o;
}

Outcome uncertain_b(Harness& h) {
  const json& r = h.run("plant42_robust_b")["results"];
  const json& mc = r["monte_carlo"];
  const double ratio = r["epsilon"].get<double>() / r["threshold"].get<double>();
  bool negative = false;
  bool has_negative_row = false;
  for (const auto& row : read_csv(h.dir("plant42_robust_b", "first") / "sweep.csv")) {
    if (std::stod(row[0]) != 10.0) continue;
    has_negative_row = true;
    negative = row[2] == "0" || std::stoi(row[6]) > 0;
  }
  Outcome o;
  o.pass = std::abs(ratio - 0.9) < 1e-12 && r["certificate"]["issued"] == true &&
           mc["draws"] == 100 && mc["unstable"] == 0 && mc["bound_violations"] == 0 &&
           mc["all_within_bound"] == true && has_negative_row && negative;
  o.detail = "eps = " + sci(ratio) + " x threshold, " + mc["draws"].dump() + " draws, " +
             mc["unstable"].dump() + " unstable, " + mc["bound_violations"].dump() +
             " over bound (max cost/bound " + sci(mc["max_cost_to_bound"].get<double>()) +
             "); at 10x threshold " +
             (negative ? "no certificate or a violation" : "still certified");
  return o;
}

Outcome noisy_data(Harness& h) {
  const json& r = h.run("plant42_robust_noise")["results"];
  const json& mc = r["monte_carlo"];
  double last_tau = -1.0, last_bound = -1.0;
  bool monotone = true;
  std::size_t issued = 0;
  for (const auto& row : read_csv(h.dir("plant42_robust_noise", "first") / "sweep.csv")) {
    if (row[2] != "1") continue;
    const double tau = std::stod(row[1]);
    const double bound = std::stod(row[5]);
    monotone = monotone && tau > last_tau && bound > last_bound;
    last_tau = tau;
    last_bound = bound;
    ++issued;
  }
  const double ratio = r["tau"].get<double>() / r["clean_threshold"].get<double>();
  Outcome o;
  o.pass = std::abs(ratio - 0.9) < 1e-12 && mc["draws"] == 100 &&
           mc["all_within_bound"] == true && monotone && issued >= 2;
  o.detail = "tau = " + sci(ratio) + " x threshold, " + mc["draws"].dump() + " draws, " +
             mc["unstable"].dump() + " unstable, " + mc["uncertified"].dump() +
             " uncertified, " + mc["bound_violations"].dump() + " over bound; sweep bound " +
             (monotone ? "increasing" : "not monotone") + " over " +
             std::to_string(issued) + " certified levels";
  return o;
}

Outcome oracle_concordance() {
  Rng rng(10);
  double worst_dre = 0.0, worst_cost = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 4;
    const Eigen::Index m = 1 + trial % 2;
    const Matrix A = rng.uniform_matrix(n, n, -1, 1);
    const Matrix B = rng.uniform_matrix(n, m, -1, 1);
    const Matrix Q = Matrix::Identity(n, n);
    const Matrix R = Matrix::Identity(m, m);
    const AreSolution s = solve_are_newton(A, B, Q, R);
    const double decay = -spectral_abscissa(A + B * s.K);
    const double horizon = std::min(2000.0, 20.0 / decay);
    FlowOptions o;
    o.max_records = 2;
    const FlowResult f = dre_centralized(A, B, Q, R, Matrix::Zero(n, n), 1e-2, horizon, o);
    worst_dre = std::max(worst_dre, (f.P[0] - s.P).norm() / s.P.norm());
    worst_cost = std::max(worst_cost,
                          std::abs(lqr_cost(A, B, s.K, Q, R) - s.P.trace()) / s.P.trace());
  }
  Outcome o;
  o.pass = worst_dre <= 1e-6 && worst_cost <= 1e-8;
  o.detail = "20 instances; max |P_dre - P_newton|/|P_newton| " + sci(worst_dre) +
             " (<=1e-6), max |J(K*) - tr P*|/tr P* " + sci(worst_cost) + " (<=1e-8)";
  return o;
}

Outcome determinism(Harness& h) {
  std::size_t compared = 0, differing = 0;
  std::string which;
  for (const std::string& name : h.names()) {
    h.run_into(name, "second");
    for (const auto& entry : fs::directory_iterator(h.dir(name, "first"))) {
      const std::string file = entry.path().filename().string();
      const std::string ext = entry.path().extension().string();
      if (file == "timing.json" || (ext != ".csv" && ext != ".json")) continue;
      ++compared;
      if (slurp(entry.path()) != slurp(h.dir(name, "second") / file)) {
        ++differing;
        which += " " + name + "/" + file;
      }
    }
  }
  Outcome o;
  o.pass = compared > 0 && differing == 0;
  o.detail = std::to_string(compared) + " CSV/JSON files from " +
             std::to_string(h.names().size()) + " runs repeated, " +
             std::to_string(differing) + " differ" + which;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work = fs::temp_directory_path() / "ddc_acceptance";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--work-dir") work = argv[i + 1];
  }
  Harness h(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"share exactness", share_exactness},
      {"lyapunov exactness", [&] { return lyapunov_exactness(h); }},
      {"practical-vs-exact gap", [&] { return practical_gap(h); }},
      {"riccati exactness", [&] { return riccati_exactness(h); }},
      {"riccati gamma monotonicity", [&] { return riccati_monotonicity(h); }},
      {"decay certificates", decay_certificates},
      {"structured coordinates", coordinate_checks},
      {"uncertain input matrix", [&] { return uncertain_b(h); }},
      {"noisy derivative data", [&] { return noisy_data(h); }},
      {"oracle concordance", oracle_concordance},
      {"determinism", [&] { return determinism(h); }},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (k + 1 < 10 ? " " : "") << k + 1
              << "] " << criteria[k].first << ": " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
