#include "ddc/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ddc/errors.hpp"
#include "ddc/oracles.hpp"
#include "ddc/presets.hpp"
#include "ddc/random.hpp"

namespace ddc::experiment {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ValidationError("config: " + key + ": " + what);
}

void check_keys(const YAML::Node& node, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail(where.empty() ? "<root>" : where, "expected a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      fail(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

template <typename T>
T get(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(key, "has the wrong type");
  }
}

double get_positive(const YAML::Node& node, const std::string& key) {
  const double v = get<double>(node, key);
  if (!(v > 0.0) || !std::isfinite(v)) fail(key, "must be positive");
  return v;
}

double get_nonnegative(const YAML::Node& node, const std::string& key) {
  const double v = get<double>(node, key);
  if (!(v >= 0.0) || !std::isfinite(v)) fail(key, "must be non-negative");
  return v;
}

Matrix get_matrix(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence() || node.size() == 0) {
    fail(key, "expected a non-empty list of rows");
  }
  const auto rows = static_cast<Eigen::Index>(node.size());
  Eigen::Index cols = -1;
  Matrix m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const YAML::Node row = node[static_cast<std::size_t>(r)];
    if (!row.IsSequence()) fail(key, "every row must be a list");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      fail(key, "rows have different lengths");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = get<double>(row[static_cast<std::size_t>(c)], key);
    }
  }
  if (!all_finite(m)) fail(key, "entries must be finite");
  return m;
}

/// "identity", a scalar s (meaning s I) or an explicit matrix.
Matrix get_weight(const YAML::Node& node, const std::string& key,
                  Eigen::Index dim) {
  Matrix w;
  if (node.IsScalar()) {
    const std::string text = node.as<std::string>();
    const double s = text == "identity" ? 1.0 : get_positive(node, key);
    w = s * Matrix::Identity(dim, dim);
  } else {
    w = get_matrix(node, key);
  }
  if (w.rows() != dim || w.cols() != dim) {
    std::ostringstream os;
    os << "must be " << dim << "x" << dim;
    fail(key, os.str());
  }
  try {
    if (dim > 0) require_positive_definite(w, key.c_str());
  } catch (const ValidationError& e) {
    fail(key, e.what());
  }
  return w;
}

GraphSpec get_graph(const YAML::Node& node, const std::string& key) {
  check_keys(node, key, {"kind", "p", "seed"});
  GraphSpec g;
  const std::string kind =
      node["kind"] ? get<std::string>(node["kind"], key + ".kind") : "ring";
  if (kind == "ring") g.kind = GraphKind::kRing;
  else if (kind == "path") g.kind = GraphKind::kPath;
  else if (kind == "complete") g.kind = GraphKind::kComplete;
  else if (kind == "star") g.kind = GraphKind::kStar;
  else if (kind == "random") g.kind = GraphKind::kRandom;
  else fail(key + ".kind", "must be ring, path, complete, star or random");
  if (node["p"]) {
    g.edge_probability = get<double>(node["p"], key + ".p");
    if (!(g.edge_probability > 0.0 && g.edge_probability <= 1.0)) {
      fail(key + ".p", "must lie in (0, 1]");
    }
  }
  if (node["seed"]) g.seed = get<std::uint64_t>(node["seed"], key + ".seed");
  return g;
}

const char* graph_name(GraphKind k) {
  switch (k) {
    case GraphKind::kRing: return "ring";
    case GraphKind::kPath: return "path";
    case GraphKind::kComplete: return "complete";
    case GraphKind::kStar: return "star";
    case GraphKind::kRandom: return "random";
  }
  return "?";
}

ordered_json graph_json(const GraphSpec& g) {
  ordered_json j;
  j["kind"] = graph_name(g.kind);
  if (g.kind == GraphKind::kRandom) {
    j["p"] = g.edge_probability;
    j["seed"] = g.seed;
  }
  return j;
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

LtiSystem random_system(const YAML::Node& node, std::string& label) {
  check_keys(node, "system.random", {"n", "m", "seed", "stable"});
  if (!node["n"]) fail("system.random.n", "is required");
  const int n = get<int>(node["n"], "system.random.n");
  const int m = node["m"] ? get<int>(node["m"], "system.random.m") : 0;
  if (n < 1 || m < 0) fail("system.random", "need n >= 1 and m >= 0");
  const std::uint64_t seed =
      node["seed"] ? get<std::uint64_t>(node["seed"], "system.random.seed") : 0;
  const bool stable =
      node["stable"] ? get<bool>(node["stable"], "system.random.stable") : false;
  Rng rng(seed);
  Matrix A = rng.uniform_matrix(n, n, -1.0, 1.0);
  const Matrix B = rng.uniform_matrix(n, m, -1.0, 1.0);
  if (stable) {
    const double shift = spectral_abscissa(A) + 0.5;
    if (shift > 0.0) A -= shift * Matrix::Identity(n, n);
  }
  std::ostringstream os;
  os << "random(n=" << n << ",m=" << m << ",seed=" << seed << ")";
  label = os.str();
  return LtiSystem(A, B);
}

std::vector<double> get_list(const YAML::Node& node, const std::string& key) {
  std::vector<double> out;
  if (node.IsSequence()) {
    for (const auto& v : node) out.push_back(get_positive(v, key));
  } else {
    out.push_back(get_positive(node, key));
  }
  if (out.empty()) fail(key, "must not be empty");
  return out;
}

ExperimentKind parse_kind(const std::string& s) {
  static const std::pair<const char*, ExperimentKind> kKinds[] = {
      {"split", ExperimentKind::kSplit},
      {"lyapunov", ExperimentKind::kLyapunov},
      {"lyapunov-pi", ExperimentKind::kLyapunovPi},
      {"riccati", ExperimentKind::kRiccati},
      {"riccati-pi", ExperimentKind::kRiccatiPi},
      {"robust-b", ExperimentKind::kRobustB},
      {"robust-noise", ExperimentKind::kRobustNoise},
      {"gamma-sweep", ExperimentKind::kGammaSweep},
  };
  for (const auto& [name, kind] : kKinds) {
    if (s == name) return kind;
  }
  fail("experiment",
       "must be one of split, lyapunov, lyapunov-pi, riccati, riccati-pi, "
       "robust-b, robust-noise, gamma-sweep");
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSplit: return "split";
    case ExperimentKind::kLyapunov: return "lyapunov";
    case ExperimentKind::kLyapunovPi: return "lyapunov-pi";
    case ExperimentKind::kRiccati: return "riccati";
    case ExperimentKind::kRiccatiPi: return "riccati-pi";
    case ExperimentKind::kRobustB: return "robust-b";
    case ExperimentKind::kRobustNoise: return "robust-noise";
    case ExperimentKind::kGammaSweep: return "gamma-sweep";
  }
  return "?";
}

void apply_override(YAML::Node& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ValidationError("override '" + assignment +
                          "' must have the form key=value");
  }
  const std::string key = assignment.substr(0, eq);
  YAML::Node value;
  try {
    value = YAML::Load(assignment.substr(eq + 1));
  } catch (const YAML::Exception& e) {
    throw ValidationError("override '" + assignment + "': " + e.what());
  }
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) {
      throw ValidationError("override '" + assignment + "': empty key segment");
    }
    parts.push_back(part);
  }
  // yaml-cpp nodes are handles; walk by reassigning copies.
  std::vector<YAML::Node> chain{root};
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node next = chain.back()[parts[i]];
    if (!next.IsDefined() || next.IsNull()) {
      chain.back()[parts[i]] = YAML::Node(YAML::NodeType::Map);
      next = chain.back()[parts[i]];
    }
    if (!next.IsMap()) {
      throw ValidationError("override '" + assignment + "': '" + parts[i] +
                            "' is not a section");
    }
    chain.push_back(next);
  }
  chain.back()[parts.back()] = value;
}

ExperimentConfig parse_config(const YAML::Node& root) {
  check_keys(root, "",
             {"experiment", "seed", "system", "agents", "graph", "gamma",
              "sweep_flow", "Q", "R", "step", "horizon", "tolerance",
              "allocation", "sampling", "robust", "output"});
  ExperimentConfig c;
  if (!root["experiment"]) fail("experiment", "is required");
  c.kind = parse_kind(get<std::string>(root["experiment"], "experiment"));
  if (root["seed"]) c.seed = get<std::uint64_t>(root["seed"], "seed");

  if (!root["system"]) fail("system", "is required");
  const YAML::Node sys = root["system"];
  check_keys(sys, "system", {"preset", "A", "B", "random"});
  const int sources = (sys["preset"] ? 1 : 0) + (sys["A"] ? 1 : 0) +
                      (sys["random"] ? 1 : 0);
  if (sources != 1) fail("system", "give exactly one of preset, A or random");
  try {
    if (sys["preset"]) {
      c.system_label = get<std::string>(sys["preset"], "system.preset");
      c.system = preset_system(c.system_label);
      if (sys["B"]) fail("system.B", "cannot be combined with a preset");
    } else if (sys["A"]) {
      const Matrix A = get_matrix(sys["A"], "system.A");
      Matrix B = sys["B"] ? get_matrix(sys["B"], "system.B")
                          : Matrix::Zero(A.rows(), 0);
      c.system = LtiSystem(A, B);
      c.system_label = "inline";
    } else {
      c.system = random_system(sys["random"], c.system_label);
    }
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    if (what.rfind("config:", 0) == 0) throw;
    fail("system", what);
  }
  const Eigen::Index n = c.system.n();
  const Eigen::Index m = c.system.m();

  if (!root["agents"]) fail("agents", "is required");
  const int agents = get<int>(root["agents"], "agents");
  if (agents < 2) fail("agents", "must be at least 2");
  c.agents = static_cast<std::size_t>(agents);

  if (root["graph"]) c.graph = get_graph(root["graph"], "graph");
  if (root["gamma"]) c.gammas = get_list(root["gamma"], "gamma");
  if (c.kind != ExperimentKind::kGammaSweep && c.gammas.size() != 1) {
    fail("gamma", "a list is only allowed for gamma-sweep");
  }
  if (root["sweep_flow"]) {
    c.sweep_flow = get<std::string>(root["sweep_flow"], "sweep_flow");
    if (c.sweep_flow != "riccati" && c.sweep_flow != "lyapunov") {
      fail("sweep_flow", "must be riccati or lyapunov");
    }
  }
  c.Q = root["Q"] ? get_weight(root["Q"], "Q", n) : Matrix::Identity(n, n);
  c.R = root["R"] ? get_weight(root["R"], "R", m) : Matrix::Identity(m, m);
  if (root["step"]) c.step = get_positive(root["step"], "step");
  if (root["horizon"]) c.horizon = get_positive(root["horizon"], "horizon");
  if (c.horizon < c.step) fail("horizon", "must be at least one step");
  if (root["tolerance"]) c.tolerance = get_positive(root["tolerance"], "tolerance");

  if (const YAML::Node a = root["allocation"]) {
    check_keys(a, "allocation",
               {"k_w", "tolerance", "max_horizon", "max_step", "graph"});
    if (a["k_w"]) c.allocation.k_w = get_positive(a["k_w"], "allocation.k_w");
    if (a["tolerance"]) {
      c.allocation.tolerance = get_positive(a["tolerance"], "allocation.tolerance");
    }
    if (a["max_horizon"]) {
      c.allocation.max_horizon =
          get_positive(a["max_horizon"], "allocation.max_horizon");
    }
    if (a["max_step"]) {
      c.allocation.max_step = get_positive(a["max_step"], "allocation.max_step");
    }
    if (a["graph"]) c.allocation_graph = get_graph(a["graph"], "allocation.graph");
  }
  if (const YAML::Node s = root["sampling"]) {
    check_keys(s, "sampling", {"state_scale", "input_scale"});
    if (s["state_scale"]) {
      c.state_scale = get_positive(s["state_scale"], "sampling.state_scale");
    }
    if (s["input_scale"]) {
      c.input_scale = get_positive(s["input_scale"], "sampling.input_scale");
    }
  }
  if (const YAML::Node r = root["robust"]) {
    check_keys(r, "robust",
               {"level", "fraction", "draws", "sweep", "data_kappa",
                "distributed"});
    if (r["level"]) c.robust.level = get_nonnegative(r["level"], "robust.level");
    if (r["fraction"]) {
      c.robust.fraction = get_positive(r["fraction"], "robust.fraction");
    }
    if (r["draws"]) {
      const int d = get<int>(r["draws"], "robust.draws");
      if (d < 1) fail("robust.draws", "must be at least 1");
      c.robust.draws = static_cast<std::size_t>(d);
    }
    if (r["sweep"]) c.robust.sweep = get_list(r["sweep"], "robust.sweep");
    if (r["data_kappa"]) {
      c.robust.data_kappa = get_nonnegative(r["data_kappa"], "robust.data_kappa");
    }
    if (r["distributed"]) {
      c.robust.distributed = get<bool>(r["distributed"], "robust.distributed");
    }
  }
  if (root["output"]) c.output_dir = get<std::string>(root["output"], "output");

  // Cross-field requirements.
  const bool lyapunov_kind = c.kind == ExperimentKind::kLyapunov ||
                             c.kind == ExperimentKind::kLyapunovPi ||
                             (c.kind == ExperimentKind::kGammaSweep &&
                              c.sweep_flow == "lyapunov");
  const bool lqr_kind = c.kind == ExperimentKind::kRiccati ||
                        c.kind == ExperimentKind::kRiccatiPi ||
                        c.kind == ExperimentKind::kRobustB ||
                        c.kind == ExperimentKind::kRobustNoise ||
                        (c.kind == ExperimentKind::kGammaSweep &&
                         c.sweep_flow == "riccati");
  if (lyapunov_kind && !hurwitz(c.system.A)) {
    fail("system", "Lyapunov experiments need a Hurwitz state matrix");
  }
  if (lqr_kind && m == 0) fail("system", "LQR experiments need inputs (m > 0)");
  const std::size_t needed = static_cast<std::size_t>(
      c.kind == ExperimentKind::kRobustB ? n + m : n);
  if (c.agents < needed) {
    std::ostringstream os;
    os << "must be at least " << needed << " for the rank assumption";
    fail("agents", os.str());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw ValidationError("config: cannot read '" + path + "'");
  } catch (const YAML::Exception& e) {
    throw ValidationError("config: parse error in '" + path + "': " + e.what());
  }
  if (!root.IsMap()) throw ValidationError("config: top level must be a mapping");
  for (const std::string& o : overrides) apply_override(root, o);
  return parse_config(root);
}

nlohmann::ordered_json ExperimentConfig::echo() const {
  ordered_json j;
  j["experiment"] = to_string(kind);
  j["seed"] = seed;
  j["system"] = {{"label", system_label},
                 {"n", system.n()},
                 {"m", system.m()},
                 {"A", matrix_json(system.A)},
                 {"B", matrix_json(system.B)}};
  j["agents"] = agents;
  j["graph"] = graph_json(graph);
  j["gamma"] = gammas;
  if (kind == ExperimentKind::kGammaSweep) j["sweep_flow"] = sweep_flow;
  j["Q"] = matrix_json(Q);
  j["R"] = matrix_json(R);
  j["step"] = step;
  j["horizon"] = horizon;
  j["tolerance"] = tolerance;
  ordered_json a;
  a["k_w"] = allocation.k_w;
  a["tolerance"] = allocation.tolerance;
  a["max_horizon"] = allocation.max_horizon;
  a["max_step"] = allocation.max_step;
  a["graph"] = graph_json(allocation_graph.value_or(graph));
  j["allocation"] = a;
  j["sampling"] = {{"state_scale", state_scale}, {"input_scale", input_scale}};
  if (kind == ExperimentKind::kRobustB || kind == ExperimentKind::kRobustNoise) {
    ordered_json r;
    if (robust.level) r["level"] = *robust.level;
    r["fraction"] = robust.fraction;
    r["draws"] = robust.draws;
    r["sweep"] = robust.sweep;
    r["data_kappa"] = robust.data_kappa;
    r["distributed"] = robust.distributed;
    j["robust"] = r;
  }
  return j;
}

}  // namespace ddc::experiment
