#include "ddc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ddc/errors.hpp"
#include "ddc/random.hpp"

namespace ddc {

CommGraph::CommGraph(std::size_t agents,
                     std::vector<std::pair<std::size_t, std::size_t>> edges)
    : agents_(agents), neighbors_(agents) {
  if (agents == 0) throw ValidationError("CommGraph: need at least one agent");
  for (auto& [a, b] : edges) {
    if (a >= agents || b >= agents) {
      std::ostringstream os;
      os << "CommGraph: edge (" << a << ", " << b << ") out of range for "
         << agents << " agents";
      throw ValidationError(os.str());
    }
    if (a == b) throw ValidationError("CommGraph: self loops are not allowed");
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);
  for (const auto& [a, b] : edges_) {
    neighbors_[a].push_back(b);
    neighbors_[b].push_back(a);
  }
  for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
}

bool CommGraph::connected() const {
  if (agents_ == 0) return false;
  std::vector<bool> seen(agents_, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t j : neighbors_[i]) {
      if (!seen[j]) {
        seen[j] = true;
        ++count;
        stack.push_back(j);
      }
    }
  }
  return count == agents_;
}

CommGraph make_graph(const GraphSpec& spec, std::size_t agents) {
  if (agents < 2) {
    throw ValidationError("make_graph: need at least 2 agents");
  }
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  switch (spec.kind) {
    case GraphKind::kRing:
      for (std::size_t i = 0; i < agents; ++i)
        edges.emplace_back(i, (i + 1) % agents);
      break;
    case GraphKind::kPath:
      for (std::size_t i = 0; i + 1 < agents; ++i) edges.emplace_back(i, i + 1);
      break;
    case GraphKind::kComplete:
      for (std::size_t i = 0; i < agents; ++i)
        for (std::size_t j = i + 1; j < agents; ++j) edges.emplace_back(i, j);
      break;
    case GraphKind::kStar:
      for (std::size_t i = 1; i < agents; ++i) edges.emplace_back(0, i);
      break;
    case GraphKind::kRandom: {
      if (!(spec.edge_probability > 0.0 && spec.edge_probability <= 1.0)) {
        throw ValidationError("make_graph: edge probability must be in (0, 1]");
      }
      Rng rng(spec.seed);
      for (int attempt = 0; attempt < 10000; ++attempt) {
        edges.clear();
        for (std::size_t i = 0; i < agents; ++i)
          for (std::size_t j = i + 1; j < agents; ++j)
            if (rng.uniform01() < spec.edge_probability)
              edges.emplace_back(i, j);
        CommGraph g(agents, edges);
        if (g.connected()) return g;
      }
      throw ValidationError(
          "make_graph: no connected random graph found; raise the edge "
          "probability");
    }
  }
  return CommGraph(agents, std::move(edges));
}

Matrix laplacian(const CommGraph& g) {
  if (!g.connected()) {
    throw ValidationError("laplacian: communication graph is disconnected");
  }
  const auto n = static_cast<Eigen::Index>(g.agents());
  // Integer assembly so that row sums are exactly zero.
  Eigen::MatrixXi L = Eigen::MatrixXi::Zero(n, n);
  for (const auto& [a, b] : g.edges()) {
    const auto i = static_cast<Eigen::Index>(a);
    const auto j = static_cast<Eigen::Index>(b);
    L(i, j) -= 1;
    L(j, i) -= 1;
    L(i, i) += 1;
    L(j, j) += 1;
  }
  return L.cast<double>();
}

SpectralSplit spectral_split(const Matrix& L) {
  const Eigen::Index n = L.rows();
  if (n == 0 || L.cols() != n) {
    throw ValidationError("spectral_split: Laplacian must be square");
  }
  if (!L.isApprox(L.transpose()) || !L.allFinite()) {
    throw ValidationError("spectral_split: Laplacian must be symmetric");
  }
  SpectralSplit split;
  split.gamma.resize(n - 1);
  split.U.resize(n, n - 1);
  if (n == 1) return split;

  Eigen::SelfAdjointEigenSolver<Matrix> es(L);
  const Vector& ev = es.eigenvalues();
  const Matrix& V = es.eigenvectors();
  const double scale = std::max(1.0, std::abs(ev(n - 1)));
  const double zero_tol = 1e-9 * scale;
  if (std::abs(ev(0)) > zero_tol) {
    throw ValidationError("spectral_split: matrix has no zero eigenvalue");
  }
  if (ev(1) <= zero_tol) {
    throw ValidationError(
        "spectral_split: zero eigenvalue is repeated (graph is disconnected)");
  }

  // Group numerically repeated eigenvalues and fix a canonical basis for
  // each eigenspace.
  const double group_tol = 1e-9 * scale;
  Eigen::Index col = 0;
  Eigen::Index start = 1;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && ev(stop) - ev(stop - 1) <= group_tol) ++stop;
    const Eigen::Index mult = stop - start;
    const Matrix basis = V.middleCols(start, mult);

    Matrix chosen(n, mult);
    Eigen::Index found = 0;
    if (mult == 1) {
      chosen.col(0) = basis.col(0);
      found = 1;
    } else {
      const Matrix projector = basis * basis.transpose();
      for (Eigen::Index k = 0; k < n && found < mult; ++k) {
        Vector candidate = projector.col(k);
        for (Eigen::Index c = 0; c < found; ++c) {
          candidate -= chosen.col(c).dot(candidate) * chosen.col(c);
        }
        const double norm = candidate.norm();
        if (norm > 1e-6) chosen.col(found++) = candidate / norm;
      }
    }
    for (Eigen::Index c = 0; c < found; ++c) {
      Vector u = chosen.col(c);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(u(i)) > 1e-12) {
          if (u(i) < 0) u = -u;
          break;
        }
      }
      split.U.col(col) = u;
      split.gamma(col) = u.dot(L * u);
      ++col;
    }
    start = stop;
  }
  return split;
}

}  // namespace ddc
