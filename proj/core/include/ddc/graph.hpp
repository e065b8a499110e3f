#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "ddc/numerics.hpp"

namespace ddc {

/// Undirected, unweighted communication graph over agents 0..N-1. Edges are
/// stored once as (i, j) with i < j, sorted; neighbour lists are ascending so
/// that neighbour sums have a fixed accumulation order.
class CommGraph {
 public:
  CommGraph() = default;
  /// Throws ValidationError on self loops, out-of-range indices or N == 0.
  /// Duplicate edges (in either orientation) are merged.
  CommGraph(std::size_t agents,
            std::vector<std::pair<std::size_t, std::size_t>> edges);

  std::size_t agents() const { return agents_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const {
    return edges_;
  }
  const std::vector<std::size_t>& neighbors(std::size_t i) const {
    return neighbors_[i];
  }
  bool connected() const;

 private:
  std::size_t agents_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<std::vector<std::size_t>> neighbors_;
};

enum class GraphKind { kRing, kPath, kComplete, kStar, kRandom };

struct GraphSpec {
  GraphKind kind = GraphKind::kRing;
  double edge_probability = 0.5;  // kRandom only
  std::uint64_t seed = 0;         // kRandom only
};

/// Builds a connected graph on N >= 2 agents. Random (Erdos-Renyi) graphs are
/// redrawn from the same stream until connected.
CommGraph make_graph(const GraphSpec& spec, std::size_t agents);

/// L = D - Adj. Throws ValidationError for a disconnected graph.
Matrix laplacian(const CommGraph& g);

/// L = U Gamma U^T restricted to the positive eigenvalues.
struct SpectralSplit {
  Vector gamma;  // N-1 positive eigenvalues, ascending
  Matrix U;      // N x (N-1), orthonormal columns orthogonal to 1
};

/// Deterministic decomposition: eigenvalues ascending; within a repeated
/// eigenvalue the basis is fixed by Gram-Schmidt on the projected canonical
/// vectors e_1, e_2, ...; each column's first nonzero entry is positive.
/// Throws ValidationError if zero is not a simple eigenvalue.
SpectralSplit spectral_split(const Matrix& L);

}  // namespace ddc
