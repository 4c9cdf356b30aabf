#pragma once

#include "dmas/linalg.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dmas {

using AgentIndex = std::size_t;

/// Directed edge carrying information from `from` to `to` (so a(to, from) = weight).
struct Edge {
  AgentIndex from = 0;
  AgentIndex to = 0;
  double weight = 1.0;
};

/// Weighted communication topology. Entry a(i, j) > 0 means agent i receives
/// from agent j. Immutable once built; the diagonal is always zero.
class DirectedGraph {
 public:
  /// Throws std::invalid_argument on negative/non-finite weights, n < 2 or a
  /// non-square matrix. Diagonal entries are discarded.
  static DirectedGraph from_adjacency(const Mat& adjacency);
  static DirectedGraph from_edges(std::size_t n_agents, std::span<const Edge> edges);

  std::size_t size() const noexcept { return static_cast<std::size_t>(adjacency_.rows()); }
  const Mat& adjacency() const noexcept { return adjacency_; }
  double weight(AgentIndex to, AgentIndex from) const { return adjacency_(to, from); }

  /// h_i = sum_j a_ij.
  double in_degree(AgentIndex i) const;
  std::vector<AgentIndex> in_neighbors(AgentIndex i) const;
  std::vector<AgentIndex> out_neighbors(AgentIndex j) const;
  std::size_t edge_count() const;

 private:
  explicit DirectedGraph(Mat adjacency) : adjacency_(std::move(adjacency)) {}
  Mat adjacency_;
};

/// Spectral objects of the degree-normalized Laplacian (I + H)^{-1} (H - A).
struct GraphSpectrum {
  Mat laplacian;
  Mat normalized_laplacian;
  /// Sorted by modulus, so the zero eigenvalue comes first.
  CVec eigenvalues;
  /// Dimension of ker(L-hat); 1 exactly when the graph has a spanning tree.
  std::size_t zero_multiplicity = 0;
  /// Left eigenvector for the zero eigenvalue, nonnegative with unit sum.
  /// Empty when the zero eigenvalue is repeated.
  std::optional<Vec> left_eigvec_zero;
  /// Agents with p_i > 1e-9 * max(p); empty when left_eigvec_zero is empty.
  std::vector<AgentIndex> root_set;

  std::size_t size() const noexcept { return static_cast<std::size_t>(normalized_laplacian.rows()); }
  bool has_simple_zero() const noexcept { return left_eigvec_zero.has_value(); }
  /// Eigenvalues other than the leading zero (all of them if zero is repeated
  /// only the first is dropped).
  std::vector<Complex> nonzero_eigenvalues() const;
  /// Smallest real part among nonzero_eigenvalues().
  double min_nonzero_real_part() const;
  bool is_root(AgentIndex i) const;
  /// Throws NumericalError when the left eigenvector is undefined.
  const Vec& left_eigvec() const;
};

inline constexpr double kRootThreshold = 1e-9;

GraphSpectrum normalized_laplacian(const DirectedGraph& g);

/// Some node reaches every other node along directed information paths.
bool has_spanning_tree(const DirectedGraph& g);

/// A directed information path leads from `from_agent` to `to_agent`. Every
/// agent reaches itself. Throws std::out_of_range on bad indices.
bool is_reachable(const DirectedGraph& g, AgentIndex from_agent, AgentIndex to_agent);

/// All agents reachable from `source` (including itself), ascending.
std::vector<AgentIndex> reachable_set(const DirectedGraph& g, AgentIndex source);

}  // namespace dmas
