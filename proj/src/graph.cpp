#include "dmas/graph.hpp"

#include "dmas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

namespace dmas {

DirectedGraph DirectedGraph::from_adjacency(const Mat& adjacency) {
  if (adjacency.rows() != adjacency.cols()) throw std::invalid_argument("adjacency matrix must be square");
  if (adjacency.rows() < 2) throw std::invalid_argument("a graph needs at least 2 agents");
  Mat a = adjacency;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (!std::isfinite(a(i, j)) || a(i, j) < 0.0)
        throw std::invalid_argument("adjacency weights must be finite and nonnegative (entry " +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
    }
    a(i, i) = 0.0;
  }
  return DirectedGraph(std::move(a));
}

DirectedGraph DirectedGraph::from_edges(std::size_t n_agents, std::span<const Edge> edges) {
  if (n_agents < 2) throw std::invalid_argument("a graph needs at least 2 agents");
  const auto n = static_cast<Eigen::Index>(n_agents);
  Mat a = Mat::Zero(n, n);
  for (const Edge& e : edges) {
    if (e.from >= n_agents || e.to >= n_agents)
      throw std::out_of_range("edge " + std::to_string(e.from) + "->" + std::to_string(e.to) +
                              " references an agent outside [0, " + std::to_string(n_agents) + ")");
    if (e.from == e.to) continue;
    a(static_cast<Eigen::Index>(e.to), static_cast<Eigen::Index>(e.from)) = e.weight;
  }
  return from_adjacency(a);
}

double DirectedGraph::in_degree(AgentIndex i) const {
  return adjacency_.row(static_cast<Eigen::Index>(i)).sum();
}

std::vector<AgentIndex> DirectedGraph::in_neighbors(AgentIndex i) const {
  std::vector<AgentIndex> out;
  for (Eigen::Index j = 0; j < adjacency_.cols(); ++j)
    if (adjacency_(static_cast<Eigen::Index>(i), j) > 0.0) out.push_back(static_cast<AgentIndex>(j));
  return out;
}

std::vector<AgentIndex> DirectedGraph::out_neighbors(AgentIndex j) const {
  std::vector<AgentIndex> out;
  for (Eigen::Index i = 0; i < adjacency_.rows(); ++i)
    if (adjacency_(i, static_cast<Eigen::Index>(j)) > 0.0) out.push_back(static_cast<AgentIndex>(i));
  return out;
}

std::size_t DirectedGraph::edge_count() const {
  return static_cast<std::size_t>((adjacency_.array() > 0.0).count());
}

std::vector<Complex> GraphSpectrum::nonzero_eigenvalues() const {
  std::vector<Complex> out;
  for (Eigen::Index i = 1; i < eigenvalues.size(); ++i) out.push_back(eigenvalues[i]);
  return out;
}

double GraphSpectrum::min_nonzero_real_part() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const Complex& l : nonzero_eigenvalues()) lo = std::min(lo, l.real());
  return lo;
}

bool GraphSpectrum::is_root(AgentIndex i) const {
  return std::find(root_set.begin(), root_set.end(), i) != root_set.end();
}

const Vec& GraphSpectrum::left_eigvec() const {
  if (!left_eigvec_zero)
    throw NumericalError("zero eigenvalue of the normalized Laplacian is repeated; the graph has no spanning tree");
  return *left_eigvec_zero;
}

GraphSpectrum normalized_laplacian(const DirectedGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  GraphSpectrum s;
  const Vec h = g.adjacency().rowwise().sum();
  s.laplacian = Mat(h.asDiagonal()) - g.adjacency();
  s.normalized_laplacian = (Vec::Ones(n) + h).cwiseInverse().asDiagonal() * s.laplacian;

  CVec ev = eigenvalues(s.normalized_laplacian);
  std::vector<Complex> sorted(ev.data(), ev.data() + ev.size());
  std::stable_sort(sorted.begin(), sorted.end(), [](const Complex& a, const Complex& b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  s.eigenvalues = Eigen::Map<CVec>(sorted.data(), n);

  // ker(L-hat^T) from the SVD; structurally-zero singular values come out at
  // round-off level, well below the 1e-10 cut.
  Eigen::JacobiSVD<Mat> svd(s.normalized_laplacian.transpose(), Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  const double cut = 1e-10 * std::max(1.0, sv.size() ? sv[0] : 0.0);
  s.zero_multiplicity = static_cast<std::size_t>((sv.array() <= cut).count());
  if (s.zero_multiplicity != 1) return s;

  Vec r = svd.matrixV().col(n - 1);
  r /= r.sum();
  const double cutoff = kRootThreshold * r.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (r[i] > cutoff) {
      s.root_set.push_back(static_cast<AgentIndex>(i));
    } else {
      r[i] = 0.0;
    }
  }
  r /= r.sum();
  s.left_eigvec_zero = std::move(r);
  return s;
}

std::vector<AgentIndex> reachable_set(const DirectedGraph& g, AgentIndex source) {
  if (source >= g.size()) throw std::out_of_range("agent index " + std::to_string(source) + " out of range");
  std::vector<bool> seen(g.size(), false);
  std::deque<AgentIndex> queue{source};
  seen[source] = true;
  while (!queue.empty()) {
    const AgentIndex j = queue.front();
    queue.pop_front();
    for (AgentIndex i : g.out_neighbors(j)) {
      if (!seen[i]) {
        seen[i] = true;
        queue.push_back(i);
      }
    }
  }
  std::vector<AgentIndex> out;
  for (AgentIndex i = 0; i < g.size(); ++i)
    if (seen[i]) out.push_back(i);
  return out;
}

bool is_reachable(const DirectedGraph& g, AgentIndex from_agent, AgentIndex to_agent) {
  if (to_agent >= g.size()) throw std::out_of_range("agent index " + std::to_string(to_agent) + " out of range");
  const auto reach = reachable_set(g, from_agent);
  return std::binary_search(reach.begin(), reach.end(), to_agent);
}

bool has_spanning_tree(const DirectedGraph& g) {
  for (AgentIndex root = 0; root < g.size(); ++root)
    if (reachable_set(g, root).size() == g.size()) return true;
  return false;
}

}  // namespace dmas
