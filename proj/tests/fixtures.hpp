#pragma once

#include "dmas/control_design.hpp"
#include "dmas/graph.hpp"
#include "dmas/lti.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <vector>

namespace fixtures {

using dmas::Edge;
using dmas::Mat;
using dmas::Vec;

// 4 agents: 1 -> 0, 0 -> 1, 1 -> 2, 0 -> 3 (from -> to), unit weights.
inline dmas::DirectedGraph four_agent_graph() {
  const std::array<Edge, 4> e{{{1, 0, 1.0}, {0, 1, 1.0}, {1, 2, 1.0}, {0, 3, 1.0}}};
  return dmas::DirectedGraph::from_edges(4, e);
}

// agent 1 is the only root; 2 feeds 3 and 4.
inline dmas::DirectedGraph five_agent_graph() {
  const std::array<Edge, 5> e{{{1, 0, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {2, 4, 1.0}, {3, 4, 1.0}}};
  return dmas::DirectedGraph::from_edges(5, e);
}

inline dmas::LtiModel single_integrator() { return dmas::LtiModel(Mat::Ones(1, 1), Mat::Ones(1, 1)); }

inline dmas::LtiModel rotation() {
  Mat A(2, 2), B(2, 1);
  A << 0, -1, 1, 0;
  B << 0, 1;
  return dmas::LtiModel(A, B);
}

inline dmas::ControllerConfig unit_gain(const dmas::LtiModel& model, const dmas::GraphSpectrum& s, double theta = 0.5) {
  dmas::DesignRequest req;
  req.Q1 = Mat::Identity(1, 1);
  req.R1 = Mat::Identity(1, 1);
  req.K = Mat::Ones(1, 1);
  req.c = 1.0;
  req.theta = theta;
  return dmas::make_controller(model, s, req);
}

// Random digraph with a spanning tree: a random tree rooted at a random
// node plus extra edges with probability p.
inline dmas::DirectedGraph random_spanning_digraph(std::mt19937_64& rng, std::size_t n, double p) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  Mat a = Mat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 1; k < n; ++k) {
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    a(static_cast<Eigen::Index>(order[k]), static_cast<Eigen::Index>(order[pick(rng)])) = 1.0;
  }
  std::bernoulli_distribution extra(p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && extra(rng)) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
  return dmas::DirectedGraph::from_adjacency(a);
}

// Plain BFS over edges j -> i (a_ij > 0), written independently of the library.
inline std::vector<bool> bfs_from(const Mat& adj, std::size_t src) {
  const auto n = static_cast<std::size_t>(adj.rows());
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> queue{src};
  seen[src] = true;
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const std::size_t j = queue[q];
    for (std::size_t i = 0; i < n; ++i)
      if (!seen[i] && adj(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0) {
        seen[i] = true;
        queue.push_back(i);
      }
  }
  return seen;
}

// Roots per reachability: nodes that reach every node.
inline std::vector<bool> root_oracle(const Mat& adj) {
  const auto n = static_cast<std::size_t>(adj.rows());
  std::vector<bool> root(n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto seen = bfs_from(adj, s);
    root[s] = std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  }
  return root;
}

// Left null vector of Lhat by a dense least-squares solve of [Lhat^T; 1^T] r = [0; 1].
inline Vec left_null_oracle(const Mat& lhat) {
  const auto n = lhat.rows();
  Mat M(n + 1, n);
  M << lhat.transpose(), Mat::Ones(1, n);
  Vec rhs = Vec::Zero(n + 1);
  rhs(n) = 1.0;
  return M.householderQr().solve(rhs);
}

}  // namespace fixtures
