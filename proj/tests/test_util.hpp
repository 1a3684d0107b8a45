#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sembcd/graph.hpp"
#include "sembcd/likelihood.hpp"
#include "sembcd/rng.hpp"

namespace sembcd::test {

// Running 6-node example: chain 1->2->3->4->5->6 plus 4->2 closing a cycle,
// bi-directed 2<->5 and 3<->5 (described 1-based, stored 0-based).
inline MixedGraph example_graph() {
  return MixedGraph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {3, 1}, {4, 5}}, {{1, 4}, {2, 4}});
}

// Arbitrary random mixed graph: independent coin per ordered pair for directed
// edges (so 2-cycles and bows happen), per unordered pair for bi-directed.
inline MixedGraph random_mixed_graph(int n, double p_dir, double p_bi, Rng& rng) {
  std::vector<Edge> dir;
  std::vector<Edge> bi;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && rng.uniform() < p_dir) dir.emplace_back(i, j);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.uniform() < p_bi) bi.emplace_back(i, j);
    }
  }
  return MixedGraph(n, std::move(dir), std::move(bi));
}

inline Eigen::MatrixXd random_b_matrix(const MixedGraph& g, double scale, Rng& rng) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(g.n_nodes(), g.n_nodes());
  for (const auto& [t, h] : g.directed_edges()) B(h, t) = scale * rng.normal();
  return B;
}

// Kahn's algorithm; independent route for the "acyclic iff topological order" check.
inline bool topological_order_exists(const MixedGraph& g) {
  const int n = g.n_nodes();
  std::vector<int> indeg(n, 0);
  for (const auto& [t, h] : g.directed_edges()) ++indeg[h];
  std::vector<NodeId> queue;
  for (int v = 0; v < n; ++v) {
    if (indeg[v] == 0) queue.push_back(v);
  }
  int seen = 0;
  while (!queue.empty()) {
    NodeId v = queue.back();
    queue.pop_back();
    ++seen;
    for (NodeId w : g.children(v)) {
      if (--indeg[w] == 0) queue.push_back(w);
    }
  }
  return seen == n;
}

// All simple directed cycles, each rooted at its smallest node; returns lengths.
inline std::vector<int> simple_cycle_lengths(const MixedGraph& g) {
  std::vector<int> lengths;
  const int n = g.n_nodes();
  std::vector<bool> on_path(n, false);
  std::vector<NodeId> path;

  auto dfs = [&](auto&& self, NodeId root, NodeId cur) -> void {
    for (NodeId next : g.children(cur)) {
      if (next == root && path.size() >= 2) {
        lengths.push_back(static_cast<int>(path.size()));
      } else if (next > root && !on_path[next]) {
        on_path[next] = true;
        path.push_back(next);
        self(self, root, next);
        path.pop_back();
        on_path[next] = false;
      }
    }
  };

  for (NodeId root = 0; root < n; ++root) {
    path.assign(1, root);
    on_path.assign(n, false);
    on_path[root] = true;
    dfs(dfs, root, root);
  }
  return lengths;
}

}  // namespace sembcd::test
