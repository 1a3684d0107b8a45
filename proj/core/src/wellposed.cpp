#include "sembcd/wellposed.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <set>

namespace sembcd {

namespace {

// Nodes with a bi-directed path to i (excluding i itself).
std::vector<bool> bidirected_reachable(const MixedGraph& g, NodeId i) {
  std::vector<bool> seen(g.n_nodes(), false);
  std::deque<NodeId> queue{i};
  seen[i] = true;
  while (!queue.empty()) {
    NodeId v = queue.front();
    queue.pop_front();
    for (NodeId w : g.siblings(v)) {
      if (!seen[w]) {
        seen[w] = true;
        queue.push_back(w);
      }
    }
  }
  seen[i] = false;
  return seen;
}

bool intersects(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  // both sorted
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia == *ib) return true;
    (*ia < *ib) ? ++ia : ++ib;
  }
  return false;
}

}  // namespace

FlowNetwork build_flow_network(const MixedGraph& g, NodeId i) {
  const int n = g.n_nodes();
  if (i < 0 || i >= n) throw std::out_of_range("build_flow_network: node out of range");

  FlowNetwork net;
  net.required = static_cast<int>(g.siblings(i).size());
  net.b_node.assign(n, -1);
  net.q_node.assign(n, -1);
  net.d_node.assign(n, -1);

  const std::vector<bool> in_c = bidirected_reachable(g, i);
  std::vector<bool> is_parent_of_i(n, false);
  for (NodeId p : g.parents(i)) is_parent_of_i[p] = true;

  // pa(C): nodes with a directed edge into C.
  std::vector<bool> in_pa_c(n, false);
  for (int j = 0; j < n; ++j) {
    if (!in_c[j]) continue;
    for (NodeId p : g.parents(j)) in_pa_c[p] = true;
  }

  net.source = 0;
  net.sink = 1;
  int next = 2;
  for (int j = 0; j < n; ++j) {
    if (in_c[j]) net.b_node[j] = next++;
  }
  for (int j = 0; j < n; ++j) {
    if (in_c[j] && !is_parent_of_i[j] && in_pa_c[j]) net.q_node[j] = next++;
  }
  for (int j = 0; j < n; ++j) {
    if (in_pa_c[j] && !is_parent_of_i[j] && j != i) net.d_node[j] = next++;
  }
  net.n_vertices = next;
  net.node_cap.assign(net.n_vertices, 1);
  net.node_cap[net.source] = net.required;
  net.node_cap[net.sink] = net.required;

  for (const auto& [a, b] : g.bidirected_edges()) {
    if (in_c[a] && in_c[b]) {
      net.arcs.emplace_back(net.b_node[a], net.b_node[b]);
      net.arcs.emplace_back(net.b_node[b], net.b_node[a]);
    }
  }
  for (int j = 0; j < n; ++j) {
    if (in_c[j] && !is_parent_of_i[j]) {
      if (net.q_node[j] != -1) {
        net.arcs.emplace_back(net.source, net.q_node[j]);
        net.arcs.emplace_back(net.q_node[j], net.b_node[j]);
      } else {
        net.arcs.emplace_back(net.source, net.b_node[j]);
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    if (net.d_node[j] == -1) continue;
    for (NodeId m : g.children(j)) {
      if (in_c[m]) net.arcs.emplace_back(net.d_node[j], net.b_node[m]);
    }
    if (in_c[j]) {
      net.arcs.emplace_back(net.q_node[j], net.d_node[j]);
    } else {
      net.arcs.emplace_back(net.source, net.d_node[j]);
    }
  }
  for (NodeId s : g.siblings(i)) {
    net.arcs.emplace_back(net.b_node[s], net.sink);
  }
  return net;
}

namespace {

struct ResidualGraph {
  struct Arc {
    int to;
    int cap;
    int rev;
  };
  std::vector<std::vector<Arc>> adj;

  explicit ResidualGraph(int n) : adj(n) {}

  void add_arc(int u, int v, int cap) {
    adj[u].push_back({v, cap, static_cast<int>(adj[v].size())});
    adj[v].push_back({u, 0, static_cast<int>(adj[u].size()) - 1});
  }
};

}  // namespace

int max_flow(const FlowNetwork& net) {
  // Node splitting: vertex v becomes v_in = 2v, v_out = 2v + 1 joined by an arc of
  // the node capacity; original arcs run u_out -> v_in with unit capacity.
  const int n = 2 * net.n_vertices;
  ResidualGraph rg(n);
  for (int v = 0; v < net.n_vertices; ++v) {
    rg.add_arc(2 * v, 2 * v + 1, net.node_cap[v]);
  }
  for (const auto& [u, v] : net.arcs) {
    rg.add_arc(2 * u + 1, 2 * v, 1);
  }
  const int s = 2 * net.source;
  const int t = 2 * net.sink + 1;

  int flow = 0;
  while (true) {
    // BFS for a shortest augmenting path.
    std::vector<std::pair<int, int>> pred(n, {-1, -1});  // (vertex, arc index)
    std::deque<int> queue{s};
    pred[s] = {s, -1};
    while (!queue.empty() && pred[t].first == -1) {
      int u = queue.front();
      queue.pop_front();
      for (std::size_t k = 0; k < rg.adj[u].size(); ++k) {
        const auto& arc = rg.adj[u][k];
        if (arc.cap > 0 && pred[arc.to].first == -1) {
          pred[arc.to] = {u, static_cast<int>(k)};
          queue.push_back(arc.to);
        }
      }
    }
    if (pred[t].first == -1) break;
    int bottleneck = std::numeric_limits<int>::max();
    for (int v = t; v != s;) {
      auto [u, k] = pred[v];
      bottleneck = std::min(bottleneck, rg.adj[u][k].cap);
      v = u;
    }
    for (int v = t; v != s;) {
      auto [u, k] = pred[v];
      auto& arc = rg.adj[u][k];
      arc.cap -= bottleneck;
      rg.adj[arc.to][arc.rev].cap += bottleneck;
      v = u;
    }
    flow += bottleneck;
  }
  return flow;
}

bool half_collider_condition(const MixedGraph& g, NodeId i) {
  if (!intersects(g.parents(i), g.siblings(i))) return true;
  FlowNetwork net = build_flow_network(g, i);
  return max_flow(net) == net.required;
}

WellPosedReport is_well_posed(const MixedGraph& g) {
  WellPosedReport rep;
  for (NodeId i = 0; i < g.n_nodes(); ++i) {
    WellPosedReport::PerNode pn;
    pn.node = i;
    pn.required = static_cast<int>(g.siblings(i).size());
    if (pn.required == 0) {
      pn.flow = 0;
      pn.ok = true;
    } else {
      FlowNetwork net = build_flow_network(g, i);
      pn.flow = max_flow(net);
      pn.ok = pn.flow == pn.required || !intersects(g.parents(i), g.siblings(i));
    }
    rep.overall = rep.overall && pn.ok;
    rep.per_node.push_back(pn);
  }
  if (!rep.overall) {
    rep.warning =
        "block updates are not generically unique at the flagged nodes; "
        "the model parameters are not identifiable";
  }
  return rep;
}

namespace {

// Candidate half-collider path for one sibling: a start node plus the bitmask of
// its bi-directed portion.
struct PathCandidate {
  NodeId start;
  unsigned portion;
};

void enumerate_candidates(const MixedGraph& g, NodeId i, NodeId sib_end,
                          std::vector<PathCandidate>& out) {
  std::set<std::pair<NodeId, unsigned>> dedup;
  std::vector<bool> avoid_start(g.n_nodes(), false);
  for (NodeId p : g.parents(i)) avoid_start[p] = true;
  avoid_start[i] = true;

  // DFS over simple bi-directed paths in G_{-i} read backwards from the sibling;
  // `front` is the node the path starts at.
  std::vector<NodeId> path{sib_end};
  unsigned mask = 1u << sib_end;
  auto emit = [&](NodeId front, unsigned portion) {
    if (!avoid_start[front] && dedup.insert({front, portion}).second) {
      out.push_back({front, portion});
    }
    // Optional leading directed edge v -> front; v may itself lie on the portion.
    for (NodeId v = 0; v < g.n_nodes(); ++v) {
      if (v != i && !avoid_start[v] && g.has_directed(v, front) &&
          dedup.insert({v, portion}).second) {
        out.push_back({v, portion});
      }
    }
  };

  std::function<void()> dfs = [&]() {
    emit(path.back(), mask);
    for (NodeId w : g.siblings(path.back())) {
      if (w == i || (mask & (1u << w))) continue;
      path.push_back(w);
      mask |= 1u << w;
      dfs();
      mask &= ~(1u << w);
      path.pop_back();
    }
  };
  dfs();
}

bool assign_paths(const std::vector<std::vector<PathCandidate>>& candidates, std::size_t idx,
                  unsigned used_portions, unsigned used_starts) {
  if (idx == candidates.size()) return true;
  for (const PathCandidate& c : candidates[idx]) {
    if ((c.portion & used_portions) || (used_starts & (1u << c.start))) continue;
    if (assign_paths(candidates, idx + 1, used_portions | c.portion,
                     used_starts | (1u << c.start))) {
      return true;
    }
  }
  return false;
}

}  // namespace

bool brute_force_condition(const MixedGraph& g, NodeId i) {
  if (g.n_nodes() > 8) {
    throw SizeLimitError("brute_force_condition: limited to graphs with at most 8 nodes");
  }
  const auto& sib = g.siblings(i);
  if (sib.empty()) return true;

  std::vector<std::vector<PathCandidate>> candidates(sib.size());
  for (std::size_t k = 0; k < sib.size(); ++k) {
    enumerate_candidates(g, i, sib[k], candidates[k]);
    if (candidates[k].empty()) return false;
  }
  return assign_paths(candidates, 0, 0u, 0u);
}

}  // namespace sembcd
