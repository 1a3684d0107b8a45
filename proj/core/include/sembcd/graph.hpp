#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sembcd/errors.hpp"

namespace sembcd {

using NodeId = int;
using Edge = std::pair<NodeId, NodeId>;

/// Mixed graph with directed edges (tail, head) and bi-directed edges {a, b}.
/// Immutable after construction; safe to share across threads.
class MixedGraph {
 public:
  MixedGraph(int n_nodes, std::vector<Edge> directed, std::vector<Edge> bidirected);

  /// Parses the JSON encoding {"n": ..., "directed": [[t,h],...], "bidirected": [[a,b],...]}
  /// with 0-based indices. Rejects self-loops, out-of-range indices and duplicate edges.
  static MixedGraph from_json_text(const std::string& text);
  static MixedGraph load(const std::string& path);

  std::string to_json_text(int indent = 2) const;

  int n_nodes() const { return n_; }
  int n_directed() const { return static_cast<int>(directed_.size()); }
  int n_bidirected() const { return static_cast<int>(bidirected_.size()); }

  /// { j : j -> i }
  const std::vector<NodeId>& parents(NodeId i) const;
  /// { j : j <-> i }
  const std::vector<NodeId>& siblings(NodeId i) const;
  /// { j : i -> j }
  const std::vector<NodeId>& children(NodeId i) const;

  bool has_directed(NodeId tail, NodeId head) const;
  bool has_bidirected(NodeId a, NodeId b) const;

  /// Edges in sorted (tail, head) order; this is the canonical free-parameter order for B.
  const std::vector<Edge>& directed_edges() const { return directed_; }
  /// Edges with a < b, sorted; canonical free-parameter order for the off-diagonal of Omega.
  const std::vector<Edge>& bidirected_edges() const { return bidirected_; }

  /// Strongly connected component id of each node (directed part only).
  const std::vector<int>& scc_ids() const { return scc_id_; }
  bool node_on_cycle(NodeId i) const;
  /// True iff tail -> head lies on some directed cycle, i.e. both ends share a
  /// nontrivial strongly connected component.
  bool directed_edge_on_cycle(NodeId tail, NodeId head) const;

 private:
  void check_node(NodeId i) const;

  int n_;
  std::vector<Edge> directed_;
  std::vector<Edge> bidirected_;
  std::vector<std::vector<NodeId>> parents_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<std::vector<NodeId>> siblings_;
  std::vector<int> scc_id_;
  std::vector<int> scc_size_;
};

/// Nodes lying on at least one directed cycle; empty iff the directed part is acyclic.
std::vector<NodeId> nodes_on_cycles(const MixedGraph& g);

/// True iff every unordered node pair carries at most one edge, counting directed
/// edges of either orientation and bi-directed edges together.
bool is_simple(const MixedGraph& g);

/// Fitting schedule: one_shot nodes have no siblings and no incoming edge on a
/// directed cycle; their block update never changes after the first sweep.
struct NodeSchedule {
  std::vector<NodeId> one_shot;
  std::vector<NodeId> iterative;
};

NodeSchedule classify_nodes(const MixedGraph& g);

}  // namespace sembcd
