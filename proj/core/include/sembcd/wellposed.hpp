#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sembcd/graph.hpp"

namespace sembcd {

/// Node-capacitated unit-arc flow network deciding the half-collider path
/// condition at one node. Vertices: source, sink, b(j) for each j in C (the nodes
/// with a bi-directed path to i), bottleneck q(j) for j in C \ pa(i) that are also
/// parents of C, and duplicates d(j) for j in pa(C) \ (pa(i) u {i}).
struct FlowNetwork {
  int n_vertices = 0;
  int source = -1;
  int sink = -1;
  std::vector<std::pair<int, int>> arcs;  // unit capacities
  std::vector<int> node_cap;              // per-vertex capacity
  int required = 0;                       // |sib(i)|

  // Graph-node -> network-vertex maps (-1 when the vertex does not exist).
  std::vector<int> b_node;
  std::vector<int> q_node;
  std::vector<int> d_node;
};

FlowNetwork build_flow_network(const MixedGraph& g, NodeId i);

/// Maximum source-sink flow respecting node and arc capacities; node capacities
/// are enforced by the standard in/out node-splitting transform.
int max_flow(const FlowNetwork& net);

/// Well-posedness condition at node i: either pa(i) and sib(i) are disjoint
/// (trivially satisfied by empty paths at the siblings), or the flow network
/// carries |sib(i)| units.
bool half_collider_condition(const MixedGraph& g, NodeId i);

struct WellPosedReport {
  struct PerNode {
    NodeId node = -1;
    bool ok = false;
    int flow = 0;
    int required = 0;
  };
  std::vector<PerNode> per_node;
  bool overall = true;
  std::string warning;  // non-identifiability warning when overall is false
};

WellPosedReport is_well_posed(const MixedGraph& g);

/// Exhaustive oracle for the same condition: enumerates systems of half-collider
/// paths with pairwise-disjoint bi-directed portions directly. |V| <= 8.
bool brute_force_condition(const MixedGraph& g, NodeId i);

}  // namespace sembcd
