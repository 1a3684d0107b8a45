#include <doctest.h>

#include <algorithm>

#include "sembcd/graph.hpp"
#include "test_util.hpp"

using namespace sembcd;
using test::example_graph;

TEST_CASE("parents and siblings") {
  MixedGraph g = example_graph();
  CHECK(g.parents(1) == std::vector<NodeId>{0, 3});
  CHECK(g.siblings(4) == std::vector<NodeId>{1, 2});
  CHECK(g.parents(0).empty());

  MixedGraph empty(4, {}, {});
  for (NodeId i = 0; i < 4; ++i) {
    CHECK(empty.parents(i).empty());
    CHECK(empty.siblings(i).empty());
  }

  MixedGraph two_cycle(2, {{0, 1}, {1, 0}}, {});
  CHECK(two_cycle.parents(0) == std::vector<NodeId>{1});

  MixedGraph bi(2, {}, {{0, 1}});
  CHECK(bi.siblings(1) == std::vector<NodeId>{0});
  CHECK(bi.siblings(0) == std::vector<NodeId>{1});

  CHECK_THROWS_AS((void)g.parents(6), std::out_of_range);
  CHECK_THROWS_AS((void)g.siblings(-1), std::out_of_range);
}

TEST_CASE("nodes_on_cycles") {
  CHECK(nodes_on_cycles(example_graph()) == std::vector<NodeId>{1, 2, 3});

  MixedGraph dag(5, {{0, 1}, {1, 2}, {0, 3}, {3, 4}}, {{1, 4}});
  CHECK(nodes_on_cycles(dag).empty());

  MixedGraph g3(3, {{0, 1}, {1, 0}, {1, 2}}, {});
  CHECK(nodes_on_cycles(g3) == std::vector<NodeId>{0, 1});
}

TEST_CASE("is_simple") {
  CHECK(is_simple(example_graph()));
  CHECK_FALSE(is_simple(MixedGraph(2, {{0, 1}}, {{0, 1}})));
  CHECK_FALSE(is_simple(MixedGraph(2, {{0, 1}, {1, 0}}, {})));
}

TEST_CASE("classify_nodes") {
  NodeSchedule s = classify_nodes(example_graph());
  // in 1-based labels: node 4's only incoming edge 3->4 lies on the cycle
  // 2->3->4->2, so only nodes 1 and 6 are one-shot
  CHECK(s.one_shot == std::vector<NodeId>{0, 5});
  CHECK(s.iterative == std::vector<NodeId>{1, 2, 3, 4});

  NodeSchedule dag = classify_nodes(MixedGraph(4, {{0, 1}, {1, 2}, {2, 3}}, {}));
  CHECK(dag.one_shot.size() == 4);
  CHECK(dag.iterative.empty());

  NodeSchedule tc = classify_nodes(MixedGraph(2, {{0, 1}, {1, 0}}, {}));
  CHECK(tc.one_shot.empty());
  CHECK(tc.iterative.size() == 2);
}

TEST_CASE("graph properties on random graphs") {
  Rng rng(20240517);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform_index(7));
    MixedGraph g = test::random_mixed_graph(n, 0.25, 0.2, rng);

    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j : g.parents(i)) CHECK(g.has_directed(j, i));
      for (NodeId j : g.siblings(i)) {
        CHECK(g.has_bidirected(i, j));
        const auto& sj = g.siblings(j);
        CHECK(std::find(sj.begin(), sj.end(), i) != sj.end());
      }
    }

    CHECK(nodes_on_cycles(g).empty() == test::topological_order_exists(g));

    NodeSchedule s = classify_nodes(g);
    std::vector<NodeId> all = s.one_shot;
    all.insert(all.end(), s.iterative.begin(), s.iterative.end());
    std::sort(all.begin(), all.end());
    CHECK(static_cast<int>(all.size()) == n);
    CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
  }
}

TEST_CASE("graph json round trip and rejects") {
  MixedGraph g = example_graph();
  MixedGraph g2 = MixedGraph::from_json_text(g.to_json_text());
  CHECK(g2.n_nodes() == g.n_nodes());
  CHECK(g2.directed_edges() == g.directed_edges());
  CHECK(g2.bidirected_edges() == g.bidirected_edges());

  CHECK_THROWS_AS(MixedGraph::from_json_text("not json"), ParseError);
  CHECK_THROWS_AS(MixedGraph::from_json_text(R"({"directed": []})"), ParseError);
  CHECK_THROWS_AS(MixedGraph::from_json_text(R"({"n": 2, "directed": [[0, 0]]})"), ParseError);
  CHECK_THROWS_AS(MixedGraph::from_json_text(R"({"n": 2, "directed": [[0, 2]]})"), ParseError);
  CHECK_THROWS_AS(
      MixedGraph::from_json_text(R"({"n": 2, "directed": [[0, 1], [0, 1]]})"), ParseError);
  CHECK_THROWS_AS(
      MixedGraph::from_json_text(R"({"n": 3, "bidirected": [[0, 1], [1, 0]]})"), ParseError);
  CHECK_THROWS_AS(MixedGraph::load("/nonexistent/graph.json"), ParseError);

  // 2-cycles are two distinct ordered pairs, not duplicates
  CHECK_NOTHROW(MixedGraph::from_json_text(R"({"n": 2, "directed": [[0, 1], [1, 0]]})"));
}
