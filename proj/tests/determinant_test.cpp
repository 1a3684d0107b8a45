#include <doctest.h>

#include "sembcd/determinant.hpp"
#include "test_util.hpp"

using namespace sembcd;
using test::example_graph;

namespace {

// Example-graph coefficients beta21, beta24, beta32, beta43, beta54, beta65
// (1-based labels).
Eigen::MatrixXd example_b(double b21, double b24, double b32, double b43, double b54,
                       double b65) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(6, 6);
  B(1, 0) = b21;
  B(1, 3) = b24;
  B(2, 1) = b32;
  B(3, 2) = b43;
  B(4, 3) = b54;
  B(5, 4) = b65;
  return B;
}

}  // namespace

TEST_CASE("laplace coefficients on the running example") {
  MixedGraph g = example_graph();
  Eigen::MatrixXd B = example_b(0.5, 0.1, 2.0, 3.0, 0.7, -0.3);

  DetCoeffs c2 = det_coeffs(g, B, 1);  // node 2 (1-based), pa = {1, 4}
  CHECK(c2.c0 == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(c2.c_pa.size() == 2);
  CHECK(std::abs(c2.c_pa(0)) <= 1e-12);
  CHECK(c2.c_pa(1) == doctest::Approx(-2.0 * 3.0).epsilon(1e-12));

  DetCoeffs c1 = det_coeffs(g, B, 0);  // node 1 (1-based), no parents
  CHECK(c1.c_pa.size() == 0);
  CHECK(c1.c0 == doctest::Approx(1.0 - 2.0 * 3.0 * 0.1).epsilon(1e-12));

  // one-shot end of the chain: c0 carries the full determinant, c_pa vanishes
  DetCoeffs c6 = det_coeffs(g, B, 5);
  CHECK(c6.c0 == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(c6.c_pa.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("laplace coefficients on acyclic graphs") {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    MixedGraph g = [&rng]() {
      std::vector<Edge> dir;
      const int n = 3 + static_cast<int>(rng.uniform_index(4));
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          if (rng.uniform() < 0.4) dir.emplace_back(i, j);  // i < j keeps it acyclic
        }
      }
      return MixedGraph(n, std::move(dir), {});
    }();
    Eigen::MatrixXd B = test::random_b_matrix(g, 1.0, rng);
    for (NodeId i = 0; i < g.n_nodes(); ++i) {
      DetCoeffs c = det_coeffs(g, B, i);
      CHECK(c.c0 == doctest::Approx(1.0).epsilon(1e-12));
      if (c.c_pa.size() > 0) CHECK(c.c_pa.cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("det_i_minus_b") {
  CHECK(det_i_minus_b(Eigen::MatrixXd::Zero(3, 3)) == doctest::Approx(1.0));

  Eigen::MatrixXd two_cycle = Eigen::MatrixXd::Zero(2, 2);
  two_cycle(0, 1) = 0.5;
  two_cycle(1, 0) = 0.5;
  CHECK(det_i_minus_b(two_cycle) == doctest::Approx(0.75).epsilon(1e-12));

  Eigen::MatrixXd singular = example_b(0.9, 1.0, 1.0, 1.0, -0.2, 0.4);
  CHECK(std::abs(det_i_minus_b(singular)) <= 1e-12);
}

TEST_CASE("determinant identity det(I-B) = c0 + B_i,pa . c_pa") {
  Rng rng(42);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform_index(7));
    MixedGraph g = test::random_mixed_graph(n, 0.3, 0.0, rng);
    Eigen::MatrixXd B = test::random_b_matrix(g, 0.8, rng);
    const double det = det_i_minus_b(B);
    for (NodeId i = 0; i < n; ++i) {
      DetCoeffs c = det_coeffs(g, B, i);
      Eigen::VectorXd row(c.c_pa.size());
      const auto& pa = g.parents(i);
      for (std::size_t k = 0; k < pa.size(); ++k) row(static_cast<int>(k)) = B(i, pa[k]);
      const double reassembled = c.c0 + row.dot(c.c_pa);
      CHECK(std::abs(det - reassembled) <= 1e-10 * (1.0 + std::abs(det)));
    }
  }
}

TEST_CASE("c_pa entries vanish identically iff the parent edge is off-cycle") {
  Rng rng(314);
  for (int graph_rep = 0; graph_rep < 10; ++graph_rep) {
    const int n = 3 + static_cast<int>(rng.uniform_index(4));
    MixedGraph g = test::random_mixed_graph(n, 0.35, 0.0, rng);
    for (NodeId i = 0; i < n; ++i) {
      const auto& pa = g.parents(i);
      if (pa.empty()) continue;
      Eigen::VectorXd max_abs = Eigen::VectorXd::Zero(static_cast<int>(pa.size()));
      for (int rep = 0; rep < 100; ++rep) {
        Eigen::MatrixXd B = test::random_b_matrix(g, 1.0, rng);
        max_abs = max_abs.cwiseMax(det_coeffs(g, B, i).c_pa.cwiseAbs());
      }
      for (std::size_t k = 0; k < pa.size(); ++k) {
        const bool on_cycle = g.directed_edge_on_cycle(pa[k], i);
        if (on_cycle) {
          CHECK(max_abs(static_cast<int>(k)) > 1e-6);
        } else {
          CHECK(max_abs(static_cast<int>(k)) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("det_via_cycles") {
  MixedGraph g = example_graph();
  Eigen::MatrixXd B = example_b(0.5, 0.1, 2.0, 3.0, 0.7, -0.3);
  CHECK(det_via_cycles(g, B) == doctest::Approx(0.4).epsilon(1e-12));

  SUBCASE("acyclic graphs give exactly one") {
    MixedGraph dag(5, {{0, 1}, {1, 2}, {2, 3}, {0, 4}}, {});
    Rng rng(11);
    Eigen::MatrixXd Bd = test::random_b_matrix(dag, 2.0, rng);
    CHECK(det_via_cycles(dag, Bd) == 1.0);
  }

  SUBCASE("agrees with the LU determinant on random graphs") {
    Rng rng(99);
    for (int rep = 0; rep < 100; ++rep) {
      const int n = 2 + static_cast<int>(rng.uniform_index(5));
      MixedGraph rg = test::random_mixed_graph(n, 0.4, 0.0, rng);
      Eigen::MatrixXd Br = test::random_b_matrix(rg, 0.9, rng);
      const double lu = det_i_minus_b(Br);
      CHECK(std::abs(det_via_cycles(rg, Br) - lu) <= 1e-10 * (1.0 + std::abs(lu)));
    }
  }

  SUBCASE("size limit") {
    MixedGraph big(11, {}, {});
    CHECK_THROWS_AS(det_via_cycles(big, Eigen::MatrixXd::Zero(11, 11)), SizeLimitError);
  }
}

TEST_CASE("pattern violations are rejected") {
  MixedGraph g = example_graph();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(6, 6);
  B(0, 5) = 0.3;  // no edge 6 -> 1
  CHECK_THROWS_AS(det_coeffs(g, B, 0), PatternError);
  CHECK_THROWS_AS(det_via_cycles(g, B), PatternError);
}
