#include "sembcd/determinant.hpp"

#include <vector>

namespace sembcd {

namespace {

// Copy of A with one row and one column removed.
Eigen::MatrixXd minor_matrix(const Eigen::MatrixXd& A, int skip_row, int skip_col) {
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXd M(n - 1, n - 1);
  for (int r = 0, mr = 0; r < n; ++r) {
    if (r == skip_row) continue;
    for (int c = 0, mc = 0; c < n; ++c) {
      if (c == skip_col) continue;
      M(mr, mc) = A(r, c);
      ++mc;
    }
    ++mr;
  }
  return M;
}

double lu_det(const Eigen::MatrixXd& M) {
  if (M.rows() == 0) return 1.0;
  return Eigen::PartialPivLU<Eigen::MatrixXd>(M).determinant();
}

}  // namespace

void check_b_pattern(const MixedGraph& g, const Eigen::MatrixXd& B) {
  const int n = g.n_nodes();
  if (B.rows() != n || B.cols() != n) {
    throw PatternError("B: dimension does not match the graph");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (B(i, j) != 0.0 && (i == j || !g.has_directed(j, i))) {
        throw PatternError("B: nonzero entry (" + std::to_string(i) + ", " + std::to_string(j) +
                           ") without edge " + std::to_string(j) + " -> " + std::to_string(i));
      }
    }
  }
}

DetCoeffs det_coeffs(const MixedGraph& g, const Eigen::MatrixXd& B, NodeId i) {
  check_b_pattern(g, B);
  const int n = g.n_nodes();
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - B;

  DetCoeffs out;
  out.c0 = lu_det(minor_matrix(A, i, i));
  const auto& pa = g.parents(i);
  out.c_pa.resize(static_cast<int>(pa.size()));
  for (std::size_t k = 0; k < pa.size(); ++k) {
    const int p = pa[k];
    // (-1)^{i+p-1} with 1-based positions equals (-1)^{i+p+1} for 0-based i, p.
    const double sign = ((i + p + 1) % 2 == 0) ? 1.0 : -1.0;
    out.c_pa(static_cast<int>(k)) = sign * lu_det(minor_matrix(A, i, p));
  }
  return out;
}

double det_i_minus_b(const Eigen::MatrixXd& B) {
  const int n = static_cast<int>(B.rows());
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - B;
  return lu_det(A);
}

namespace {

// Cycle covers are enumerated by deciding nodes in increasing order. Each
// directed simple cycle is generated once, rooted at its smallest node.
struct CycleCoverEnum {
  const MixedGraph& g;
  const Eigen::MatrixXd& B;
  std::vector<bool> used;

  double decide(int v) {
    const int n = g.n_nodes();
    while (v < n && used[v]) ++v;
    if (v == n) return 1.0;

    used[v] = true;
    double total = decide(v + 1);  // v is a fixed point of sigma
    std::vector<int> path{v};
    total += extend(v, v, 1.0, path);
    used[v] = false;
    return total;
  }

  // Walk directed edges from `cur`, all nodes > root and unused; every closed
  // nontrivial cycle contributes a factor of -1 times its edge product.
  double extend(int root, int cur, double prod, std::vector<int>& path) {
    double total = 0.0;
    for (int next : g.children(cur)) {
      const double step = B(next, cur);
      if (step == 0.0) continue;
      if (next == root && path.size() >= 2) {
        total += -prod * step * decide(root + 1);
      } else if (next > root && !used[next]) {
        used[next] = true;
        path.push_back(next);
        total += extend(root, next, prod * step, path);
        path.pop_back();
        used[next] = false;
      }
    }
    return total;
  }
};

}  // namespace

double det_via_cycles(const MixedGraph& g, const Eigen::MatrixXd& B) {
  if (g.n_nodes() > 10) {
    throw SizeLimitError("det_via_cycles: limited to graphs with at most 10 nodes");
  }
  check_b_pattern(g, B);
  CycleCoverEnum e{g, B, std::vector<bool>(g.n_nodes(), false)};
  return e.decide(0);
}

}  // namespace sembcd
