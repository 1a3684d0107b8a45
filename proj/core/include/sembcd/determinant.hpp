#pragma once

#include <Eigen/Dense>

#include "sembcd/graph.hpp"

namespace sembcd {

/// Coefficients of the Laplace expansion of det(I - B) along row i:
///
///   det(I - B) = c0 + B_{i,pa(i)} . c_pa
///
/// c_pa is indexed by parents(i) in ascending order. If node i lies on no
/// directed cycle, c_pa = 0 and c0 equals det(I - B) independently of row i.
struct DetCoeffs {
  double c0 = 1.0;
  Eigen::VectorXd c_pa;
};

/// Throws PatternError unless B(i, j) == 0 for every (i, j) with j -> i not an edge
/// and zero diagonal.
void check_b_pattern(const MixedGraph& g, const Eigen::MatrixXd& B);

/// c0 = det((I-B)_{-i,-i}); c_p = (-1)^{i+p-1} det((I-B)_{-i,-p}) for p in pa(i),
/// with positions counted 1-based in the natural node order of the matrix layout.
DetCoeffs det_coeffs(const MixedGraph& g, const Eigen::MatrixXd& B, NodeId i);

/// det(I - B) via LU. Returns 0.0 for singular input, never throws.
double det_i_minus_b(const Eigen::MatrixXd& B);

/// Test oracle: det(I - B) by enumerating vertex-disjoint directed-cycle covers,
///
///   sum over sigma in S_V(G) of (-1)^{n(sigma)} prod_{i in V(sigma)} B(sigma(i), i),
///
/// where each nontrivial permutation cycle must follow directed edges of g.
/// Limited to |V| <= 10 (throws SizeLimitError above that).
double det_via_cycles(const MixedGraph& g, const Eigen::MatrixXd& B);

}  // namespace sembcd
