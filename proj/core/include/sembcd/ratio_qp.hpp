#pragma once

#include <variant>

#include <Eigen/Dense>

#include "sembcd/errors.hpp"

namespace sembcd {

/// Instance of  min over alpha of ||y - X alpha||^2 / (c0 + c^T alpha)^2
/// with y in R^N, X in R^{N x m}, N >= m >= 1.
struct RatioProblem {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  double c0 = 1.0;
  Eigen::VectorXd c;
};

struct RatioUnique {
  Eigen::VectorXd alpha_star;
  double residual_sq = 0.0;  // ||y - X alpha*||^2
};

/// Solution set is { alpha_hat + lambda * direction : lambda != 0 }.
struct RatioNonUnique {
  Eigen::VectorXd alpha_hat;
  Eigen::VectorXd direction;
};

/// The infimum equals the limit of the objective as the free coordinate runs to
/// +-infinity; it is never attained.
struct RatioNoMinimum {
  double infimum = 0.0;
};

using RatioSolution = std::variant<RatioUnique, RatioNonUnique, RatioNoMinimum>;

/// Objective value at a candidate point (infinity on the denominator's zero set).
double ratio_objective(const RatioProblem& p, const Eigen::VectorXd& alpha);

/// Closed-form solve via the orthogonal pipeline: a Householder reflection Q1
/// takes c to ||c|| e_m, a QR factorization X Q1^T = Q2^T R reduces the problem to
/// a univariate ratio of quadratics in the last coordinate, and the optimum is
/// mapped back through Q1^T R1^{-1}.
///
/// Case selection on the reduced denominator c0 + c^T alpha_hat:
///   nonzero            -> RatioUnique
///   zero with y0^2 = 0 -> RatioNonUnique
///   zero with y0^2 > 0 -> RatioNoMinimum (infimum r^2 / ||c||^2)
///
/// A zero c makes the denominator constant and reduces to least squares; the
/// pipeline handles that internally (the correction term vanishes).
/// Throws RankDeficientError when X is not of full column rank (backstop only;
/// callers certify rank by a pivoted factorization beforehand).
RatioSolution solve_ratio(const RatioProblem& p);

/// The rational form of the unique solution,
///   alpha* = alpha_hat + y0^2 / (c0 + c^T alpha_hat) (X^T X)^{-1} c,
/// computed through the normal equations. Independent algebraic route used to
/// cross-check the pipeline; throws unless the instance falls in the unique case.
Eigen::VectorXd ratio_rational_solution(const RatioProblem& p);

struct UniqueAt {
  double x = 0.0;
};
struct ConstantValue {
  double value = 0.0;
};
struct InfimumUnattained {
  double value = 0.0;
};
using UnivariateMin = std::variant<UniqueAt, ConstantValue, InfimumUnattained>;

/// Minimize f(x) = ((a - x)^2 + b^2) / (c0 + c1 x)^2 for c1 != 0:
///   c0 + a c1 != 0         -> UniqueAt(a + b^2 c1 / (c0 + a c1))
///   c0 + a c1 == 0, b == 0 -> ConstantValue(1 / c1^2)
///   c0 + a c1 == 0, b != 0 -> InfimumUnattained(1 / c1^2)
/// Exact-arithmetic case tests; callers quantify degeneracy with their own tolerances.
UnivariateMin minimize_univariate_ratio(double a, double b, double c0, double c1);

/// Rank-deficient variant per the projection form: requires c = X^T c_tilde, which
/// makes the problem equivalent to minimizing over alpha_tilde in span(X):
///
///   alpha_tilde* = pi(y) + ||y - pi(y)||^2 / (c0 + c_tilde^T pi(y)) * pi(c_tilde)
///
/// with pi the orthogonal projection onto span(X). Returns the minimum-norm
/// coefficient vector mapping to alpha_tilde*. Degenerate denominators yield
/// RatioNonUnique / RatioNoMinimum exactly as in solve_ratio.
RatioSolution solve_ratio_projected(const RatioProblem& p, const Eigen::VectorXd& c_tilde);

}  // namespace sembcd
