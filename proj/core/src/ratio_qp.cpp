#include "sembcd/ratio_qp.hpp"

#include <cmath>
#include <limits>

namespace sembcd {

namespace {

void validate_problem(const RatioProblem& p) {
  const auto N = p.X.rows();
  const auto m = p.X.cols();
  if (m < 1) throw ValidationError("ratio problem: X needs at least one column");
  if (N < m) throw ValidationError("ratio problem: needs N >= m");
  if (p.y.size() != N) throw ValidationError("ratio problem: y length mismatch");
  if (p.c.size() != m) throw ValidationError("ratio problem: c length mismatch");
}

// Orthogonal Q1 with Q1 c = ||c|| e_{m-1} (0-based last coordinate), held
// implicitly as Q1 = D H: a Householder reflector H onto sign(c_m)||c|| e_m
// followed by a sign flip D of the last row when that sign is negative.
// Applications cost one rank-1 update instead of a dense multiply.
struct ReflectorToLast {
  Eigen::VectorXd v;
  double vn2 = 0.0;
  double sign = 1.0;

  explicit ReflectorToLast(const Eigen::VectorXd& c) {
    const int m = static_cast<int>(c.size());
    const double cn = c.norm();
    if (cn == 0.0) return;  // identity
    sign = (c(m - 1) >= 0.0) ? 1.0 : -1.0;
    v = c;
    v(m - 1) -= sign * cn;
    vn2 = v.squaredNorm();
  }

  // X Q1^T = (X - (2/||v||^2) (X v) v^T) D
  Eigen::MatrixXd right_apply_q1t(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd out = X;
    if (vn2 > 0.0) out.noalias() -= (2.0 / vn2) * (X * v) * v.transpose();
    if (sign < 0.0) out.col(out.cols() - 1) = -out.col(out.cols() - 1);
    return out;
  }

  // Q1^T z = H (D z)
  Eigen::VectorXd apply_q1t(Eigen::VectorXd z) const {
    if (sign < 0.0) z(z.size() - 1) = -z(z.size() - 1);
    if (vn2 > 0.0) z -= (2.0 * v.dot(z) / vn2) * v;
    return z;
  }
};

constexpr double kDegenTol = 1e-12;

}  // namespace

double ratio_objective(const RatioProblem& p, const Eigen::VectorXd& alpha) {
  const double denom = p.c0 + p.c.dot(alpha);
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return (p.y - p.X * alpha).squaredNorm() / (denom * denom);
}

RatioSolution solve_ratio(const RatioProblem& p) {
  validate_problem(p);
  const int m = static_cast<int>(p.X.cols());
  const double cn = p.c.norm();

  ReflectorToLast q1(p.c);
  Eigen::MatrixXd XQ1t = q1.right_apply_q1t(p.X);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(XQ1t);
  Eigen::MatrixXd R1 = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();

  double max_diag = R1.diagonal().cwiseAbs().maxCoeff();
  for (int j = 0; j < m; ++j) {
    if (std::abs(R1(j, j)) <= 1e-12 * std::max(max_diag, 1e-300)) {
      throw RankDeficientError("solve_ratio: X is column-rank-deficient");
    }
  }

  Eigen::VectorXd qty = qr.householderQ().adjoint() * p.y;
  Eigen::VectorXd w = qty.head(m);
  const double y0_sq = qty.tail(qty.size() - m).squaredNorm();
  const double r = R1(m - 1, m - 1);

  Eigen::VectorXd alpha_hat = q1.apply_q1t(R1.triangularView<Eigen::Upper>().solve(w));

  const double denom = p.c0 + cn * w(m - 1) / r;  // = c0 + c . alpha_hat
  const double denom_tol = kDegenTol * (std::abs(p.c0) + cn * alpha_hat.norm() + 1.0);

  if (std::abs(denom) > denom_tol) {
    Eigen::VectorXd w_star = w;
    w_star(m - 1) += cn * y0_sq / (r * p.c0 + cn * w(m - 1));
    RatioUnique u;
    u.alpha_star = q1.apply_q1t(R1.triangularView<Eigen::Upper>().solve(w_star));
    u.residual_sq = (p.y - p.X * u.alpha_star).squaredNorm();
    return u;
  }

  if (cn == 0.0) {
    throw ValidationError("solve_ratio: denominator identically zero (c = 0 and c0 = 0)");
  }

  if (y0_sq <= kDegenTol * p.y.squaredNorm()) {
    // (X^T X)^{-1} c through the factorization: Q1^T R1^{-1} R1^{-T} (||c|| e_m).
    Eigen::VectorXd em = Eigen::VectorXd::Zero(m);
    em(m - 1) = cn;
    Eigen::VectorXd t = R1.transpose().triangularView<Eigen::Lower>().solve(em);
    RatioNonUnique nu;
    nu.alpha_hat = alpha_hat;
    nu.direction = q1.apply_q1t(R1.triangularView<Eigen::Upper>().solve(t));
    return nu;
  }

  return RatioNoMinimum{r * r / (cn * cn)};
}

Eigen::VectorXd ratio_rational_solution(const RatioProblem& p) {
  validate_problem(p);
  Eigen::MatrixXd G = p.X.transpose() * p.X;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
  if (ldlt.info() != Eigen::Success) {
    throw RankDeficientError("ratio_rational_solution: X^T X not factorizable");
  }
  Eigen::VectorXd alpha_hat = ldlt.solve(p.X.transpose() * p.y);
  const double y0_sq = (p.y - p.X * alpha_hat).squaredNorm();
  const double denom = p.c0 + p.c.dot(alpha_hat);
  const double denom_tol = kDegenTol * (std::abs(p.c0) + p.c.norm() * alpha_hat.norm() + 1.0);
  if (std::abs(denom) <= denom_tol) {
    throw ValidationError("ratio_rational_solution: degenerate instance, no unique solution");
  }
  return alpha_hat + (y0_sq / denom) * ldlt.solve(p.c).eval();
}

UnivariateMin minimize_univariate_ratio(double a, double b, double c0, double c1) {
  if (c1 == 0.0) throw ValidationError("minimize_univariate_ratio: c1 must be nonzero");
  const double denom = c0 + a * c1;
  if (denom != 0.0) {
    return UniqueAt{a + b * b * c1 / denom};
  }
  if (b == 0.0) {
    return ConstantValue{1.0 / (c1 * c1)};
  }
  return InfimumUnattained{1.0 / (c1 * c1)};
}

RatioSolution solve_ratio_projected(const RatioProblem& p, const Eigen::VectorXd& c_tilde) {
  validate_problem(p);
  if (c_tilde.size() != p.y.size()) {
    throw ValidationError("solve_ratio_projected: c_tilde length mismatch");
  }
  const double consistency = (p.X.transpose() * c_tilde - p.c).norm();
  if (consistency > 1e-8 * (p.X.norm() * c_tilde.norm() + p.c.norm() + 1.0)) {
    throw ValidationError("solve_ratio_projected: requires c = X^T c_tilde");
  }

  // Minimum-norm coefficients for the projections of y and c_tilde onto span(X).
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(p.X);
  Eigen::VectorXd coef_y = cod.solve(p.y);
  Eigen::VectorXd coef_c = cod.solve(c_tilde);
  Eigen::VectorXd proj_y = p.X * coef_y;
  Eigen::VectorXd proj_c = p.X * coef_c;

  const double y0_sq = (p.y - proj_y).squaredNorm();
  const double proj_c_sq = proj_c.squaredNorm();

  if (proj_c_sq <= kDegenTol * (c_tilde.squaredNorm() + 1.0)) {
    // Constant denominator: plain least squares over the span.
    if (std::abs(p.c0) <= kDegenTol) {
      throw ValidationError("solve_ratio_projected: denominator identically zero");
    }
    return RatioUnique{coef_y, y0_sq};
  }

  const double denom = p.c0 + c_tilde.dot(proj_y);
  const double denom_tol = kDegenTol * (std::abs(p.c0) + c_tilde.norm() * proj_y.norm() + 1.0);
  if (std::abs(denom) > denom_tol) {
    RatioUnique u;
    u.alpha_star = coef_y + (y0_sq / denom) * coef_c;
    u.residual_sq = (p.y - p.X * u.alpha_star).squaredNorm();
    return u;
  }
  if (y0_sq <= kDegenTol * p.y.squaredNorm()) {
    return RatioNonUnique{coef_y, coef_c};
  }
  return RatioNoMinimum{1.0 / proj_c_sq};
}

}  // namespace sembcd
