#include "sembcd/likelihood.hpp"

#include <cmath>

#include "sembcd/determinant.hpp"

namespace sembcd {

void validate_params(const MixedGraph& g, const Params& p) {
  const int n = g.n_nodes();
  check_b_pattern(g, p.B);
  if (p.Omega.rows() != n || p.Omega.cols() != n) {
    throw PatternError("Omega: dimension does not match the graph");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && p.Omega(i, j) != 0.0 && !g.has_bidirected(i, j)) {
        throw PatternError("Omega: nonzero entry (" + std::to_string(i) + ", " +
                           std::to_string(j) + ") without a bi-directed edge");
      }
    }
  }
  if (!p.Omega.isApprox(p.Omega.transpose())) {
    throw ValidationError("Omega: not symmetric");
  }
  if (Eigen::LLT<Eigen::MatrixXd>(p.Omega).info() != Eigen::Success) {
    throw SingularError("Omega: not positive definite");
  }
  const double det = det_i_minus_b(p.B);
  if (det == 0.0 || !std::isfinite(det)) {
    throw SingularError("I - B is singular");
  }
}

Eigen::MatrixXd implied_covariance(const Params& p) {
  const int n = static_cast<int>(p.B.rows());
  Eigen::MatrixXd E = Eigen::MatrixXd::Identity(n, n) - p.B;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(E);
  if (lu.rcond() < 1e-14) {
    throw SingularError("implied_covariance: I - B numerically singular");
  }
  Eigen::MatrixXd t = lu.solve(p.Omega);                  // (I-B)^{-1} Omega
  Eigen::MatrixXd sigma = lu.solve(t.transpose()).transpose();
  return 0.5 * (sigma + sigma.transpose());
}

Dataset make_dataset(const Eigen::MatrixXd& Y) {
  const int n_vars = static_cast<int>(Y.rows());
  const int n = static_cast<int>(Y.cols());
  if (n_vars == 0 || n == 0) throw DataError("dataset: empty data matrix");
  if (!Y.allFinite()) throw DataError("dataset: non-finite entries");
  if (n < n_vars) {
    throw DataError("dataset: needs at least as many observations as variables (N >= |V|)");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Y.transpose());
  if (qr.rank() < n_vars) {
    throw DataError("dataset: data matrix is row-rank-deficient");
  }
  Dataset d;
  d.Y = Y;
  d.n_samples = n;
  d.S = (Y * Y.transpose()) / static_cast<double>(n);
  d.S = 0.5 * (d.S + d.S.transpose()).eval();
  return d;
}

double log_likelihood(const MixedGraph& g, const Dataset& d, const Params& p) {
  const int n = g.n_nodes();
  Eigen::LLT<Eigen::MatrixXd> llt(p.Omega);
  if (llt.info() != Eigen::Success) {
    throw SingularError("log_likelihood: Omega not positive definite");
  }
  const double det = det_i_minus_b(p.B);
  if (det == 0.0 || !std::isfinite(det)) {
    throw SingularError("log_likelihood: I - B singular");
  }
  double logdet_omega = 0.0;
  Eigen::MatrixXd L = llt.matrixL();
  for (int i = 0; i < n; ++i) logdet_omega += 2.0 * std::log(L(i, i));

  Eigen::MatrixXd E = Eigen::MatrixXd::Identity(n, n) - p.B;
  Eigen::MatrixXd T = E * d.S * E.transpose();
  const double trace = llt.solve(T).trace();

  return -logdet_omega + std::log(det * det) - trace;
}

Score score(const MixedGraph& g, const Dataset& d, const Params& p) {
  const int n = g.n_nodes();
  Eigen::LLT<Eigen::MatrixXd> llt(p.Omega);
  if (llt.info() != Eigen::Success) {
    throw SingularError("score: Omega not positive definite");
  }
  Eigen::MatrixXd E = Eigen::MatrixXd::Identity(n, n) - p.B;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(E);
  const double det = lu.determinant();
  if (det == 0.0 || !std::isfinite(det)) {
    throw SingularError("score: I - B singular");
  }

  // d l / d beta reads 2 [Omega^{-1} (I-B) S - (I-B)^{-T}] at the free positions;
  // d l / d omega reads -(Omega^{-1} - Omega^{-1} (I-B) S (I-B)^T Omega^{-1}),
  // doubled off the diagonal since omega_ij = omega_ji is a single parameter.
  Eigen::MatrixXd ES = E * d.S;
  Eigen::MatrixXd Einv_t = lu.solve(Eigen::MatrixXd::Identity(n, n)).transpose();
  Eigen::MatrixXd G = llt.solve(ES) - Einv_t;

  Eigen::MatrixXd OinvESEt = llt.solve(ES * E.transpose());
  Eigen::MatrixXd M = llt.solve((Eigen::MatrixXd::Identity(n, n) - OinvESEt.transpose()).eval());
  M = 0.5 * (M + M.transpose()).eval();

  Score s;
  const auto& dir = g.directed_edges();
  s.d_beta.resize(static_cast<int>(dir.size()));
  for (std::size_t k = 0; k < dir.size(); ++k) {
    const auto& [tail, head] = dir[k];
    s.d_beta(static_cast<int>(k)) = 2.0 * G(head, tail);
  }
  const auto& bi = g.bidirected_edges();
  s.d_omega.resize(n + static_cast<int>(bi.size()));
  for (int i = 0; i < n; ++i) s.d_omega(i) = -M(i, i);
  for (std::size_t k = 0; k < bi.size(); ++k) {
    const auto& [a, b] = bi[k];
    s.d_omega(n + static_cast<int>(k)) = -2.0 * M(a, b);
  }
  return s;
}

double score_inf_norm(const Score& s) {
  double m = 0.0;
  if (s.d_beta.size() > 0) m = s.d_beta.cwiseAbs().maxCoeff();
  if (s.d_omega.size() > 0) m = std::max(m, s.d_omega.cwiseAbs().maxCoeff());
  return m;
}

int free_param_count(const MixedGraph& g) {
  return g.n_directed() + g.n_nodes() + g.n_bidirected();
}

}  // namespace sembcd
