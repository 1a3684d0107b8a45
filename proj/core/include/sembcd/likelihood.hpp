#pragma once

#include <Eigen/Dense>

#include "sembcd/graph.hpp"

namespace sembcd {

/// Structural coefficients B and error covariance Omega.
/// Invariants: B(i,j) = 0 unless j -> i is an edge, zero diagonal;
/// Omega symmetric positive definite with Omega(i,j) = 0 unless i <-> j or i = j;
/// I - B invertible.
struct Params {
  Eigen::MatrixXd B;
  Eigen::MatrixXd Omega;
};

/// Throws PatternError / SingularError / ValidationError if the Params invariants
/// do not hold for graph g.
void validate_params(const MixedGraph& g, const Params& p);

/// Sigma = (I-B)^{-1} Omega (I-B)^{-T}. Throws SingularError when I - B is
/// numerically singular.
Eigen::MatrixXd implied_covariance(const Params& p);

/// Data matrix Y (one variable per row, one observation per column) together with
/// the sample covariance S = Y Y^T / N for known zero mean.
struct Dataset {
  Eigen::MatrixXd Y;
  int n_samples = 0;
  Eigen::MatrixXd S;
};

/// Validates N >= n_vars and full row rank of Y (throws DataError otherwise).
Dataset make_dataset(const Eigen::MatrixXd& Y);

/// Log-likelihood with the additive constant dropped and the N/2 factor divided out:
///
///   l(Omega, B) = -log det(Omega) + log det(I-B)^2 - tr{(I-B)^T Omega^{-1} (I-B) S}.
///
/// Throws SingularError if Omega fails its Cholesky factorization or I - B is singular.
double log_likelihood(const MixedGraph& g, const Dataset& d, const Params& p);

/// Gradient of log_likelihood with respect to the free parameters.
/// d_beta follows g.directed_edges(); an edge j -> i reads matrix position (i, j).
/// d_omega holds the |V| diagonal entries first, then g.bidirected_edges().
struct Score {
  Eigen::VectorXd d_beta;
  Eigen::VectorXd d_omega;
};

Score score(const MixedGraph& g, const Dataset& d, const Params& p);

/// Max-abs entry over both score blocks; the stationarity residual.
double score_inf_norm(const Score& s);

/// |E_dir| + |V| + |E_bidir|.
int free_param_count(const MixedGraph& g);

}  // namespace sembcd
