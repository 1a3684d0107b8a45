#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sembcd/graph.hpp"
#include "sembcd/likelihood.hpp"

namespace sembcd {

enum class FitStatusKind {
  Converged,
  MaxSweeps,
  UpdateNoMinimum,
  UpdateNonUnique,
  A1Violation,
};

std::string to_string(FitStatusKind k);

struct FitStatus {
  FitStatusKind kind = FitStatusKind::Converged;
  NodeId node = -1;  // set for the per-node failure kinds
};

enum class InitKind { LeastSquaresDiagDominant, Provided, RandomSeeded };

struct FitConfig {
  double tol_loglik = 1e-8;
  double tol_param = 1e-6;
  int max_sweeps = 5000;
  InitKind init = InitKind::LeastSquaresDiagDominant;
  std::optional<Params> init_params;  // used when init == Provided
  std::uint64_t seed = 0;             // used when init == RandomSeeded
  bool check_conditions = false;      // run the well-posedness checker up front, warn on failure
  std::optional<std::vector<NodeId>> node_order;  // custom sweep order (a permutation of V)
  bool debug_check_monotone = false;  // verify l never drops by more than 1e-9 per update
};

struct FitResult {
  Params params;
  std::vector<double> loglik_trace;  // one entry per sweep
  int sweeps_used = 0;
  FitStatus status;
  double score_norm = 0.0;
  bool ridge_fallback_used = false;  // initialization hit collinear regressors
  bool wellposed_warning = false;    // check_conditions found the graph ill-posed
};

/// Per-node quantities with the rest of the model held fixed:
/// eps_rest = (I-B)_{-i} Y, the pseudo-variable rows Z_{sib(i)} of
/// Omega_{-i,-i}^{-1} eps_rest, and the conditional error variance
/// omega_cond = omega_ii - Omega_{i,-i} Omega_{-i,-i}^{-1} Omega_{-i,i}.
struct BlockContext {
  Eigen::MatrixXd eps_rest;
  Eigen::MatrixXd z_sib;
  double omega_cond = 0.0;
};

/// Thrown by block_update; fit translates it into the FitResult status.
class BlockUpdateError : public Error {
 public:
  BlockUpdateError(FitStatusKind kind, NodeId node, const std::string& msg)
      : Error(msg), kind_(kind), node_(node) {}
  FitStatusKind kind() const { return kind_; }
  NodeId node() const { return node_; }

 private:
  FitStatusKind kind_;
  NodeId node_;
};

/// Least-squares start: B rows from per-node OLS of Y_i on Y_{pa(i)}, Omega
/// off-diagonals from residual covariances, then rescaled toward the per-row
/// target sum_{j != i} |omega_ij| = 0.9 omega_ii so the result is diagonally
/// dominant and positive definite. Collinear regressors fall back to a ridge
/// solve with 1e-8 I (reported through ridge_flag).
Params init_params(const MixedGraph& g, const Dataset& d, bool* ridge_flag = nullptr);

/// Random start: free B entries i.i.d. Normal(0, 0.1^2), redrawn until
/// |det(I-B)| > 1e-6; Omega from the residual-covariance construction above with
/// a random perturbation (off-diagonal shrink, diagonal inflation) keeping it PD.
Params init_params_random(const MixedGraph& g, const Dataset& d, std::uint64_t seed);

BlockContext block_context(const MixedGraph& g, const Dataset& d, const Params& p, NodeId i);

enum class UpdateRoute {
  Auto,          // least squares when c_pa = 0, ratio pipeline otherwise
  LeastSquares,  // force the plain least-squares branch (requires c_pa = 0)
  RatioPipeline, // force the ratio pipeline (handles c = 0 internally)
};

/// One block update: maximizes the log-likelihood over row i of B and row/column i
/// of Omega, everything else fixed. Throws BlockUpdateError on rank failure
/// (A1Violation) or a degenerate ratio subproblem (UpdateNonUnique / UpdateNoMinimum).
Params block_update(const MixedGraph& g, const Dataset& d, const Params& p, NodeId i,
                    UpdateRoute route = UpdateRoute::Auto);

/// Condition (A1)_i: the rows of (Z_{sib(i)}; Y_{pa(i) u {i}}) are linearly independent.
bool check_A1(const MixedGraph& g, const Dataset& d, const Params& p, NodeId i);

/// Condition (A2)_i: c_{i,0} + Bhat_{i,pa(i)} c_{i,pa(i)} != 0 at the least-squares
/// coefficients of Y_i regressed on (Z_{sib(i)}; Y_{pa(i)}). Assumes (A1)_i holds.
bool check_A2(const MixedGraph& g, const Dataset& d, const Params& p, NodeId i);

struct UpdateEvent {
  int sweep = 0;
  NodeId node = -1;
  double loglik_after = 0.0;
  bool omega_pd = true;
  double max_param_change = 0.0;
};
using UpdateObserver = std::function<void(const UpdateEvent&)>;

/// Block-coordinate descent. One-shot nodes are visited first and only during the
/// first sweep. Converges when both the log-likelihood change and the max-abs
/// parameter change of a sweep fall below their tolerances.
FitResult fit(const MixedGraph& g, const Dataset& d, const FitConfig& cfg);
FitResult fit(const MixedGraph& g, const Dataset& d, const FitConfig& cfg,
              const UpdateObserver& observer);

}  // namespace sembcd
