#include "sembcd/bcd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sembcd/determinant.hpp"
#include "sembcd/ratio_qp.hpp"
#include "sembcd/rng.hpp"
#include "sembcd/wellposed.hpp"

namespace sembcd {

std::string to_string(FitStatusKind k) {
  switch (k) {
    case FitStatusKind::Converged: return "converged";
    case FitStatusKind::MaxSweeps: return "max_sweeps";
    case FitStatusKind::UpdateNoMinimum: return "update_no_minimum";
    case FitStatusKind::UpdateNonUnique: return "update_non_unique";
    case FitStatusKind::A1Violation: return "a1_violation";
  }
  return "unknown";
}

namespace {

struct BlockWork {
  std::vector<int> rest;  // nodes != i, ascending; local index = position here
  Eigen::MatrixXd eps_rest;
  Eigen::LLT<Eigen::MatrixXd> llt_rest;
  Eigen::MatrixXd z_sib;
  double omega_cond = 0.0;
};

// Residual rows eps_j = Y_j - B_{j,pa(j)} Y_{pa(j)} for all j != i, exploiting the
// sparsity of B.
Eigen::MatrixXd residual_rows_except(const MixedGraph& g, const Eigen::MatrixXd& Y,
                                     const Eigen::MatrixXd& B, NodeId i) {
  const int n = g.n_nodes();
  Eigen::MatrixXd eps(n - 1, Y.cols());
  int r = 0;
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    eps.row(r) = Y.row(j);
    for (NodeId q : g.parents(j)) {
      if (B(j, q) != 0.0) eps.row(r) -= B(j, q) * Y.row(q);
    }
    ++r;
  }
  return eps;
}

BlockWork build_block_work(const MixedGraph& g, const Dataset& d, const Params& p, NodeId i) {
  const int n = g.n_nodes();
  if (i < 0 || i >= n) throw std::out_of_range("block update: node index out of range");

  BlockWork w;
  w.rest.reserve(n - 1);
  for (int j = 0; j < n; ++j) {
    if (j != i) w.rest.push_back(j);
  }

  w.eps_rest = residual_rows_except(g, d.Y, p.B, i);

  Eigen::MatrixXd omega_rest(n - 1, n - 1);
  for (int a = 0; a < n - 1; ++a) {
    for (int b = 0; b < n - 1; ++b) omega_rest(a, b) = p.Omega(w.rest[a], w.rest[b]);
  }
  w.llt_rest.compute(omega_rest);
  if (w.llt_rest.info() != Eigen::Success) {
    throw SingularError("block update: Omega_{-i,-i} not positive definite");
  }

  const auto& sib = g.siblings(i);
  const int s = static_cast<int>(sib.size());
  std::vector<int> local(n, -1);
  for (int a = 0; a < n - 1; ++a) local[w.rest[a]] = a;

  if (s > 0) {
    // Rows sib(i) of Omega_{-i,-i}^{-1} eps_rest, via solves against unit vectors.
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n - 1, s);
    for (int k = 0; k < s; ++k) rhs(local[sib[k]], k) = 1.0;
    Eigen::MatrixXd cols = w.llt_rest.solve(rhs);
    w.z_sib = cols.transpose() * w.eps_rest;
  } else {
    w.z_sib.resize(0, d.Y.cols());
  }

  Eigen::VectorXd omega_col(n - 1);
  for (int a = 0; a < n - 1; ++a) omega_col(a) = p.Omega(w.rest[a], i);
  w.omega_cond = p.Omega(i, i) - omega_col.dot(w.llt_rest.solve(omega_col));
  return w;
}

// Columns (Z_{sib(i)}^T, Y_{pa(i)}^T): the regression design for node i.
Eigen::MatrixXd design_matrix(const BlockWork& w, const Dataset& d,
                              const std::vector<NodeId>& pa) {
  const int s = static_cast<int>(w.z_sib.rows());
  const int q = static_cast<int>(pa.size());
  Eigen::MatrixXd X(d.Y.cols(), s + q);
  for (int k = 0; k < s; ++k) X.col(k) = w.z_sib.row(k).transpose();
  for (int k = 0; k < q; ++k) X.col(s + k) = d.Y.row(pa[k]).transpose();
  return X;
}

bool rows_independent(const Eigen::MatrixXd& cols) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(cols);
  return qr.rank() == cols.cols();
}

bool structurally_acyclic_at(const MixedGraph& g, NodeId i) {
  for (NodeId p : g.parents(i)) {
    if (g.directed_edge_on_cycle(p, i)) return false;
  }
  return true;
}

}  // namespace

BlockContext block_context(const MixedGraph& g, const Dataset& d, const Params& p, NodeId i) {
  BlockWork w = build_block_work(g, d, p, i);
  return BlockContext{std::move(w.eps_rest), std::move(w.z_sib), w.omega_cond};
}

Params block_update(const MixedGraph& g, const Dataset& d, const Params& p, NodeId i,
                    UpdateRoute route) {
  BlockWork work = build_block_work(g, d, p, i);
  const auto& pa = g.parents(i);
  const auto& sib = g.siblings(i);
  const int s = static_cast<int>(sib.size());
  const int q = static_cast<int>(pa.size());
  const int m = s + q;
  const int n = g.n_nodes();
  const double N = static_cast<double>(d.n_samples);

  Eigen::MatrixXd X = design_matrix(work, d, pa);
  Eigen::VectorXd y = d.Y.row(i).transpose();

  // (A1)_i certified by a pivoted factorization before any unpivoted solve.
  Eigen::MatrixXd aug(d.Y.cols(), m + 1);
  aug.leftCols(m) = X;
  aug.col(m) = y;
  if (!rows_independent(aug)) {
    throw BlockUpdateError(FitStatusKind::A1Violation, i,
                           "block update: (A1) fails at node " + std::to_string(i));
  }

  const bool struct_zero = structurally_acyclic_at(g, i);
  DetCoeffs dc;
  if (!struct_zero || route == UpdateRoute::RatioPipeline) {
    dc = det_coeffs(g, p.B, i);
  } else {
    dc.c_pa = Eigen::VectorXd::Zero(q);
  }
  const bool cpa_zero = (q == 0) || (dc.c_pa.cwiseAbs().maxCoeff() == 0.0);

  bool use_ls = cpa_zero;
  if (route == UpdateRoute::LeastSquares) {
    if (!cpa_zero) {
      throw ValidationError("block update: least-squares route requires c_pa = 0");
    }
    use_ls = true;
  } else if (route == UpdateRoute::RatioPipeline) {
    use_ls = false;
  }

  Eigen::VectorXd alpha(m);
  double resid_sq = 0.0;
  if (m == 0) {
    resid_sq = y.squaredNorm();
  } else if (use_ls) {
    alpha = Eigen::HouseholderQR<Eigen::MatrixXd>(X).solve(y);
    resid_sq = (y - X * alpha).squaredNorm();
  } else {
    RatioProblem prob;
    prob.y = y;
    prob.X = X;
    prob.c0 = dc.c0;
    prob.c = Eigen::VectorXd::Zero(m);
    prob.c.tail(q) = dc.c_pa;
    RatioSolution sol;
    try {
      sol = solve_ratio(prob);
    } catch (const RankDeficientError&) {
      throw BlockUpdateError(FitStatusKind::A1Violation, i,
                             "block update: design matrix rank-deficient at node " +
                                 std::to_string(i));
    }
    if (auto* u = std::get_if<RatioUnique>(&sol)) {
      alpha = u->alpha_star;
      resid_sq = u->residual_sq;
    } else if (std::holds_alternative<RatioNonUnique>(sol)) {
      throw BlockUpdateError(FitStatusKind::UpdateNonUnique, i,
                             "block update: non-unique optimum at node " + std::to_string(i));
    } else {
      throw BlockUpdateError(FitStatusKind::UpdateNoMinimum, i,
                             "block update: no minimum at node " + std::to_string(i));
    }
  }

  const double omega_hat = resid_sq / N;
  if (!(omega_hat > 0.0) || !std::isfinite(omega_hat)) {
    throw BlockUpdateError(FitStatusKind::A1Violation, i,
                           "block update: zero conditional variance at node " +
                               std::to_string(i));
  }

  Params out = p;
  out.B.row(i).setZero();
  for (int k = 0; k < q; ++k) out.B(i, pa[k]) = alpha(s + k);
  for (int j = 0; j < n; ++j) {
    if (j != i) {
      out.Omega(i, j) = 0.0;
      out.Omega(j, i) = 0.0;
    }
  }
  for (int k = 0; k < s; ++k) {
    out.Omega(i, sib[k]) = alpha(k);
    out.Omega(sib[k], i) = alpha(k);
  }
  Eigen::VectorXd omega_col(n - 1);
  for (int a = 0; a < n - 1; ++a) omega_col(a) = out.Omega(work.rest[a], i);
  out.Omega(i, i) = omega_hat + omega_col.dot(work.llt_rest.solve(omega_col));
  return out;
}

bool check_A1(const MixedGraph& g, const Dataset& d, const Params& p, NodeId i) {
  BlockWork work = build_block_work(g, d, p, i);
  const auto& pa = g.parents(i);
  const int m = static_cast<int>(work.z_sib.rows() + pa.size());
  Eigen::MatrixXd aug(d.Y.cols(), m + 1);
  aug.leftCols(m) = design_matrix(work, d, pa);
  aug.col(m) = d.Y.row(i).transpose();
  return rows_independent(aug);
}

bool check_A2(const MixedGraph& g, const Dataset& d, const Params& p, NodeId i) {
  BlockWork work = build_block_work(g, d, p, i);
  const auto& pa = g.parents(i);
  const int s = static_cast<int>(work.z_sib.rows());
  const int q = static_cast<int>(pa.size());
  if (s + q == 0) return true;  // no regression; nothing can degenerate

  DetCoeffs dc = det_coeffs(g, p.B, i);
  Eigen::MatrixXd X = design_matrix(work, d, pa);
  Eigen::VectorXd alpha_hat =
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(X).solve(d.Y.row(i).transpose());
  Eigen::VectorXd b_hat = alpha_hat.tail(q);
  const double value = dc.c0 + b_hat.dot(dc.c_pa);
  const double tol = 1e-12 * (std::abs(dc.c0) + b_hat.norm() * dc.c_pa.norm() + 1.0);
  return std::abs(value) > tol;
}

namespace {

// Residual-covariance Omega on the sparsity pattern, rescaled so off-diagonal row
// sums approach 0.9 of the diagonal: each entry is scaled by the smaller of its two
// row targets, which keeps the matrix symmetric and strictly diagonally dominant
// (rows meet the 0.9 identity exactly where the smaller target binds).
Eigen::MatrixXd residual_omega(const MixedGraph& g, const Eigen::MatrixXd& resid, double N) {
  const int n = g.n_nodes();
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) omega(i, i) = resid.row(i).squaredNorm() / N;
  for (const auto& [a, b] : g.bidirected_edges()) {
    const double cov = resid.row(a).dot(resid.row(b)) / N;
    omega(a, b) = cov;
    omega(b, a) = cov;
  }

  Eigen::VectorXd mass = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    for (NodeId j : g.siblings(i)) mass(i) += std::abs(omega(i, j));
  }
  for (const auto& [a, b] : g.bidirected_edges()) {
    if (omega(a, b) == 0.0) continue;
    const double ta = mass(a) > 0.0 ? 0.9 * omega(a, a) / mass(a)
                                    : std::numeric_limits<double>::infinity();
    const double tb = mass(b) > 0.0 ? 0.9 * omega(b, b) / mass(b)
                                    : std::numeric_limits<double>::infinity();
    const double scale = std::min(ta, tb);
    omega(a, b) *= scale;
    omega(b, a) *= scale;
  }
  return omega;
}

void ensure_invertible(Eigen::MatrixXd& B) {
  for (int tries = 0; tries < 200; ++tries) {
    const double det = det_i_minus_b(B);
    if (std::abs(det) > 1e-12 && std::isfinite(det)) return;
    B *= 0.95;
  }
  throw SingularError("initialization: could not make I - B invertible");
}

}  // namespace

Params init_params(const MixedGraph& g, const Dataset& d, bool* ridge_flag) {
  const int n = g.n_nodes();
  if (d.Y.rows() != n) throw DataError("init: data/graph dimension mismatch");
  if (ridge_flag) *ridge_flag = false;

  Params p;
  p.B = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd resid = d.Y;
  for (int i = 0; i < n; ++i) {
    const auto& pa = g.parents(i);
    const int q = static_cast<int>(pa.size());
    if (q == 0) continue;
    Eigen::MatrixXd Xp(d.Y.cols(), q);
    for (int k = 0; k < q; ++k) Xp.col(k) = d.Y.row(pa[k]).transpose();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xp);
    Eigen::VectorXd coef;
    if (qr.rank() < q) {
      Eigen::MatrixXd G = Xp.transpose() * Xp;
      G.diagonal().array() += 1e-8;
      coef = Eigen::LDLT<Eigen::MatrixXd>(G).solve(Xp.transpose() * d.Y.row(i).transpose());
      if (ridge_flag) *ridge_flag = true;
    } else {
      coef = qr.solve(d.Y.row(i).transpose());
    }
    for (int k = 0; k < q; ++k) p.B(i, pa[k]) = coef(k);
    resid.row(i) = d.Y.row(i) - coef.transpose() * Xp.transpose();
  }

  p.Omega = residual_omega(g, resid, static_cast<double>(d.n_samples));
  ensure_invertible(p.B);
  return p;
}

Params init_params_random(const MixedGraph& g, const Dataset& d, std::uint64_t seed) {
  const int n = g.n_nodes();
  if (d.Y.rows() != n) throw DataError("init: data/graph dimension mismatch");
  Rng rng(seed);

  Params p;
  p.B = Eigen::MatrixXd::Zero(n, n);
  for (int tries = 0;; ++tries) {
    if (tries > 10000) throw SingularError("random init: could not draw invertible I - B");
    for (const auto& [t, h] : g.directed_edges()) p.B(h, t) = 0.1 * rng.normal();
    const double det = det_i_minus_b(p.B);
    if (std::abs(det) > 1e-6 && std::isfinite(det)) break;
  }

  Eigen::MatrixXd resid = d.Y;
  for (int i = 0; i < n; ++i) {
    for (NodeId q : g.parents(i)) resid.row(i) -= p.B(i, q) * d.Y.row(q);
  }
  p.Omega = residual_omega(g, resid, static_cast<double>(d.n_samples));
  for (const auto& [a, b] : g.bidirected_edges()) {
    const double shrink = 0.5 + 0.5 * rng.uniform();
    p.Omega(a, b) *= shrink;
    p.Omega(b, a) *= shrink;
  }
  for (int i = 0; i < n; ++i) p.Omega(i, i) *= 1.0 + 0.1 * rng.chi2_1();
  return p;
}

FitResult fit(const MixedGraph& g, const Dataset& d, const FitConfig& cfg) {
  return fit(g, d, cfg, UpdateObserver{});
}

FitResult fit(const MixedGraph& g, const Dataset& d, const FitConfig& cfg,
              const UpdateObserver& observer) {
  const int n = g.n_nodes();
  if (d.Y.rows() != n) throw DataError("fit: data/graph dimension mismatch");
  if (cfg.max_sweeps < 1) throw ConfigError("fit: max_sweeps must be >= 1");
  if (cfg.tol_loglik <= 0.0 || cfg.tol_param <= 0.0) {
    throw ConfigError("fit: tolerances must be positive");
  }

  FitResult res;
  if (cfg.check_conditions) {
    res.wellposed_warning = !is_well_posed(g).overall;
  }

  Params p;
  switch (cfg.init) {
    case InitKind::Provided:
      if (!cfg.init_params) throw ConfigError("fit: init=Provided without parameters");
      validate_params(g, *cfg.init_params);
      p = *cfg.init_params;
      break;
    case InitKind::RandomSeeded:
      p = init_params_random(g, d, cfg.seed);
      break;
    case InitKind::LeastSquaresDiagDominant:
      p = init_params(g, d, &res.ridge_fallback_used);
      break;
  }

  NodeSchedule schedule = classify_nodes(g);
  std::vector<NodeId> full_order;
  std::vector<NodeId> iter_order;
  if (cfg.node_order) {
    full_order = *cfg.node_order;
    std::vector<bool> seen(n, false);
    if (static_cast<int>(full_order.size()) != n) {
      throw ConfigError("fit: node_order must be a permutation of all nodes");
    }
    for (NodeId v : full_order) {
      if (v < 0 || v >= n || seen[v]) {
        throw ConfigError("fit: node_order must be a permutation of all nodes");
      }
      seen[v] = true;
    }
    std::vector<bool> is_iter(n, false);
    for (NodeId v : schedule.iterative) is_iter[v] = true;
    for (NodeId v : full_order) {
      if (is_iter[v]) iter_order.push_back(v);
    }
  } else {
    full_order = schedule.one_shot;
    full_order.insert(full_order.end(), schedule.iterative.begin(), schedule.iterative.end());
    iter_order = schedule.iterative;
  }

  const bool track_updates = static_cast<bool>(observer) || cfg.debug_check_monotone;
  double ll_prev_update = track_updates ? log_likelihood(g, d, p)
                                        : -std::numeric_limits<double>::infinity();
  double prev_ll = std::numeric_limits<double>::quiet_NaN();

  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    const auto& nodes = (sweep == 1) ? full_order : iter_order;
    double max_change = 0.0;
    for (NodeId i : nodes) {
      Params pn;
      try {
        pn = block_update(g, d, p, i);
      } catch (const BlockUpdateError& e) {
        res.params = std::move(p);
        res.sweeps_used = sweep;
        res.status = FitStatus{e.kind(), e.node()};
        res.score_norm = score_inf_norm(score(g, d, res.params));
        return res;
      }
      const double change = std::max((pn.B - p.B).cwiseAbs().maxCoeff(),
                                     (pn.Omega - p.Omega).cwiseAbs().maxCoeff());
      max_change = std::max(max_change, change);
      p = std::move(pn);
      if (track_updates) {
        const bool pd = Eigen::LLT<Eigen::MatrixXd>(p.Omega).info() == Eigen::Success;
        const double ll_now =
            pd ? log_likelihood(g, d, p) : -std::numeric_limits<double>::infinity();
        if (cfg.debug_check_monotone && !(ll_now >= ll_prev_update - 1e-9)) {
          throw Error("fit: block update decreased the log-likelihood at node " +
                      std::to_string(i));
        }
        ll_prev_update = ll_now;
        if (observer) observer(UpdateEvent{sweep, i, ll_now, pd, change});
      }
    }

    res.loglik_trace.push_back(log_likelihood(g, d, p));
    res.sweeps_used = sweep;
    if (iter_order.empty()) {
      res.status.kind = FitStatusKind::Converged;
      break;
    }
    if (sweep >= 2 && std::abs(res.loglik_trace.back() - prev_ll) < cfg.tol_loglik &&
        max_change < cfg.tol_param) {
      res.status.kind = FitStatusKind::Converged;
      break;
    }
    prev_ll = res.loglik_trace.back();
    if (sweep == cfg.max_sweeps) res.status.kind = FitStatusKind::MaxSweeps;
  }

  res.params = std::move(p);
  res.score_norm = score_inf_norm(score(g, d, res.params));
  return res;
}

}  // namespace sembcd
