#include "sembcd/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include <boost/math/special_functions/gamma.hpp>

namespace sembcd {

bool is_nested(const MixedGraph& g_null, const MixedGraph& g_alt) {
  if (g_null.n_nodes() != g_alt.n_nodes()) return false;
  for (const auto& [t, h] : g_null.directed_edges()) {
    if (!g_alt.has_directed(t, h)) return false;
  }
  for (const auto& [a, b] : g_null.bidirected_edges()) {
    if (!g_alt.has_bidirected(a, b)) return false;
  }
  return true;
}

double chi2_upper_tail(double x, int df) {
  if (x < 0.0) throw ValidationError("chi2_upper_tail: negative statistic");
  if (df < 1) throw ValidationError("chi2_upper_tail: df must be positive");
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

namespace {

void require_abort_free(const FitResult& fr, const char* which) {
  switch (fr.status.kind) {
    case FitStatusKind::Converged:
    case FitStatusKind::MaxSweeps:
      return;
    default:
      throw BlockUpdateError(fr.status.kind, fr.status.node,
                             std::string("lrt: ") + which + " fit aborted at node " +
                                 std::to_string(fr.status.node));
  }
}

}  // namespace

LrtResult lrt(const MixedGraph& g_null, const MixedGraph& g_alt, const Dataset& d,
              const FitConfig& cfg) {
  if (!is_nested(g_null, g_alt)) {
    throw NotNestedError("lrt: null model is not nested in the alternative");
  }

  LrtResult out;
  out.fit_null = fit(g_null, d, cfg);
  require_abort_free(out.fit_null, "null");

  FitConfig alt_cfg = cfg;
  alt_cfg.init = InitKind::Provided;
  alt_cfg.init_params = out.fit_null.params;
  out.fit_alt = fit(g_alt, d, alt_cfg);
  require_abort_free(out.fit_alt, "alternative");

  out.stat = d.n_samples *
             (out.fit_alt.loglik_trace.back() - out.fit_null.loglik_trace.back());
  out.df = free_param_count(g_alt) - free_param_count(g_null);
  out.p_chi2 = out.df > 0 ? chi2_upper_tail(std::max(0.0, out.stat), out.df) : 1.0;
  return out;
}

SubsampleResult subsample_lrt(const MixedGraph& g_null, const MixedGraph& g_alt,
                              const Dataset& d, int b, int n_sub, const FitConfig& cfg,
                              Rng& rng, bool scale_stat, int n_threads) {
  if (n_sub < 1) throw ValidationError("subsample_lrt: need at least one subsample");
  if (b > d.n_samples) throw ValidationError("subsample_lrt: subsample size exceeds N");
  if (b < static_cast<int>(d.Y.rows())) {
    throw ValidationError("subsample_lrt: subsample size below the number of variables");
  }

  SubsampleResult out;
  out.b = b;
  out.n_sub = n_sub;
  out.scaled = scale_stat;
  out.full_stat = lrt(g_null, g_alt, d, cfg).stat;

  const Rng root = rng.stream(0x5ebcdull);
  std::vector<double> stats(n_sub, std::numeric_limits<double>::quiet_NaN());

  auto run_one = [&](int j) {
    Rng r = root.stream(static_cast<std::uint64_t>(j));
    // partial Fisher-Yates: first b entries are a uniform subset without replacement
    std::vector<int> idx(d.n_samples);
    for (int k = 0; k < d.n_samples; ++k) idx[k] = k;
    for (int k = 0; k < b; ++k) {
      const int pick =
          k + static_cast<int>(r.uniform_index(static_cast<std::uint64_t>(d.n_samples - k)));
      std::swap(idx[k], idx[pick]);
    }
    Eigen::MatrixXd Ysub(d.Y.rows(), b);
    for (int k = 0; k < b; ++k) Ysub.col(k) = d.Y.col(idx[k]);
    try {
      Dataset dsub = make_dataset(Ysub);
      stats[j] = lrt(g_null, g_alt, dsub, cfg).stat;
    } catch (const Error&) {
      // counted as a failed subsample below
    }
  };

  n_threads = std::max(1, std::min(n_threads, n_sub));
  if (n_threads == 1) {
    for (int j = 0; j < n_sub; ++j) run_one(j);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w) {
      workers.emplace_back([&, w]() {
        for (int j = w; j < n_sub; j += n_threads) run_one(j);
      });
    }
    for (auto& t : workers) t.join();
  }

  for (double s : stats) {
    if (std::isnan(s)) {
      ++out.n_failed;
    } else {
      out.stats.push_back(s);
    }
  }
  if (out.stats.empty()) {
    throw ValidationError("subsample_lrt: every subsample fit failed");
  }
  const double cmp = scale_stat
                         ? out.full_stat * (static_cast<double>(b) / d.n_samples)
                         : out.full_stat;
  const auto count = std::count_if(out.stats.begin(), out.stats.end(),
                                   [cmp](double s) { return s >= cmp; });
  out.empirical_p = static_cast<double>(count) / static_cast<double>(out.stats.size());
  return out;
}

}  // namespace sembcd
