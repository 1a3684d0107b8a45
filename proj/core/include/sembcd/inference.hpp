#pragma once

#include <vector>

#include "sembcd/bcd.hpp"
#include "sembcd/graph.hpp"
#include "sembcd/rng.hpp"

namespace sembcd {

/// True iff every edge of g_null is an edge of g_alt (same node count).
bool is_nested(const MixedGraph& g_null, const MixedGraph& g_alt);

/// P(chi^2_df > x) via the regularized upper incomplete gamma function.
double chi2_upper_tail(double x, int df);

struct LrtResult {
  double stat = 0.0;    // N * (l_alt - l_null), the classical -2 log Lambda
  double p_chi2 = 1.0;  // upper chi^2 tail with df = difference in free parameters
  int df = 0;
  FitResult fit_null;
  FitResult fit_alt;
};

/// Fits the null model, then the alternative initialized at the null's optimum
/// (which makes the statistic non-negative up to convergence tolerance).
/// Throws NotNestedError for non-nested graphs and BlockUpdateError when either
/// fit aborts.
LrtResult lrt(const MixedGraph& g_null, const MixedGraph& g_alt, const Dataset& d,
              const FitConfig& cfg);

struct SubsampleResult {
  std::vector<double> stats;  // one entry per successful subsample
  double empirical_p = 0.0;   // fraction of subsample stats >= the comparison stat
  int b = 0;
  int n_sub = 0;
  int n_failed = 0;
  double full_stat = 0.0;
  bool scaled = false;  // comparison stat multiplied by b/N
};

/// n_sub subsamples of size b drawn without replacement; each subsample repeats
/// the full LRT protocol. Failed subsample fits are counted and excluded.
SubsampleResult subsample_lrt(const MixedGraph& g_null, const MixedGraph& g_alt,
                              const Dataset& d, int b, int n_sub, const FitConfig& cfg,
                              Rng& rng, bool scale_stat = false, int n_threads = 1);

}  // namespace sembcd
