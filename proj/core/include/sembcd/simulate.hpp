#pragma once

#include <cstdint>

#include "sembcd/bcd.hpp"
#include "sembcd/graph.hpp"
#include "sembcd/likelihood.hpp"
#include "sembcd/rng.hpp"

namespace sembcd {

/// Random-model configuration: a seeded directed cycle of length k (k = 0 for
/// acyclic, k = 1 is invalid), then directed edges with probability d and
/// bi-directed edges with probability b over the eligible node pairs.
struct SimConfig {
  int n_nodes = 10;
  int sample_size = 100;
  int cycle_len = 0;
  double p_directed = 0.1;
  double p_bidirected = 0.05;
  int replications = 0;
  std::uint64_t seed = 0;
};

void validate_config(const SimConfig& cfg);

/// Seeds the cycle 0 -> 1 -> ... -> k-1 -> 0, draws one uniform per eligible pair
/// i < j (directed i -> j below d, bi-directed below d + b; pairs inside the seed
/// cycle are excluded so the cycle stays unique), then applies a uniformly random
/// node relabeling. The result is bow-free with exactly one directed cycle.
MixedGraph random_graph(const SimConfig& cfg, Rng& rng);

/// Free off-diagonal entries of B and Omega i.i.d. Normal(0,1); each omega_ii is
/// one plus the absolute row sum plus a chi-squared(1) draw, so Omega is
/// diagonally dominant and positive definite. B is redrawn (counted through
/// redraw_count) while |det(I-B)| < 1e-8.
Params random_params(const MixedGraph& g, Rng& rng, int* redraw_count = nullptr);

/// N i.i.d. columns from Normal(0, Sigma(p)) via the Cholesky factor of the
/// implied covariance. Redraws on the measure-zero event of a rank-deficient draw.
Dataset sample_data(const Params& p, int n_samples, Rng& rng);

struct BenchRow {
  SimConfig config;
  int n_converged = 0;
  double mean_sweeps = 0.0;   // over converged replications
  double mean_cpu_ms = 0.0;   // wall time of fit() only, over converged replications
  int n_update_failures = 0;  // aborted block updates (non-unique / no minimum / rank)
};

/// replications x {random_graph, random_params, sample_data, fit}. Replication r
/// uses the RNG stream r of the config seed, so results are reproducible and
/// independent of the thread count.
BenchRow run_benchmark(const SimConfig& cfg, const FitConfig& fit_cfg, int n_threads = 1);

}  // namespace sembcd
