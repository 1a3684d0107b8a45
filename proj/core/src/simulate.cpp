#include "sembcd/simulate.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "sembcd/determinant.hpp"

namespace sembcd {

void validate_config(const SimConfig& cfg) {
  if (cfg.n_nodes < 1) throw ConfigError("sim config: need at least one node");
  if (cfg.cycle_len == 1 || cfg.cycle_len < 0 || cfg.cycle_len > cfg.n_nodes) {
    throw ConfigError("sim config: cycle length must be 0 or in [2, |V|]");
  }
  if (cfg.p_directed < 0.0 || cfg.p_bidirected < 0.0 ||
      cfg.p_directed + cfg.p_bidirected > 1.0) {
    throw ConfigError("sim config: need d, b >= 0 and d + b <= 1");
  }
  if (cfg.replications < 0) throw ConfigError("sim config: negative replication count");
  if (cfg.sample_size < cfg.n_nodes) {
    throw ConfigError("sim config: sample size must be at least |V|");
  }
}

MixedGraph random_graph(const SimConfig& cfg, Rng& rng) {
  validate_config(cfg);
  const int n = cfg.n_nodes;
  const int k = cfg.cycle_len;

  std::vector<Edge> directed;
  std::vector<Edge> bidirected;
  for (int j = 0; j + 1 < k; ++j) directed.emplace_back(j, j + 1);
  if (k >= 2) directed.emplace_back(k - 1, 0);

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (i < k && j < k) continue;  // keep the seeded cycle unique
      const double u = rng.uniform();
      if (u <= cfg.p_directed) {
        directed.emplace_back(i, j);
      } else if (u <= cfg.p_directed + cfg.p_bidirected) {
        bidirected.emplace_back(i, j);
      }
    }
  }

  // Uniform random relabeling (Fisher-Yates).
  std::vector<NodeId> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  for (auto& [t, h] : directed) {
    t = perm[t];
    h = perm[h];
  }
  for (auto& [a, b] : bidirected) {
    a = perm[a];
    b = perm[b];
  }
  return MixedGraph(n, std::move(directed), std::move(bidirected));
}

Params random_params(const MixedGraph& g, Rng& rng, int* redraw_count) {
  const int n = g.n_nodes();
  if (redraw_count) *redraw_count = 0;

  Params p;
  p.B = Eigen::MatrixXd::Zero(n, n);
  for (int tries = 0;; ++tries) {
    if (tries > 10000) throw SingularError("random_params: could not draw invertible I - B");
    for (const auto& [t, h] : g.directed_edges()) p.B(h, t) = rng.normal();
    const double det = det_i_minus_b(p.B);
    if (std::abs(det) >= 1e-8 && std::isfinite(det)) break;
    if (redraw_count) ++(*redraw_count);
  }

  p.Omega = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [a, b] : g.bidirected_edges()) {
    const double w = rng.normal();
    p.Omega(a, b) = w;
    p.Omega(b, a) = w;
  }
  for (int i = 0; i < n; ++i) {
    double row_mass = 0.0;
    for (NodeId j : g.siblings(i)) row_mass += std::abs(p.Omega(i, j));
    p.Omega(i, i) = 1.0 + row_mass + rng.chi2_1();
  }
  return p;
}

Dataset sample_data(const Params& p, int n_samples, Rng& rng) {
  const int n = static_cast<int>(p.B.rows());
  if (n_samples < n) throw DataError("sample_data: need at least |V| observations");

  Eigen::MatrixXd sigma = implied_covariance(p);
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw SingularError("sample_data: implied covariance not positive definite");
  }
  Eigen::MatrixXd L = llt.matrixL();

  for (int tries = 0; tries < 100; ++tries) {
    Eigen::MatrixXd G(n, n_samples);
    for (int col = 0; col < n_samples; ++col) {
      for (int row = 0; row < n; ++row) G(row, col) = rng.normal();
    }
    try {
      return make_dataset(L * G);
    } catch (const DataError&) {
      // rank-deficient draw; try again
    }
  }
  throw DataError("sample_data: repeated rank-deficient draws");
}

namespace {

struct RepOutcome {
  bool converged = false;
  bool update_failure = false;
  int sweeps = 0;
  double ms = 0.0;
};

RepOutcome run_replication(const SimConfig& cfg, const FitConfig& fit_cfg, const Rng& root,
                           std::uint64_t rep) {
  RepOutcome out;
  Rng rng = root.stream(rep);
  try {
    MixedGraph g = random_graph(cfg, rng);
    Params truth = random_params(g, rng);
    Dataset data = sample_data(truth, cfg.sample_size, rng);

    const auto t0 = std::chrono::steady_clock::now();
    FitResult fr = fit(g, data, fit_cfg);
    const auto t1 = std::chrono::steady_clock::now();
    out.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    out.sweeps = fr.sweeps_used;
    switch (fr.status.kind) {
      case FitStatusKind::Converged:
        out.converged = true;
        break;
      case FitStatusKind::MaxSweeps:
        break;
      default:
        out.update_failure = true;
        break;
    }
  } catch (const Error&) {
    out.update_failure = true;
  }
  return out;
}

}  // namespace

BenchRow run_benchmark(const SimConfig& cfg, const FitConfig& fit_cfg, int n_threads) {
  validate_config(cfg);
  BenchRow row;
  row.config = cfg;
  const int reps = cfg.replications;
  if (reps == 0) return row;

  Rng root(cfg.seed);
  std::vector<RepOutcome> outcomes(reps);
  n_threads = std::max(1, std::min<int>(n_threads, reps));
  if (n_threads == 1) {
    for (int r = 0; r < reps; ++r) {
      outcomes[r] = run_replication(cfg, fit_cfg, root, static_cast<std::uint64_t>(r));
    }
  } else {
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w) {
      workers.emplace_back([&, w]() {
        for (int r = w; r < reps; r += n_threads) {
          outcomes[r] = run_replication(cfg, fit_cfg, root, static_cast<std::uint64_t>(r));
        }
      });
    }
    for (auto& t : workers) t.join();
  }

  double sweep_sum = 0.0;
  double ms_sum = 0.0;
  for (const RepOutcome& o : outcomes) {
    if (o.converged) {
      ++row.n_converged;
      sweep_sum += o.sweeps;
      ms_sum += o.ms;
    }
    if (o.update_failure) ++row.n_update_failures;
  }
  if (row.n_converged > 0) {
    row.mean_sweeps = sweep_sum / row.n_converged;
    row.mean_cpu_ms = ms_sum / row.n_converged;
  }
  return row;
}

}  // namespace sembcd
