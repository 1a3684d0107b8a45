#include <benchmark/benchmark.h>

#include <variant>

#include "sembcd/bcd.hpp"
#include "sembcd/ratio_qp.hpp"
#include "sembcd/rng.hpp"
#include "sembcd/simulate.hpp"
#include "sembcd/wellposed.hpp"

namespace {

using namespace sembcd;

RatioProblem make_ratio_problem(int n, int m, std::uint64_t seed) {
  Rng rng(seed);
  RatioProblem p;
  p.X.resize(n, m);
  p.y.resize(n);
  p.c.resize(m);
  for (int i = 0; i < n; ++i) {
    p.y(i) = rng.normal();
    for (int j = 0; j < m; ++j) p.X(i, j) = rng.normal();
  }
  for (int j = 0; j < m; ++j) p.c(j) = rng.normal();
  p.c0 = 2.0 + rng.uniform();
  return p;
}

void BM_LeastSquares(benchmark::State& state) {
  RatioProblem p = make_ratio_problem(static_cast<int>(state.range(0)),
                                      static_cast<int>(state.range(1)), 1);
  for (auto _ : state) {
    Eigen::VectorXd a = Eigen::HouseholderQR<Eigen::MatrixXd>(p.X).solve(p.y);
    benchmark::DoNotOptimize(a);
  }
}
BENCHMARK(BM_LeastSquares)->Args({500, 50})->Args({2000, 100});

void BM_SolveRatio(benchmark::State& state) {
  RatioProblem p = make_ratio_problem(static_cast<int>(state.range(0)),
                                      static_cast<int>(state.range(1)), 1);
  for (auto _ : state) {
    RatioSolution sol = solve_ratio(p);
    benchmark::DoNotOptimize(sol);
  }
}
BENCHMARK(BM_SolveRatio)->Args({500, 50})->Args({2000, 100});

struct FitInstance {
  MixedGraph g;
  Dataset d;
  Params init;
};

FitInstance make_fit_instance(int n_nodes, int n_samples, int cycle_len) {
  SimConfig cfg;
  cfg.n_nodes = n_nodes;
  cfg.sample_size = n_samples;
  cfg.cycle_len = cycle_len;
  cfg.p_directed = 0.15;
  cfg.p_bidirected = 0.075;
  Rng rng(99);
  MixedGraph g = random_graph(cfg, rng);
  Params truth = random_params(g, rng);
  Dataset d = sample_data(truth, n_samples, rng);
  Params init = init_params(g, d);
  return FitInstance{std::move(g), std::move(d), std::move(init)};
}

void BM_BlockUpdate(benchmark::State& state) {
  FitInstance inst =
      make_fit_instance(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 4);
  NodeId node = 0;
  for (NodeId i = 0; i < inst.g.n_nodes(); ++i) {
    if (inst.g.node_on_cycle(i)) node = i;
  }
  for (auto _ : state) {
    Params p = block_update(inst.g, inst.d, inst.init, node);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_BlockUpdate)->Args({10, 100})->Args({20, 200})->Args({50, 500});

void BM_Fit(benchmark::State& state) {
  FitInstance inst =
      make_fit_instance(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 4);
  for (auto _ : state) {
    FitResult fr = fit(inst.g, inst.d, FitConfig{});
    benchmark::DoNotOptimize(fr);
  }
}
BENCHMARK(BM_Fit)->Unit(benchmark::kMillisecond)->Args({10, 100})->Args({20, 200});

void BM_WellPosed(benchmark::State& state) {
  Rng rng(7);
  const int n = static_cast<int>(state.range(0));
  std::vector<Edge> dir;
  std::vector<Edge> bi;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && rng.uniform() < 0.1) dir.emplace_back(i, j);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.uniform() < 0.1) bi.emplace_back(i, j);
    }
  }
  MixedGraph g(n, std::move(dir), std::move(bi));
  for (auto _ : state) {
    WellPosedReport rep = is_well_posed(g);
    benchmark::DoNotOptimize(rep);
  }
}
BENCHMARK(BM_WellPosed)->Unit(benchmark::kMillisecond)->Arg(30)->Arg(60);

}  // namespace

BENCHMARK_MAIN();
