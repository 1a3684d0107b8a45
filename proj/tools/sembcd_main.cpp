#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sembcd/bcd.hpp"
#include "sembcd/data_io.hpp"
#include "sembcd/graph.hpp"
#include "sembcd/inference.hpp"
#include "sembcd/serialize.hpp"
#include "sembcd/simulate.hpp"
#include "sembcd/wellposed.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitFitFailure = 4;

struct DataFlags {
  bool header = false;
  bool center = false;
  bool standardize = false;
};

void add_data_flags(CLI::App* cmd, DataFlags& flags) {
  cmd->add_flag("--header", flags.header, "First CSV line is a header row");
  cmd->add_flag("--center", flags.center, "Subtract the mean of each variable");
  cmd->add_flag("--standardize", flags.standardize,
                "Center and rescale each variable to unit variance");
}

sembcd::Dataset load_dataset(const std::string& path, const DataFlags& flags) {
  Eigen::MatrixXd Y = sembcd::read_data_csv(path, flags.header);
  if (flags.standardize) {
    Y = sembcd::standardize_variables(Y);
  } else if (flags.center) {
    Y = sembcd::center_variables(Y);
  }
  return sembcd::make_dataset(Y);
}

struct FitFlags {
  double tol_loglik = 1e-8;
  double tol_param = 1e-6;
  int max_sweeps = 5000;
  std::string init = "ls";
  std::uint64_t seed = 0;
  bool check_conditions = false;
};

void add_fit_flags(CLI::App* cmd, FitFlags& flags) {
  cmd->add_option("--tol-loglik", flags.tol_loglik,
                  "Convergence threshold on the log-likelihood change");
  cmd->add_option("--tol-param", flags.tol_param,
                  "Convergence threshold on the max-abs parameter change");
  cmd->add_option("--max-sweeps", flags.max_sweeps, "Sweep cap before divergence is assumed");
  cmd->add_option("--init", flags.init, "Initialization: ls or random")
      ->check(CLI::IsMember({"ls", "random"}));
  cmd->add_option("--seed", flags.seed, "Seed for random initialization");
}

sembcd::FitConfig to_fit_config(const FitFlags& flags) {
  sembcd::FitConfig cfg;
  cfg.tol_loglik = flags.tol_loglik;
  cfg.tol_param = flags.tol_param;
  cfg.max_sweeps = flags.max_sweeps;
  cfg.init = flags.init == "random" ? sembcd::InitKind::RandomSeeded
                                    : sembcd::InitKind::LeastSquaresDiagDominant;
  cfg.seed = flags.seed;
  cfg.check_conditions = flags.check_conditions;
  return cfg;
}

int resolve_threads(int requested) {
  if (const char* env = std::getenv("SEM_BCD_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

int cmd_validate(const std::string& graph_path) {
  sembcd::MixedGraph g = sembcd::MixedGraph::load(graph_path);
  sembcd::WellPosedReport rep = sembcd::is_well_posed(g);
  std::cout << sembcd::to_json_text(rep, 2) << "\n";
  if (!rep.overall) {
    std::cerr << "warning: " << rep.warning << "\n";
    return kExitValidation;
  }
  return 0;
}

int cmd_fit(const std::string& graph_path, const std::string& data_path,
            const DataFlags& data_flags, const FitFlags& fit_flags,
            const std::string& out_params) {
  sembcd::MixedGraph g = sembcd::MixedGraph::load(graph_path);
  sembcd::Dataset d = load_dataset(data_path, data_flags);
  if (d.Y.rows() != g.n_nodes()) {
    throw sembcd::DataError("fit: CSV has " + std::to_string(d.Y.rows()) +
                            " variables but the graph has " + std::to_string(g.n_nodes()) +
                            " nodes");
  }
  sembcd::FitResult fr = sembcd::fit(g, d, to_fit_config(fit_flags));
  std::cout << sembcd::to_json_text(fr, 2) << "\n";
  if (fr.wellposed_warning) {
    std::cerr << "warning: graph fails the half-collider path condition; "
                 "block updates may be degenerate and the model is not identifiable\n";
  }
  if (!out_params.empty()) {
    std::ofstream out(out_params);
    if (!out) throw sembcd::ParseError("cannot write " + out_params);
    out << sembcd::to_json_text(fr.params, 2) << "\n";
  }
  switch (fr.status.kind) {
    case sembcd::FitStatusKind::Converged:
    case sembcd::FitStatusKind::MaxSweeps:
      return 0;
    default:
      std::cerr << "fit aborted: " << sembcd::to_string(fr.status.kind) << " at node "
                << fr.status.node << "\n";
      return kExitFitFailure;
  }
}

int cmd_simulate(const sembcd::SimConfig& cfg, const std::string& out_prefix) {
  sembcd::validate_config(cfg);
  sembcd::Rng rng(cfg.seed);
  sembcd::MixedGraph g = sembcd::random_graph(cfg, rng);
  sembcd::Params truth = sembcd::random_params(g, rng);
  sembcd::Dataset d = sembcd::sample_data(truth, cfg.sample_size, rng);

  const std::string graph_file = out_prefix + ".graph.json";
  const std::string data_file = out_prefix + ".data.csv";
  const std::string params_file = out_prefix + ".params.json";
  {
    std::ofstream out(graph_file);
    if (!out) throw sembcd::ParseError("cannot write " + graph_file);
    out << g.to_json_text(2) << "\n";
  }
  sembcd::write_data_csv(data_file, d.Y);
  {
    std::ofstream out(params_file);
    if (!out) throw sembcd::ParseError("cannot write " + params_file);
    out << sembcd::to_json_text(truth, 2) << "\n";
  }

  nlohmann::json manifest{{"schema", 1},
                          {"graph", graph_file},
                          {"data", data_file},
                          {"params", params_file},
                          {"nodes", cfg.n_nodes},
                          {"samples", cfg.sample_size},
                          {"seed", cfg.seed}};
  std::cout << manifest.dump(2) << "\n";
  return 0;
}

int cmd_lrt(const std::string& null_path, const std::string& alt_path,
            const std::string& data_path, const DataFlags& data_flags,
            const FitFlags& fit_flags, int subsample_b, int n_sub, bool scale_stat,
            int threads, std::uint64_t seed) {
  sembcd::MixedGraph g_null = sembcd::MixedGraph::load(null_path);
  sembcd::MixedGraph g_alt = sembcd::MixedGraph::load(alt_path);
  sembcd::Dataset d = load_dataset(data_path, data_flags);
  sembcd::FitConfig cfg = to_fit_config(fit_flags);

  sembcd::LrtResult r = sembcd::lrt(g_null, g_alt, d, cfg);
  nlohmann::json doc = nlohmann::json::parse(sembcd::to_json_text(r));
  if (n_sub > 0) {
    sembcd::Rng rng(seed);
    sembcd::SubsampleResult sub = sembcd::subsample_lrt(
        g_null, g_alt, d, subsample_b, n_sub, cfg, rng, scale_stat, resolve_threads(threads));
    nlohmann::json sub_doc = nlohmann::json::parse(sembcd::to_json_text(sub));
    sub_doc.erase("schema");
    doc["subsample"] = std::move(sub_doc);
  }
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_bench(int nodes, int samples, std::vector<int> cycles, std::vector<double> pdirs,
              const std::vector<double>& pbidirs, int reps, std::uint64_t seed, int threads,
              const FitFlags& fit_flags, const std::string& format) {
  if (cycles.empty()) cycles = {0};
  if (pdirs.empty()) pdirs = {0.1};

  std::vector<sembcd::BenchRow> rows;
  int config_index = 0;
  sembcd::Rng root(seed);
  for (int k : cycles) {
    for (std::size_t di = 0; di < pdirs.size(); ++di) {
      sembcd::SimConfig cfg;
      cfg.n_nodes = nodes;
      cfg.sample_size = samples;
      cfg.cycle_len = k;
      cfg.p_directed = pdirs[di];
      cfg.p_bidirected = di < pbidirs.size() ? pbidirs[di] : pdirs[di] / 2.0;
      cfg.replications = reps;
      cfg.seed = root.stream(static_cast<std::uint64_t>(config_index++)).seed();
      sembcd::validate_config(cfg);
      rows.push_back(
          sembcd::run_benchmark(cfg, to_fit_config(fit_flags), resolve_threads(threads)));
    }
  }

  if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows) {
      arr.push_back(nlohmann::json::parse(sembcd::to_json_text(row)));
    }
    std::cout << nlohmann::json{{"schema", 1}, {"rows", arr}}.dump(2) << "\n";
  } else {
    std::cout << sembcd::bench_csv_header() << "\n";
    for (const auto& row : rows) std::cout << sembcd::bench_csv_row(row) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximum likelihood estimation in Gaussian linear structural equation "
               "models on cyclic mixed graphs (block-coordinate descent)"};
  app.require_subcommand(1);

  std::string v_graph;
  CLI::App* validate = app.add_subcommand(
      "validate", "Check that every block update is generically unique and feasible");
  validate->add_option("graph", v_graph, "Graph JSON file")->required();

  std::string f_graph, f_data, f_out_params;
  DataFlags f_data_flags;
  FitFlags f_fit_flags;
  CLI::App* fitc = app.add_subcommand("fit", "Fit a mixed-graph model to CSV data");
  fitc->add_option("graph", f_graph, "Graph JSON file")->required();
  fitc->add_option("data", f_data, "CSV data, one observation per row")->required();
  add_data_flags(fitc, f_data_flags);
  add_fit_flags(fitc, f_fit_flags);
  fitc->add_flag("--check-conditions", f_fit_flags.check_conditions,
                 "Run the well-posedness checker before fitting");
  fitc->add_option("--out-params", f_out_params, "Write fitted (B, Omega) to this file");

  sembcd::SimConfig s_cfg;
  s_cfg.p_bidirected = -1.0;
  std::string s_out = "sim";
  CLI::App* sim = app.add_subcommand("simulate", "Draw a random model and dataset");
  sim->add_option("--nodes", s_cfg.n_nodes, "Number of variables");
  sim->add_option("--samples", s_cfg.sample_size, "Number of observations");
  sim->add_option("--cycle", s_cfg.cycle_len,
                  "Length of the seeded directed cycle (0 or >= 2)");
  sim->add_option("--pdir", s_cfg.p_directed, "Directed edge probability");
  sim->add_option("--pbidir", s_cfg.p_bidirected,
                  "Bi-directed edge probability (default pdir/2)");
  sim->add_option("--seed", s_cfg.seed, "RNG seed");
  sim->add_option("--out", s_out, "Output file prefix");

  std::string l_null, l_alt, l_data;
  DataFlags l_data_flags;
  FitFlags l_fit_flags;
  int l_subsample_b = 0, l_n_sub = 0, l_threads = 0;
  std::uint64_t l_seed = 0;
  bool l_scale_stat = false;
  CLI::App* lrtc = app.add_subcommand(
      "lrt", "Likelihood-ratio test of nested models, optionally with subsampling");
  lrtc->add_option("null", l_null, "Null-model graph JSON")->required();
  lrtc->add_option("alt", l_alt, "Alternative-model graph JSON")->required();
  lrtc->add_option("data", l_data, "CSV data")->required();
  add_data_flags(lrtc, l_data_flags);
  add_fit_flags(lrtc, l_fit_flags);
  lrtc->add_option("--subsample-b", l_subsample_b, "Subsample size b");
  lrtc->add_option("--n-sub", l_n_sub, "Number of subsamples (0 disables subsampling)");
  lrtc->add_flag("--scale-stat", l_scale_stat,
                 "Compare subsample statistics against (b/N) times the full statistic");
  lrtc->add_option("--threads", l_threads, "Worker threads for subsampling");
  lrtc->add_option("--subsample-seed", l_seed, "Seed for subsample selection");

  int b_nodes = 10, b_samples = 100, b_reps = 100, b_threads = 0;
  std::uint64_t b_seed = 0;
  std::vector<int> b_cycles;
  std::vector<double> b_pdirs, b_pbidirs;
  std::string b_format = "csv";
  FitFlags b_fit_flags;
  CLI::App* bench = app.add_subcommand(
      "bench", "Replicate {random graph, random params, sample, fit} and aggregate");
  bench->add_option("--nodes", b_nodes, "Number of variables");
  bench->add_option("--samples", b_samples, "Number of observations");
  bench->add_option("--cycle", b_cycles, "Cycle lengths (comma separated)")->delimiter(',');
  bench->add_option("--pdir", b_pdirs, "Directed edge probabilities (comma separated)")
      ->delimiter(',');
  bench->add_option("--pbidir", b_pbidirs, "Bi-directed edge probabilities (default pdir/2)")
      ->delimiter(',');
  bench->add_option("--reps", b_reps, "Replications per configuration");
  bench->add_option("--seed", b_seed, "Base seed");
  bench->add_option("--threads", b_threads,
                    "Worker threads (SEM_BCD_THREADS overrides; default: all cores)");
  bench->add_option("--format", b_format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  bench->add_option("--tol-loglik", b_fit_flags.tol_loglik,
                    "Convergence threshold on the log-likelihood change");
  bench->add_option("--tol-param", b_fit_flags.tol_param,
                    "Convergence threshold on the max-abs parameter change");
  bench->add_option("--max-sweeps", b_fit_flags.max_sweeps,
                    "Sweep cap before divergence is assumed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  try {
    if (validate->parsed()) return cmd_validate(v_graph);
    if (fitc->parsed()) {
      return cmd_fit(f_graph, f_data, f_data_flags, f_fit_flags, f_out_params);
    }
    if (sim->parsed()) {
      if (s_cfg.p_bidirected < 0.0) s_cfg.p_bidirected = s_cfg.p_directed / 2.0;
      return cmd_simulate(s_cfg, s_out);
    }
    if (lrtc->parsed()) {
      return cmd_lrt(l_null, l_alt, l_data, l_data_flags, l_fit_flags, l_subsample_b, l_n_sub,
                     l_scale_stat, l_threads, l_seed);
    }
    if (bench->parsed()) {
      return cmd_bench(b_nodes, b_samples, b_cycles, b_pdirs, b_pbidirs, b_reps, b_seed,
                       b_threads, b_fit_flags, b_format);
    }
  } catch (const sembcd::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const sembcd::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const sembcd::BlockUpdateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFitFailure;
  } catch (const sembcd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
