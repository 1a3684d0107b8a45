#include "sembcd/serialize.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

namespace sembcd {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (int r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("json: expected a matrix (array of arrays)");
  const int rows = static_cast<int>(j.size());
  const int cols = rows > 0 ? static_cast<int>(j[0].size()) : 0;
  Eigen::MatrixXd M(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols) {
      throw ParseError("json: ragged matrix");
    }
    for (int c = 0; c < cols; ++c) M(r, c) = j[r][c].get<double>();
  }
  return M;
}

json parse_document(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("json: ") + e.what());
  }
  if (!j.is_object() || j.value("schema", -1) != 1) {
    throw ParseError("json: missing or unsupported schema version");
  }
  return j;
}

FitStatusKind status_kind_from_string(const std::string& s) {
  for (FitStatusKind k :
       {FitStatusKind::Converged, FitStatusKind::MaxSweeps, FitStatusKind::UpdateNoMinimum,
        FitStatusKind::UpdateNonUnique, FitStatusKind::A1Violation}) {
    if (to_string(k) == s) return k;
  }
  throw ParseError("json: unknown fit status '" + s + "'");
}

json params_to_value(const Params& p) {
  return json{{"B", matrix_to_json(p.B)}, {"Omega", matrix_to_json(p.Omega)}};
}

Params params_from_value(const json& j) {
  Params p;
  p.B = matrix_from_json(j.at("B"));
  p.Omega = matrix_from_json(j.at("Omega"));
  return p;
}

json fit_result_to_value(const FitResult& r) {
  json j = params_to_value(r.params);
  j["loglik_trace"] = r.loglik_trace;
  j["sweeps_used"] = r.sweeps_used;
  j["status"] = {{"kind", to_string(r.status.kind)}, {"node", r.status.node}};
  j["score_norm"] = r.score_norm;
  j["ridge_fallback_used"] = r.ridge_fallback_used;
  j["wellposed_warning"] = r.wellposed_warning;
  return j;
}

FitResult fit_result_from_value(const json& j) {
  FitResult r;
  r.params = params_from_value(j);
  r.loglik_trace = j.at("loglik_trace").get<std::vector<double>>();
  r.sweeps_used = j.at("sweeps_used").get<int>();
  r.status.kind = status_kind_from_string(j.at("status").at("kind").get<std::string>());
  r.status.node = j.at("status").at("node").get<int>();
  r.score_norm = j.at("score_norm").get<double>();
  r.ridge_fallback_used = j.at("ridge_fallback_used").get<bool>();
  r.wellposed_warning = j.at("wellposed_warning").get<bool>();
  return r;
}

json with_schema(json j) {
  j["schema"] = 1;
  return j;
}

}  // namespace

std::string to_json_text(const Params& p, int indent) {
  return with_schema(params_to_value(p)).dump(indent);
}

Params params_from_json_text(const std::string& text) {
  return params_from_value(parse_document(text));
}

std::string to_json_text(const FitResult& r, int indent) {
  json j = with_schema(fit_result_to_value(r));
  // implied covariance is convenient in reports; derived, so ignored on parse
  try {
    j["Sigma"] = matrix_to_json(implied_covariance(r.params));
  } catch (const Error&) {
  }
  return j.dump(indent);
}

FitResult fit_result_from_json_text(const std::string& text) {
  return fit_result_from_value(parse_document(text));
}

std::string to_json_text(const WellPosedReport& r, int indent) {
  json per = json::array();
  for (const auto& pn : r.per_node) {
    per.push_back({{"node", pn.node}, {"ok", pn.ok}, {"flow", pn.flow},
                   {"required", pn.required}});
  }
  json j{{"overall", r.overall}, {"per_node", per}};
  if (!r.warning.empty()) j["warning"] = r.warning;
  return with_schema(j).dump(indent);
}

WellPosedReport well_posed_report_from_json_text(const std::string& text) {
  const json j = parse_document(text);
  WellPosedReport r;
  r.overall = j.at("overall").get<bool>();
  r.warning = j.value("warning", "");
  for (const auto& pn : j.at("per_node")) {
    r.per_node.push_back({pn.at("node").get<int>(), pn.at("ok").get<bool>(),
                          pn.at("flow").get<int>(), pn.at("required").get<int>()});
  }
  return r;
}

std::string to_json_text(const LrtResult& r, int indent) {
  json j{{"stat", r.stat},
         {"df", r.df},
         {"p_chi2", r.p_chi2},
         {"fit_null", fit_result_to_value(r.fit_null)},
         {"fit_alt", fit_result_to_value(r.fit_alt)}};
  return with_schema(j).dump(indent);
}

LrtResult lrt_result_from_json_text(const std::string& text) {
  const json j = parse_document(text);
  LrtResult r;
  r.stat = j.at("stat").get<double>();
  r.df = j.at("df").get<int>();
  r.p_chi2 = j.at("p_chi2").get<double>();
  r.fit_null = fit_result_from_value(j.at("fit_null"));
  r.fit_alt = fit_result_from_value(j.at("fit_alt"));
  return r;
}

std::string to_json_text(const SubsampleResult& r, int indent) {
  json j{{"b", r.b},          {"n_sub", r.n_sub},        {"n_failed", r.n_failed},
         {"scaled", r.scaled}, {"full_stat", r.full_stat}, {"empirical_p", r.empirical_p},
         {"stats", r.stats}};
  return with_schema(j).dump(indent);
}

SubsampleResult subsample_result_from_json_text(const std::string& text) {
  const json j = parse_document(text);
  SubsampleResult r;
  r.b = j.at("b").get<int>();
  r.n_sub = j.at("n_sub").get<int>();
  r.n_failed = j.at("n_failed").get<int>();
  r.scaled = j.at("scaled").get<bool>();
  r.full_stat = j.at("full_stat").get<double>();
  r.empirical_p = j.at("empirical_p").get<double>();
  r.stats = j.at("stats").get<std::vector<double>>();
  return r;
}

std::string to_json_text(const BenchRow& r, int indent) {
  json j{{"nodes", r.config.n_nodes},
         {"samples", r.config.sample_size},
         {"cycle", r.config.cycle_len},
         {"p_directed", r.config.p_directed},
         {"p_bidirected", r.config.p_bidirected},
         {"replications", r.config.replications},
         {"seed", r.config.seed},
         {"n_converged", r.n_converged},
         {"mean_sweeps", r.mean_sweeps},
         {"mean_cpu_ms", r.mean_cpu_ms},
         {"n_update_failures", r.n_update_failures}};
  return with_schema(j).dump(indent);
}

BenchRow bench_row_from_json_text(const std::string& text) {
  const json j = parse_document(text);
  BenchRow r;
  r.config.n_nodes = j.at("nodes").get<int>();
  r.config.sample_size = j.at("samples").get<int>();
  r.config.cycle_len = j.at("cycle").get<int>();
  r.config.p_directed = j.at("p_directed").get<double>();
  r.config.p_bidirected = j.at("p_bidirected").get<double>();
  r.config.replications = j.at("replications").get<int>();
  r.config.seed = j.at("seed").get<std::uint64_t>();
  r.n_converged = j.at("n_converged").get<int>();
  r.mean_sweeps = j.at("mean_sweeps").get<double>();
  r.mean_cpu_ms = j.at("mean_cpu_ms").get<double>();
  r.n_update_failures = j.at("n_update_failures").get<int>();
  return r;
}

std::string bench_csv_header() {
  return "nodes,samples,cycle,p_directed,p_bidirected,replications,seed,"
         "n_converged,mean_sweeps,mean_cpu_ms,n_update_failures";
}

std::string bench_csv_row(const BenchRow& r) {
  std::ostringstream ss;
  ss.precision(17);
  ss << r.config.n_nodes << ',' << r.config.sample_size << ',' << r.config.cycle_len << ','
     << r.config.p_directed << ',' << r.config.p_bidirected << ',' << r.config.replications
     << ',' << r.config.seed << ',' << r.n_converged << ',' << r.mean_sweeps << ','
     << r.mean_cpu_ms << ',' << r.n_update_failures;
  return ss.str();
}

}  // namespace sembcd
