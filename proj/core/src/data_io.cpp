#include "sembcd/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <vector>

#include "sembcd/errors.hpp"

namespace sembcd {

namespace {

double parse_number(std::string_view field, int line_no) {
  // trim spaces and a possible trailing \r
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
    field.remove_prefix(1);
  }
  while (!field.empty() &&
         (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError("csv: invalid number '" + std::string(field) + "' on line " +
                     std::to_string(line_no));
  }
  return value;
}

}  // namespace

Eigen::MatrixXd read_data_csv(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw ParseError("csv: cannot read file: " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (has_header && line_no == 1) continue;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::size_t end = (comma == std::string::npos) ? line.size() : comma;
      row.push_back(parse_number(std::string_view(line).substr(start, end - start), line_no));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("csv: ragged row on line " + std::to_string(line_no));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("csv: no data rows in " + path);

  const int n_obs = static_cast<int>(rows.size());
  const int n_vars = static_cast<int>(rows.front().size());
  Eigen::MatrixXd Y(n_vars, n_obs);
  for (int r = 0; r < n_obs; ++r) {
    for (int c = 0; c < n_vars; ++c) Y(c, r) = rows[r][c];
  }
  return Y;
}

void write_data_csv(const std::string& path, const Eigen::MatrixXd& Y) {
  std::ofstream out(path);
  if (!out) throw ParseError("csv: cannot write file: " + path);
  out.precision(17);
  for (int obs = 0; obs < Y.cols(); ++obs) {
    for (int v = 0; v < Y.rows(); ++v) {
      if (v > 0) out << ',';
      out << Y(v, obs);
    }
    out << '\n';
  }
}

Eigen::MatrixXd center_variables(const Eigen::MatrixXd& Y) {
  return Y.colwise() - Y.rowwise().mean();
}

Eigen::MatrixXd standardize_variables(const Eigen::MatrixXd& Y) {
  Eigen::MatrixXd centered = center_variables(Y);
  const double n = static_cast<double>(Y.cols());
  for (int v = 0; v < centered.rows(); ++v) {
    const double sd = std::sqrt(centered.row(v).squaredNorm() / n);
    if (sd == 0.0) throw DataError("standardize: constant variable " + std::to_string(v));
    centered.row(v) /= sd;
  }
  return centered;
}

}  // namespace sembcd
