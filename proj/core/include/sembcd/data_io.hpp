#pragma once

#include <string>

#include <Eigen/Dense>

#include "sembcd/likelihood.hpp"

namespace sembcd {

/// Reads a CSV of N rows (observations) by |V| columns (variables) with
/// locale-independent dot-decimal numbers, and returns the |V| x N data matrix Y.
/// When has_header is true the first line is skipped.
Eigen::MatrixXd read_data_csv(const std::string& path, bool has_header);

void write_data_csv(const std::string& path, const Eigen::MatrixXd& Y);

/// Subtract the mean of each variable (row of Y).
Eigen::MatrixXd center_variables(const Eigen::MatrixXd& Y);

/// Center each variable and scale it to unit variance (1/N convention).
Eigen::MatrixXd standardize_variables(const Eigen::MatrixXd& Y);

}  // namespace sembcd
