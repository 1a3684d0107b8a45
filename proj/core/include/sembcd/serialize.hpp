#pragma once

#include <string>

#include "sembcd/bcd.hpp"
#include "sembcd/inference.hpp"
#include "sembcd/simulate.hpp"
#include "sembcd/wellposed.hpp"

namespace sembcd {

/// JSON documents for the CLI surface. Every document carries a top-level
/// "schema": 1 field; parsers reject other versions. Serialization and parsing
/// round-trip bit-exactly for all stored fields.

std::string to_json_text(const Params& p, int indent = -1);
Params params_from_json_text(const std::string& text);

std::string to_json_text(const FitResult& r, int indent = -1);
FitResult fit_result_from_json_text(const std::string& text);

std::string to_json_text(const WellPosedReport& r, int indent = -1);
WellPosedReport well_posed_report_from_json_text(const std::string& text);

std::string to_json_text(const LrtResult& r, int indent = -1);
LrtResult lrt_result_from_json_text(const std::string& text);

std::string to_json_text(const SubsampleResult& r, int indent = -1);
SubsampleResult subsample_result_from_json_text(const std::string& text);

std::string to_json_text(const BenchRow& r, int indent = -1);
BenchRow bench_row_from_json_text(const std::string& text);

/// CSV mirror of the BenchRow fields.
std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& r);

}  // namespace sembcd
