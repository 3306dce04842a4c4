#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "alsim/evalstat.hpp"
#include "alsim/factoranalysis.hpp"

namespace alsim {

// One row of the sweep results table.
struct ResultRow {
  std::string experiment_id;
  std::string task;
  std::string input_type;
  int input_dim = 2;
  std::string classifier;
  std::string strategy;
  std::size_t n_initial = 10;
  double ber_target = 0.1;
  double ber_est = 0.0;
  double opt_error_rate = 0.0;
  double mismatch = 0.0;
  double space_for_al = 0.0;
  double s_initial = 0.0;
  double s_all = 0.0;
  std::size_t zone_length = 0;
  bool gain_flag = false;
  double aua_al = 0.0;
  double aua_rs_mean = 0.0;
  double acf1_scores = 0.0;
  double acf1_deltas = 0.0;
  Seed seed = 0;
  std::string status = "ok";

  bool operator==(const ResultRow&) const = default;
};

const std::vector<std::string>& result_columns();
std::string results_header();
std::string serialize_result(const ResultRow& row);
ResultRow parse_result(std::string_view line);
std::vector<ResultRow> read_results(std::istream& in);

FactorRow to_factor_row(const ResultRow& row);

// Per-experiment evaluation record (emitted by `evaluate`).
std::string evaluation_header();
std::string serialize_evaluation(std::string_view experiment_id, const EvaluationRecord& record);
std::pair<std::string, EvaluationRecord> parse_evaluation(std::string_view line);

// Comma split without quoting; fields never contain commas.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace alsim
