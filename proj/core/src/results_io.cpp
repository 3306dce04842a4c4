#include "alsim/results.hpp"

#include <charconv>
#include <istream>
#include <sstream>

#include "alsim/format.hpp"

namespace alsim {

namespace {

Seed parse_seed(std::string_view text) {
  Seed v = 0;
  const auto* last = text.data() + text.size();
  const auto res = std::from_chars(text.data(), last, v);
  if (res.ec != std::errc{} || res.ptr != last || text.empty())
    throw InvalidArgument("not a seed: '" + std::string(text) + "'");
  return v;
}

}  // namespace

const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> cols{
      "experiment_id", "task",        "input_type",   "input_dim",   "classifier",  "strategy",
      "n_initial",     "ber_target",  "ber_est",      "opt_error_rate", "mismatch", "space_for_al",
      "s_initial",     "s_all",       "zone_length",  "gain_flag",   "aua_al",      "aua_rs_mean",
      "acf1_scores",   "acf1_deltas", "seed",         "status"};
  return cols;
}

std::string results_header() {
  std::string out;
  for (const auto& c : result_columns()) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string serialize_result(const ResultRow& r) {
  std::ostringstream os;
  os << r.experiment_id << ',' << r.task << ',' << r.input_type << ',' << r.input_dim << ',' << r.classifier << ','
     << r.strategy << ',' << r.n_initial << ',' << format_double(r.ber_target) << ',' << format_double(r.ber_est) << ','
     << format_double(r.opt_error_rate) << ',' << format_double(r.mismatch) << ',' << format_double(r.space_for_al)
     << ',' << format_double(r.s_initial) << ',' << format_double(r.s_all) << ',' << r.zone_length << ','
     << (r.gain_flag ? 1 : 0) << ',' << format_double(r.aua_al) << ',' << format_double(r.aua_rs_mean) << ','
     << format_double(r.acf1_scores) << ',' << format_double(r.acf1_deltas) << ',' << r.seed << ',' << r.status;
  return os.str();
}

ResultRow parse_result(std::string_view line) {
  const auto f = split_csv_line(line);
  if (f.size() != result_columns().size())
    throw InvalidArgument("results row has " + std::to_string(f.size()) + " fields, expected " +
                          std::to_string(result_columns().size()));
  ResultRow r;
  r.experiment_id = f[0];
  r.task = f[1];
  r.input_type = f[2];
  r.input_dim = static_cast<int>(parse_integer(f[3]));
  r.classifier = f[4];
  r.strategy = f[5];
  r.n_initial = static_cast<std::size_t>(parse_integer(f[6]));
  r.ber_target = parse_double(f[7]);
  r.ber_est = parse_double(f[8]);
  r.opt_error_rate = parse_double(f[9]);
  r.mismatch = parse_double(f[10]);
  r.space_for_al = parse_double(f[11]);
  r.s_initial = parse_double(f[12]);
  r.s_all = parse_double(f[13]);
  r.zone_length = static_cast<std::size_t>(parse_integer(f[14]));
  r.gain_flag = parse_integer(f[15]) != 0;
  r.aua_al = parse_double(f[16]);
  r.aua_rs_mean = parse_double(f[17]);
  r.acf1_scores = parse_double(f[18]);
  r.acf1_deltas = parse_double(f[19]);
  r.seed = parse_seed(f[20]);
  r.status = f[21];
  return r;
}

std::vector<ResultRow> read_results(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != results_header()) throw InvalidArgument("results CSV: unexpected header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(parse_result(line));
  return rows;
}

FactorRow to_factor_row(const ResultRow& r) {
  FactorRow f;
  f.experiment_id = r.experiment_id;
  f.task = r.task;
  f.input_type = r.input_type;
  f.input_dim = r.input_dim;
  f.classifier = r.classifier;
  f.n_initial = r.n_initial;
  f.ber_target = r.ber_target;
  f.strategy = r.strategy;
  f.space_for_al = r.space_for_al;
  f.opt_error_rate = r.opt_error_rate;
  f.mismatch = r.mismatch;
  f.zone_length = r.zone_length;
  f.gain_flag = r.gain_flag;
  f.seed = r.seed;
  return f;
}

std::string evaluation_header() {
  return "experiment_id,zone_length,zone_start,gain_flag,aua_al,aua_rs_mean,dispersion,smoothing_parameter,edf,"
         "acf1_scores,acf1_deltas";
}

std::string serialize_evaluation(std::string_view id, const EvaluationRecord& r) {
  std::ostringstream os;
  os << id << ',' << r.zone_length << ',' << r.zone_start << ',' << (r.gain_flag ? 1 : 0) << ','
     << format_double(r.aua_al) << ',' << format_double(r.aua_rs_mean) << ',' << format_double(r.dispersion) << ','
     << format_double(r.smoothing_parameter) << ',' << format_double(r.edf) << ',' << format_double(r.acf1_scores)
     << ',' << format_double(r.acf1_deltas);
  return os.str();
}

std::pair<std::string, EvaluationRecord> parse_evaluation(std::string_view line) {
  const auto f = split_csv_line(line);
  if (f.size() != 11) throw InvalidArgument("evaluation row: expected 11 fields");
  EvaluationRecord r;
  r.zone_length = static_cast<std::size_t>(parse_integer(f[1]));
  r.zone_start = static_cast<std::size_t>(parse_integer(f[2]));
  r.gain_flag = parse_integer(f[3]) != 0;
  r.aua_al = parse_double(f[4]);
  r.aua_rs_mean = parse_double(f[5]);
  r.dispersion = parse_double(f[6]);
  r.smoothing_parameter = parse_double(f[7]);
  r.edf = parse_double(f[8]);
  r.acf1_scores = parse_double(f[9]);
  r.acf1_deltas = parse_double(f[10]);
  return {f[0], r};
}

}  // namespace alsim
