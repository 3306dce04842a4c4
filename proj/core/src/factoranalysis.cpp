#include "alsim/factoranalysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "alsim/format.hpp"

namespace alsim {

namespace {

struct Factor {
  std::string name;
  std::function<std::string(const FactorRow&)> level;
};

const std::vector<Factor>& categorical_factors() {
  static const std::vector<Factor> factors{
      {"task", [](const FactorRow& r) { return r.task; }},
      {"input_type", [](const FactorRow& r) { return r.input_type; }},
      {"input_dim", [](const FactorRow& r) { return std::to_string(r.input_dim); }},
      {"classifier", [](const FactorRow& r) { return r.classifier; }},
      {"n_initial", [](const FactorRow& r) { return std::to_string(r.n_initial); }},
      {"ber_target", [](const FactorRow& r) { return format_double(r.ber_target); }},
      {"strategy", [](const FactorRow& r) { return r.strategy; }},
  };
  return factors;
}

// Reference coefficients from the published SE study, shown next to ours for
// qualitative comparison only.
const std::map<std::string, double>& reference_coefficients() {
  static const std::map<std::string, double> ref{
      {"(intercept)", -1.695},
      {"classifier=logreg", 1.142},
      {"task=sd7", -0.481},
      {"input_type=continuous", 0.578},
      {"input_type=discretized", -1.235},
  };
  return ref;
}

}  // namespace

DesignMatrix encode_factors(std::span<const FactorRow> rows, const EncodeOptions& options) {
  if (rows.empty()) throw InvalidArgument("encode_factors needs at least one row");
  const auto n = static_cast<Eigen::Index>(rows.size());
  DesignMatrix out;
  std::vector<Vector> columns;
  columns.push_back(Vector::Ones(n));
  out.column_names.push_back("(intercept)");

  for (const auto& factor : categorical_factors()) {
    std::set<std::string> levels;
    for (const auto& r : rows) levels.insert(factor.level(r));
    if (levels.size() < 2) {
      out.warnings.push_back("factor '" + factor.name + "' has a single level ('" + *levels.begin() + "'); dropped");
      continue;
    }
    out.reference_levels.push_back(factor.name + "=" + *levels.begin());
    for (auto it = std::next(levels.begin()); it != levels.end(); ++it) {
      Vector col(n);
      for (Eigen::Index i = 0; i < n; ++i) col[i] = factor.level(rows[static_cast<std::size_t>(i)]) == *it ? 1.0 : 0.0;
      columns.push_back(std::move(col));
      out.column_names.push_back(factor.name + "=" + *it);
    }
  }

  if (options.include_inferred_covariates) {
    const std::pair<const char*, double FactorRow::*> covariates[] = {{"space_for_al", &FactorRow::space_for_al},
                                                                      {"mismatch", &FactorRow::mismatch}};
    for (const auto& [name, member] : covariates) {
      Vector col(n);
      for (Eigen::Index i = 0; i < n; ++i) col[i] = rows[static_cast<std::size_t>(i)].*member;
      const double mean = col.mean();
      const double sd = n > 1 ? std::sqrt((col.array() - mean).square().sum() / static_cast<double>(n - 1)) : 0.0;
      if (!(sd > 0.0)) {
        out.warnings.push_back(std::string("covariate '") + name + "' is constant; dropped");
        continue;
      }
      columns.push_back(((col.array() - mean) / sd).matrix());
      out.column_names.push_back(name);
    }
  }

  out.x.resize(n, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) out.x.col(static_cast<Eigen::Index>(j)) = columns[j];
  out.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) out.y[i] = static_cast<double>(rows[static_cast<std::size_t>(i)].zone_length);
  return out;
}

FindingsReport summarize_findings(const GlmFit& fit, std::span<const FactorRow> rows, double alpha) {
  FindingsReport rep;
  for (Eigen::Index j = 0; j < fit.coefficients.size(); ++j) {
    if (!(fit.p_values[j] < alpha)) continue;
    rep.significant.push_back({fit.design_column_names[static_cast<std::size_t>(j)], fit.coefficients[j],
                               fit.standard_errors[j], fit.p_values[j]});
  }
  std::stable_sort(rep.significant.begin(), rep.significant.end(),
                   [](const CoefficientRow& a, const CoefficientRow& b) { return a.p_value < b.p_value; });

  std::vector<double> zones;
  for (const auto& r : rows)
    if (r.gain_flag) zones.push_back(static_cast<double>(r.zone_length));
  rep.experiments = rows.size();
  rep.gain_experiments = zones.size();
  rep.gain_rate = rows.empty() ? 0.0 : static_cast<double>(zones.size()) / static_cast<double>(rows.size());
  if (!zones.empty()) {
    double sum = 0.0;
    for (double z : zones) sum += z;
    rep.mean_zone_length = sum / static_cast<double>(zones.size());
    std::sort(zones.begin(), zones.end());
    const std::size_t m = zones.size();
    rep.median_zone_length = m % 2 == 1 ? zones[m / 2] : 0.5 * (zones[m / 2 - 1] + zones[m / 2]);
  }
  return rep;
}

std::string format_report(const FindingsReport& report, const GlmFit& poisson, const GlmFit& negbin,
                          const DesignMatrix& design) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "AL factor analysis\n==================\n\n";
  os << "experiments: " << report.experiments << "\n";
  os << "experiments with an AL performance zone: " << report.gain_experiments << " ("
     << format_double(report.gain_rate) << ")\n";
  os << "zone length among gain experiments: mean " << format_double(report.mean_zone_length) << ", median "
     << format_double(report.median_zone_length) << " (of 200)\n\n";

  os << "reference levels:";
  for (const auto& r : design.reference_levels) os << ' ' << r;
  os << '\n';
  for (const auto& w : design.warnings) os << "warning: " << w << '\n';
  os << '\n';

  os << "Poisson GLM: converged=" << (poisson.converged ? "yes" : "no")
     << " pearson_dispersion=" << format_double(poisson.pearson_dispersion)
     << (poisson.pearson_dispersion > 1.5 ? " (over-dispersed)" : "") << '\n';
  os << "NegBin GLM: converged=" << (negbin.converged ? "yes" : "no") << " kappa=" << format_double(negbin.kappa)
     << (negbin.poisson_limit ? " (Poisson-limit)" : "")
     << " pearson_dispersion=" << format_double(negbin.pearson_dispersion)
     << (negbin.pearson_dispersion < 1.0 ? " (under-dispersed)" : "") << "\n\n";

  os << "NegBin significant results (p < 0.05)\n";
  os << std::left << std::setw(32) << "name" << std::setw(14) << "coefficient" << std::setw(14) << "p-value"
     << "reference\n";
  for (const auto& row : report.significant) {
    os << std::left << std::setw(32) << row.name << std::setw(14) << format_double(row.coefficient) << std::setw(14)
       << row.p_value;
    const auto it = reference_coefficients().find(row.name);
    if (it != reference_coefficients().end()) os << format_double(it->second);
    os << '\n';
  }
  if (report.significant.empty()) os << "(none)\n";
  return os.str();
}

}  // namespace alsim
