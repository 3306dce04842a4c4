#include "alsim/app/analyze.hpp"

#include <sstream>

#include "alsim/app/sweep.hpp"
#include "alsim/format.hpp"

namespace alsim::app {

Analysis analyze_results(const std::vector<ResultRow>& rows, const AnalyzeOptions& options) {
  Analysis out;
  std::vector<FactorRow> factors;
  for (const auto& r : rows) {
    if (r.status != "ok" || (options.strategy && r.strategy != *options.strategy)) {
      ++out.excluded_rows;
      continue;
    }
    if (r.space_for_al < 0.0) ++out.negative_space;
    factors.push_back(to_factor_row(r));
  }
  if (factors.empty()) throw InvalidArgument("no completed experiments to analyze");
  EncodeOptions enc;
  enc.include_inferred_covariates = options.include_covariates;
  out.design = encode_factors(factors, enc);
  const std::span<const double> y(out.design.y.data(), static_cast<std::size_t>(out.design.y.size()));
  out.poisson = fit_poisson_glm(out.design.x, y, out.design.column_names);
  out.negbin = fit_negbin_glm(out.design.x, y, out.design.column_names);
  out.findings = summarize_findings(out.negbin, factors, options.alpha);
  return out;
}

std::string coefficients_csv(const Analysis& a) {
  std::ostringstream os;
  os << "family,name,coefficient,std_error,z,p_value\n";
  for (const GlmFit* fit : {&a.poisson, &a.negbin}) {
    const char* family = fit->family == GlmFamily::kPoisson ? "poisson" : "negbin";
    for (Eigen::Index j = 0; j < fit->coefficients.size(); ++j) {
      os << family << ',' << fit->design_column_names[static_cast<std::size_t>(j)] << ','
         << format_double(fit->coefficients[j]) << ',' << format_double(fit->standard_errors[j]) << ','
         << format_double(fit->coefficients[j] / fit->standard_errors[j]) << ',' << format_double(fit->p_values[j])
         << '\n';
    }
  }
  return os.str();
}

std::string analysis_report(const Analysis& a) {
  std::string text = format_report(a.findings, a.poisson, a.negbin, a.design);
  std::ostringstream extra;
  extra << "\nexcluded rows (failed or filtered): " << a.excluded_rows << '\n';
  extra << "experiments with negative space_for_al: " << a.negative_space << '\n';
  return text + extra.str();
}

Analysis run_analysis(const std::filesystem::path& results, const std::filesystem::path& out_dir,
                      const AnalyzeOptions& options) {
  std::istringstream in(read_file(results));
  const Analysis a = analyze_results(read_results(in), options);
  write_file_atomic(out_dir / "coefficients.csv", coefficients_csv(a));
  write_file_atomic(out_dir / "report.txt", analysis_report(a));
  return a;
}

}  // namespace alsim::app
