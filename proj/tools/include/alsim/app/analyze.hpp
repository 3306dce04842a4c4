#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "alsim/factoranalysis.hpp"
#include "alsim/results.hpp"

namespace alsim::app {

struct AnalyzeOptions {
  std::optional<std::string> strategy;  // restrict to one strategy
  bool include_covariates = true;
  double alpha = 0.05;
};

struct Analysis {
  DesignMatrix design;
  GlmFit poisson;
  GlmFit negbin;
  FindingsReport findings;
  std::size_t excluded_rows = 0;  // failed cells or filtered strategies
  std::size_t negative_space = 0;
};

Analysis analyze_results(const std::vector<ResultRow>& rows, const AnalyzeOptions& options = {});

// family,name,coefficient,std_error,z,p_value
std::string coefficients_csv(const Analysis& analysis);
std::string analysis_report(const Analysis& analysis);

// Reads <results>, writes <out_dir>/coefficients.csv and <out_dir>/report.txt.
Analysis run_analysis(const std::filesystem::path& results, const std::filesystem::path& out_dir,
                      const AnalyzeOptions& options = {});

}  // namespace alsim::app
