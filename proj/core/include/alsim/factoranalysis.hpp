#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alsim/common.hpp"

namespace alsim {

class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

enum class GlmFamily { kPoisson, kNegBin };

struct GlmFit {
  GlmFamily family = GlmFamily::kPoisson;
  Vector coefficients;
  Vector standard_errors;
  Vector p_values;  // two-sided Wald
  double kappa = 0.0;  // negbin size parameter, Var = mu + mu^2 / kappa
  double pearson_dispersion = 0.0;  // Pearson chi^2 / residual df
  double log_likelihood = 0.0;
  bool converged = false;
  bool poisson_limit = false;  // kappa hit the cap
  int iterations = 0;
  std::vector<std::string> design_column_names;
};

inline constexpr double kKappaCap = 1e6;

struct NegBinOptions {
  std::optional<double> fixed_kappa;
  double kappa_cap = kKappaCap;
  int max_outer_iterations = 200;
  double tolerance = 1e-8;
};

/// Log-link Poisson regression by IRLS; converged when max |delta beta| < 1e-8
/// within 100 iterations. Requires full column rank.
GlmFit fit_poisson_glm(const Eigen::MatrixXd& x, std::span<const double> y, std::vector<std::string> names = {});

/// Negative binomial regression, alternating IRLS for beta at fixed kappa with
/// Newton steps on the profile log-likelihood in log kappa.
GlmFit fit_negbin_glm(const Eigen::MatrixXd& x, std::span<const double> y, std::vector<std::string> names = {},
                      const NegBinOptions& options = {});

// One experiment's factor levels and outcome.
struct FactorRow {
  std::string experiment_id;
  std::string task;
  std::string input_type;
  int input_dim = 2;
  std::string classifier;
  std::size_t n_initial = 10;
  double ber_target = 0.1;
  std::string strategy;
  double space_for_al = 0.0;
  double opt_error_rate = 0.0;
  double mismatch = 0.0;
  std::size_t zone_length = 0;
  bool gain_flag = false;
  Seed seed = 0;
};

struct EncodeOptions {
  bool include_inferred_covariates = true;  // space_for_al and mismatch
};

struct DesignMatrix {
  Eigen::MatrixXd x;
  Vector y;
  std::vector<std::string> column_names;
  std::vector<std::string> reference_levels;  // "factor=level" per retained categorical factor
  std::vector<std::string> warnings;
};

/// Treatment coding, alphabetically-first level as reference, intercept first,
/// continuous covariates standardized. Single-level factors are dropped with a warning.
DesignMatrix encode_factors(std::span<const FactorRow> rows, const EncodeOptions& options = {});

struct CoefficientRow {
  std::string name;
  double coefficient = 0.0;
  double standard_error = 0.0;
  double p_value = 1.0;
};

struct FindingsReport {
  std::vector<CoefficientRow> significant;  // p < alpha, ascending p
  std::size_t experiments = 0;
  std::size_t gain_experiments = 0;
  double gain_rate = 0.0;
  double mean_zone_length = 0.0;    // among gain experiments
  double median_zone_length = 0.0;  // among gain experiments
};

FindingsReport summarize_findings(const GlmFit& fit, std::span<const FactorRow> rows, double alpha = 0.05);

std::string format_report(const FindingsReport& report, const GlmFit& poisson, const GlmFit& negbin,
                          const DesignMatrix& design);

}  // namespace alsim
