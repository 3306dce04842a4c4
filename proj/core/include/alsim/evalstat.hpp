#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "alsim/common.hpp"
#include "alsim/runner.hpp"

namespace alsim {

class GamError : public Error {
 public:
  using Error::Error;
};

std::vector<double> score_differences(std::span<const double> scores);

// Three-valued win/tie/loss; exact float equality is a tie.
double compare(double x, double y);

struct ComparisonSeries {
  std::vector<std::vector<double>> c;  // [step][rs instance], each in {0, 0.5, 1}
  std::vector<double> a;               // per-step mean over instances
};

ComparisonSeries comparison_series(std::span<const double> al_deltas,
                                   std::span<const std::vector<double>> rs_deltas_per_instance);

// Sample autocorrelation at lags 1..max_lag.
std::vector<double> acf(std::span<const double> series, std::size_t max_lag);

// Trapezoidal mean of the scores over the budget fraction axis [0, 1].
double aua(std::span<const double> scores);

struct GamOptions {
  int interior_knots = 20;
  double log10_lambda_min = -6.0;
  double log10_lambda_max = 8.0;
  int lambda_grid = 57;
  std::optional<double> fixed_lambda;  // skips the GCV search
  double tolerance = 1e-8;             // max |delta eta|
  int max_iterations = 200;
};

/// Penalized logistic (quasi-binomial) smoother: cubic B-splines on equally
/// spaced knots, second-difference coefficient penalty, GCV-selected smoothing,
/// Pearson dispersion.
struct GamFit {
  std::vector<double> knots;
  Vector coefficients;
  double smoothing_parameter = 0.0;
  double dispersion = 1.0;
  Eigen::MatrixXd covariance;  // Bayesian posterior covariance, already scaled by dispersion
  double edf = 0.0;
  double gcv = 0.0;
  int iterations = 0;
  bool degenerate = false;  // constant response; curve pinned at constant_value
  double constant_value = 0.0;

  [[nodiscard]] Vector basis(double t) const;
  [[nodiscard]] double eta(double t) const;
  [[nodiscard]] double se_eta(double t) const;
  [[nodiscard]] double mean(double t) const;
};

// Cubic B-spline basis on the extended uniform knot vector.
Vector bspline_basis(double t, std::span<const double> knots);
std::vector<double> uniform_knots(int interior_knots);

GamFit fit_gam(std::span<const double> a, std::span<const double> budget_fractions, const GamOptions& options = {});

std::vector<double> zone_grid(std::size_t points = 200);
std::vector<double> gam_curve(const GamFit& fit, std::span<const double> grid);
std::vector<double> gam_lower_band(const GamFit& fit, std::span<const double> grid, double level = 0.8);
std::vector<double> gam_upper_band(const GamFit& fit, std::span<const double> grid, double level = 0.8);

// Normal quantile used for the pointwise band; 1.2816 for level 0.8.
double band_z(double level);

struct ZoneResult {
  std::size_t zone_length = 0;
  std::size_t zone_start = 0;
  std::vector<double> grid;
  std::vector<double> fit_curve;
  std::vector<double> lower_band;
  bool gain_flag = false;
};

/// Length of the initial run of band values above 0.5. The run may begin at
/// index 1 when index 0 alone falls short (boundary-knot widening).
std::size_t zone_length(std::span<const double> lower_band);
std::size_t zone_start(std::span<const double> lower_band);

ZoneResult evaluate_zone(const GamFit& fit, double level = 0.8, std::size_t points = 200);

// Budget fraction at which the i-th score difference (i = 1..n) is placed.
std::vector<double> difference_fractions(std::size_t n_steps);

struct EvaluationRecord {
  std::size_t zone_length = 0;
  std::size_t zone_start = 0;
  bool gain_flag = false;
  double aua_al = 0.0;
  double aua_rs_mean = 0.0;
  double dispersion = 0.0;
  double smoothing_parameter = 0.0;
  double edf = 0.0;
  double acf1_scores = 0.0;  // NaN when undefined (zero variance)
  double acf1_deltas = 0.0;
};

struct Evaluation {
  ComparisonSeries series;
  GamFit gam;
  ZoneResult zone;
  EvaluationRecord record;
};

Evaluation evaluate_experiment(const Trajectory& al, std::span<const Trajectory> rs, double level = 0.8,
                               const GamOptions& options = {});

}  // namespace alsim
