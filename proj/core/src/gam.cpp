#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "alsim/evalstat.hpp"

namespace alsim {

namespace {

constexpr int kDegree = 3;

double inv_logit(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

double xlogy_ratio(double y, double mu) { return y > 0.0 ? y * std::log(y / mu) : 0.0; }

double deviance(std::span<const double> a, const Vector& mu) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double m = mu[static_cast<Eigen::Index>(i)];
    d += 2.0 * (xlogy_ratio(a[i], m) + xlogy_ratio(1.0 - a[i], 1.0 - m));
  }
  return d;
}

struct PirlsResult {
  Vector beta;
  Vector eta;
  Eigen::MatrixXd penalized_info_inv;
  double edf = 0.0;
  double deviance = 0.0;
  double pearson = 0.0;
  double gcv = 0.0;
  int iterations = 0;
};

PirlsResult pirls(const Eigen::MatrixXd& x, const Eigen::MatrixXd& penalty, std::span<const double> a, double lambda,
                  const Vector& eta_start, const GamOptions& opt) {
  const Eigen::Index n = x.rows();
  const Vector av = Eigen::Map<const Vector>(a.data(), n);
  Vector eta = eta_start;
  Vector beta;
  auto penalized_dev = [&](const Vector& e, const Vector& b) {
    Vector mu = e.unaryExpr([](double v) { return inv_logit(v); });
    return deviance(a, mu) + lambda * b.dot(penalty * b);
  };

  PirlsResult res;
  double current = INFINITY;
  bool converged = false;
  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    res.iterations = iter;
    Vector mu(n), w(n), z(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      mu[i] = inv_logit(eta[i]);
      w[i] = std::max(mu[i] * (1.0 - mu[i]), 1e-12);
      z[i] = eta[i] + (av[i] - mu[i]) / w[i];
    }
    Eigen::MatrixXd h = x.transpose() * w.asDiagonal() * x + lambda * penalty;
    const Vector target = x.transpose() * (w.asDiagonal() * z);
    Vector beta_new = h.ldlt().solve(target);
    Vector eta_new = x * beta_new;

    // Step halving toward the previous iterate when the penalized deviance rises.
    if (beta.size() == beta_new.size()) {
      double value = penalized_dev(eta_new, beta_new);
      double t = 1.0;
      while (value > current + 1e-12 * (1.0 + std::abs(current)) && t > 1e-8) {
        t *= 0.5;
        beta_new = beta + t * (beta_new - beta);
        eta_new = x * beta_new;
        value = penalized_dev(eta_new, beta_new);
      }
      current = value;
    } else {
      current = penalized_dev(eta_new, beta_new);
    }

    const double change = (eta_new - eta).cwiseAbs().maxCoeff();
    beta = std::move(beta_new);
    eta = std::move(eta_new);
    if (!std::isfinite(change)) break;
    if (change < opt.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "penalized IRLS did not converge (lambda=" << lambda << ", iterations=" << res.iterations
        << ", max|eta|=" << eta.cwiseAbs().maxCoeff() << ")";
    throw GamError(msg.str());
  }

  Vector mu(n), w(n);
  double pearson = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    mu[i] = inv_logit(eta[i]);
    w[i] = std::max(mu[i] * (1.0 - mu[i]), 1e-12);
    pearson += (av[i] - mu[i]) * (av[i] - mu[i]) / w[i];
  }
  const Eigen::MatrixXd info = x.transpose() * w.asDiagonal() * x;
  const Eigen::MatrixXd h = info + lambda * penalty;
  res.penalized_info_inv = h.ldlt().solve(Eigen::MatrixXd::Identity(h.rows(), h.cols()));
  res.edf = (res.penalized_info_inv * info).trace();
  res.beta = beta;
  res.eta = eta;
  res.deviance = deviance(a, mu);
  res.pearson = pearson;
  const double nd = static_cast<double>(n);
  res.gcv = nd * res.deviance / ((nd - res.edf) * (nd - res.edf));
  return res;
}

std::optional<PirlsResult> try_pirls(const Eigen::MatrixXd& x, const Eigen::MatrixXd& penalty, std::span<const double> a,
                                     double lambda, const Vector& eta_start, const GamOptions& opt) {
  try {
    return pirls(x, penalty, a, lambda, eta_start, opt);
  } catch (const GamError&) {
    return std::nullopt;
  }
}

PirlsResult failed_candidate() {
  PirlsResult r;
  r.gcv = INFINITY;
  return r;
}

}  // namespace

std::vector<double> uniform_knots(int interior_knots) {
  const double h = 1.0 / static_cast<double>(interior_knots + 1);
  std::vector<double> knots;
  for (int j = -kDegree; j <= interior_knots + 1 + kDegree; ++j) knots.push_back(j * h);
  return knots;
}

// Cox-de Boor recursion on half-open knot intervals.
Vector bspline_basis(double t, std::span<const double> knots) {
  const std::size_t nk = knots.size();
  std::vector<double> b(nk - 1, 0.0);
  for (std::size_t j = 0; j + 1 < nk; ++j)
    if (knots[j] <= t && t < knots[j + 1]) b[j] = 1.0;
  for (int d = 1; d <= kDegree; ++d) {
    for (std::size_t j = 0; j + d + 1 < nk; ++j) {
      double v = 0.0;
      const double left = knots[j + d] - knots[j];
      const double right = knots[j + d + 1] - knots[j + 1];
      if (left > 0) v += (t - knots[j]) / left * b[j];
      if (right > 0) v += (knots[j + d + 1] - t) / right * b[j + 1];
      b[j] = v;
    }
  }
  const std::size_t q = nk - kDegree - 1;
  Vector out(static_cast<Eigen::Index>(q));
  for (std::size_t j = 0; j < q; ++j) out[static_cast<Eigen::Index>(j)] = b[j];
  return out;
}

Vector GamFit::basis(double t) const { return bspline_basis(t, knots); }

double GamFit::eta(double t) const {
  if (degenerate) {
    if (constant_value <= 0.0) return -INFINITY;
    if (constant_value >= 1.0) return INFINITY;
    return logit(constant_value);
  }
  return basis(t).dot(coefficients);
}

double GamFit::se_eta(double t) const {
  if (degenerate) return 0.0;
  const Vector b = basis(t);
  return std::sqrt(std::max(b.dot(covariance * b), 0.0));
}

double GamFit::mean(double t) const {
  if (degenerate) return constant_value;
  return inv_logit(eta(t));
}

GamFit fit_gam(std::span<const double> a, std::span<const double> budget_fractions, const GamOptions& options) {
  const std::size_t n = a.size();
  if (n < 20) throw InvalidArgument("fit_gam needs at least 20 observations");
  if (budget_fractions.size() != n) throw InvalidArgument("fit_gam: response and covariate lengths differ");
  for (double v : a)
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("fit_gam: responses must lie in [0, 1]");

  GamFit fit;
  fit.knots = uniform_knots(options.interior_knots);
  const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
  if (*lo == *hi) {
    fit.degenerate = true;
    fit.constant_value = *lo;
    fit.dispersion = std::numeric_limits<double>::min();
    return fit;
  }

  const Eigen::Index q = options.interior_knots + kDegree + 1;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), q);
  for (std::size_t i = 0; i < n; ++i) x.row(static_cast<Eigen::Index>(i)) = bspline_basis(budget_fractions[i], fit.knots).transpose();

  Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(q - 2, q);
  for (Eigen::Index j = 0; j < q - 2; ++j) {
    diff(j, j) = 1.0;
    diff(j, j + 1) = -2.0;
    diff(j, j + 2) = 1.0;
  }
  const Eigen::MatrixXd penalty = diff.transpose() * diff;

  Vector eta0(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) eta0[static_cast<Eigen::Index>(i)] = logit((a[i] + 0.5) / 2.0);

  PirlsResult best;
  double best_lambda = 0.0;
  if (options.fixed_lambda) {
    best_lambda = *options.fixed_lambda;
    best = pirls(x, penalty, a, best_lambda, eta0, options);
  } else {
    const int g = std::max(options.lambda_grid, 3);
    const double step = (options.log10_lambda_max - options.log10_lambda_min) / (g - 1);
    double best_log = options.log10_lambda_min;
    Vector warm = eta0;
    best.gcv = INFINITY;
    // Descend from heavy smoothing so each warm start is close to the next fit.
    for (int k = g - 1; k >= 0; --k) {
      const double log_l = options.log10_lambda_min + k * step;
      auto candidate = try_pirls(x, penalty, a, std::pow(10.0, log_l), warm, options);
      if (!candidate) continue;
      PirlsResult r = std::move(*candidate);
      warm = r.eta;
      if (r.gcv < best.gcv) {
        best = std::move(r);
        best_log = log_l;
      }
    }
    if (!std::isfinite(best.gcv)) throw GamError("penalized IRLS failed for every smoothing parameter");
    // Golden-section refinement inside the neighbouring grid cells.
    double left = std::max(best_log - step, options.log10_lambda_min);
    double right = std::min(best_log + step, options.log10_lambda_max);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = right - phi * (right - left);
    double d = left + phi * (right - left);
    auto refine = [&](double log_l, const Vector& start) {
      return try_pirls(x, penalty, a, std::pow(10.0, log_l), start, options).value_or(failed_candidate());
    };
    PirlsResult rc = refine(c, best.eta);
    PirlsResult rd = refine(d, best.eta);
    for (int it = 0; it < 25; ++it) {
      if (rc.gcv < rd.gcv) {
        right = d;
        d = c;
        rd = std::move(rc);
        c = right - phi * (right - left);
        rc = refine(c, best.eta);
      } else {
        left = c;
        c = d;
        rc = std::move(rd);
        d = left + phi * (right - left);
        rd = refine(d, best.eta);
      }
    }
    if (rc.gcv < best.gcv) {
      best = std::move(rc);
      best_log = c;
    }
    if (rd.gcv < best.gcv) {
      best = std::move(rd);
      best_log = d;
    }
    best_lambda = std::pow(10.0, best_log);
  }

  const double residual_df = static_cast<double>(n) - best.edf;
  fit.coefficients = best.beta;
  fit.smoothing_parameter = best_lambda;
  fit.edf = best.edf;
  fit.gcv = best.gcv;
  fit.iterations = best.iterations;
  fit.dispersion = std::max(best.pearson / residual_df, std::numeric_limits<double>::min());
  fit.covariance = best.penalized_info_inv * fit.dispersion;
  return fit;
}

double band_z(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("band level must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * level);
}

std::vector<double> gam_curve(const GamFit& fit, std::span<const double> grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(fit.mean(t));
  return out;
}

std::vector<double> gam_lower_band(const GamFit& fit, std::span<const double> grid, double level) {
  const double z = band_z(level);
  std::vector<double> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(fit.degenerate ? fit.constant_value : inv_logit(fit.eta(t) - z * fit.se_eta(t)));
  return out;
}

std::vector<double> gam_upper_band(const GamFit& fit, std::span<const double> grid, double level) {
  const double z = band_z(level);
  std::vector<double> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(fit.degenerate ? fit.constant_value : inv_logit(fit.eta(t) + z * fit.se_eta(t)));
  return out;
}

}  // namespace alsim
