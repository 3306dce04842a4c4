#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "alsim/factoranalysis.hpp"

namespace alsim {

namespace {

constexpr int kMaxIrls = 100;
constexpr double kKappaFloor = 1e-8;

using QuietPolicy = boost::math::policies::policy<boost::math::policies::overflow_error<boost::math::policies::ignore_error>,
                                                  boost::math::policies::pole_error<boost::math::policies::ignore_error>>;

void check_inputs(const Eigen::MatrixXd& x, std::span<const double> y, std::vector<std::string>& names) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) throw DimensionMismatch("design rows and response length differ");
  if (x.rows() <= x.cols()) throw InvalidArgument("need more observations than design columns");
  for (double v : y)
    if (!(v >= 0.0) || v != std::floor(v)) throw InvalidArgument("count response must be non-negative integers");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < x.cols())
    throw RankDeficiencyError("design matrix is rank deficient (rank " + std::to_string(qr.rank()) + " < " +
                              std::to_string(x.cols()) + ")");
  if (names.empty())
    for (Eigen::Index j = 0; j < x.cols(); ++j) names.push_back("x" + std::to_string(j));
  if (names.size() != static_cast<std::size_t>(x.cols())) throw InvalidArgument("column name count mismatch");
}

// Variance function weight for the log link: (dmu/deta)^2 / V(mu).
double working_weight(double mu, double kappa) { return kappa > 0.0 ? mu / (1.0 + mu / kappa) : mu; }

struct IrlsState {
  Vector beta;
  Vector mu;
  bool converged = false;
  int iterations = 0;
};

// kappa <= 0 selects the Poisson variance.
IrlsState irls(const Eigen::MatrixXd& x, const Vector& y, Vector beta, double kappa) {
  const Eigen::Index n = x.rows();
  IrlsState st;
  Vector eta = beta.size() == x.cols() ? Vector(x * beta) : Vector((y.array() + 0.1).log().matrix());
  Vector mu = eta.array().exp();
  for (int iter = 1; iter <= kMaxIrls; ++iter) {
    st.iterations = iter;
    Vector w(n), z(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      w[i] = working_weight(mu[i], kappa);
      z[i] = eta[i] + (y[i] - mu[i]) / mu[i];
    }
    const Eigen::MatrixXd info = x.transpose() * w.asDiagonal() * x;
    const Vector beta_new = info.ldlt().solve(x.transpose() * (w.asDiagonal() * z));
    const double change = beta.size() == beta_new.size() ? (beta_new - beta).cwiseAbs().maxCoeff() : INFINITY;
    beta = beta_new;
    eta = (x * beta).cwiseMax(-700.0).cwiseMin(700.0);
    mu = eta.array().exp();
    if (!beta.allFinite()) break;
    if (change < 1e-8) {
      st.converged = true;
      break;
    }
  }
  st.beta = beta;
  st.mu = mu;
  return st;
}

double negbin_loglik(const Vector& y, const Vector& mu, double kappa) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    ll += std::lgamma(y[i] + kappa) - std::lgamma(kappa) - std::lgamma(y[i] + 1.0) +
          kappa * std::log(kappa / (kappa + mu[i]));
    if (y[i] > 0) ll += y[i] * std::log(mu[i] / (kappa + mu[i]));
  }
  return ll;
}

double poisson_loglik(const Vector& y, const Vector& mu) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    ll += -mu[i] - std::lgamma(y[i] + 1.0);
    if (y[i] > 0) ll += y[i] * std::log(mu[i]);
  }
  return ll;
}

// Newton ascent on theta = log kappa with backtracking; returns the new kappa.
double maximize_kappa(const Vector& y, const Vector& mu, double kappa, double cap) {
  auto digamma = [](double v) { return boost::math::digamma(v, QuietPolicy()); };
  auto trigamma = [](double v) { return boost::math::trigamma(v, QuietPolicy()); };
  const double lo = std::log(kKappaFloor), hi = std::log(cap);
  double theta = std::clamp(std::log(kappa), lo, hi);
  double current = negbin_loglik(y, mu, std::exp(theta));
  for (int iter = 0; iter < 100; ++iter) {
    const double k = std::exp(theta);
    double g = 0.0, h = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double km = k + mu[i];
      g += digamma(y[i] + k) - digamma(k) + std::log(k) + 1.0 - std::log(km) - (k + y[i]) / km;
      h += trigamma(y[i] + k) - trigamma(k) + 1.0 / k - 2.0 / km + (y[i] + k) / (km * km);
    }
    const double g_theta = k * g;
    const double h_theta = k * k * h + k * g;
    double step = h_theta < 0.0 ? -g_theta / h_theta : (g_theta > 0.0 ? 1.0 : -1.0);
    if (!std::isfinite(step)) step = g_theta > 0.0 ? 1.0 : -1.0;
    step = std::clamp(step, -5.0, 5.0);
    double t = 1.0;
    bool improved = false;
    while (t > 1e-6) {
      const double cand = std::clamp(theta + t * step, lo, hi);
      const double value = negbin_loglik(y, mu, std::exp(cand));
      if (value >= current) {
        const double moved = std::abs(cand - theta);
        theta = cand;
        current = value;
        improved = moved > 0.0;
        break;
      }
      t *= 0.5;
    }
    if (!improved || std::abs(t * step) < 1e-12 || theta >= hi || theta <= lo) break;
  }
  return theta >= hi ? cap : std::clamp(std::exp(theta), kKappaFloor, cap);
}

void finish(GlmFit& fit, const Eigen::MatrixXd& x, const Vector& y, const Vector& mu, double kappa) {
  const Eigen::Index n = x.rows();
  const Eigen::Index q = x.cols();
  Vector w(n);
  double pearson = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    w[i] = working_weight(mu[i], kappa);
    const double var = kappa > 0.0 ? mu[i] + mu[i] * mu[i] / kappa : mu[i];
    pearson += (y[i] - mu[i]) * (y[i] - mu[i]) / var;
  }
  const Eigen::MatrixXd info = x.transpose() * w.asDiagonal() * x;
  const Eigen::MatrixXd cov = info.ldlt().solve(Eigen::MatrixXd::Identity(q, q));
  fit.standard_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  fit.p_values.resize(q);
  for (Eigen::Index j = 0; j < q; ++j) {
    const double z = fit.coefficients[j] / fit.standard_errors[j];
    fit.p_values[j] = std::isfinite(z) ? std::clamp(std::erfc(std::abs(z) / std::sqrt(2.0)), 0.0, 1.0) : 1.0;
  }
  fit.pearson_dispersion = pearson / static_cast<double>(n - q);
}

}  // namespace

GlmFit fit_poisson_glm(const Eigen::MatrixXd& x, std::span<const double> y, std::vector<std::string> names) {
  check_inputs(x, y, names);
  const Vector yv = Eigen::Map<const Vector>(y.data(), static_cast<Eigen::Index>(y.size()));
  const IrlsState st = irls(x, yv, Vector(), 0.0);
  GlmFit fit;
  fit.family = GlmFamily::kPoisson;
  fit.design_column_names = std::move(names);
  fit.coefficients = st.beta;
  fit.converged = st.converged;
  fit.iterations = st.iterations;
  fit.log_likelihood = poisson_loglik(yv, st.mu);
  finish(fit, x, yv, st.mu, 0.0);
  return fit;
}

GlmFit fit_negbin_glm(const Eigen::MatrixXd& x, std::span<const double> y, std::vector<std::string> names,
                      const NegBinOptions& options) {
  check_inputs(x, y, names);
  const Vector yv = Eigen::Map<const Vector>(y.data(), static_cast<Eigen::Index>(y.size()));
  GlmFit fit;
  fit.family = GlmFamily::kNegBin;
  fit.design_column_names = std::move(names);

  if (options.fixed_kappa) {
    const IrlsState st = irls(x, yv, Vector(), *options.fixed_kappa);
    fit.coefficients = st.beta;
    fit.kappa = *options.fixed_kappa;
    fit.converged = st.converged;
    fit.iterations = st.iterations;
    fit.poisson_limit = fit.kappa >= options.kappa_cap;
    fit.log_likelihood = negbin_loglik(yv, st.mu, fit.kappa);
    finish(fit, x, yv, st.mu, fit.kappa);
    return fit;
  }

  IrlsState st = irls(x, yv, Vector(), 0.0);
  // Moment start for kappa from the Poisson fit.
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < yv.size(); ++i) {
    num += st.mu[i] * st.mu[i];
    den += (yv[i] - st.mu[i]) * (yv[i] - st.mu[i]) - st.mu[i];
  }
  double kappa = den > 0.0 ? std::clamp(num / den, 1e-3, options.kappa_cap) : options.kappa_cap;

  bool converged = false;
  int outer = 0;
  for (outer = 1; outer <= options.max_outer_iterations; ++outer) {
    const Vector beta_old = st.beta;
    st = irls(x, yv, st.beta, kappa);
    const double new_kappa = maximize_kappa(yv, st.mu, kappa, options.kappa_cap);
    const double d_beta = (st.beta - beta_old).cwiseAbs().maxCoeff();
    const double d_kappa = std::abs(std::log(new_kappa) - std::log(kappa));
    kappa = new_kappa;
    if (!st.beta.allFinite()) break;
    if (st.converged && d_beta < options.tolerance && d_kappa < options.tolerance) {
      converged = true;
      break;
    }
  }
  fit.coefficients = st.beta;
  fit.kappa = kappa;
  fit.poisson_limit = kappa >= options.kappa_cap;
  fit.converged = converged;
  fit.iterations = outer;
  fit.log_likelihood = negbin_loglik(yv, st.mu, kappa);
  finish(fit, x, yv, st.mu, kappa);
  return fit;
}

}  // namespace alsim
