#include <cmath>

#include "alsim/classifiers.hpp"

namespace alsim::detail {

namespace {

constexpr int kMaxIterations = 100;
constexpr double kStepTolerance = 1e-8;

double log1p_exp(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

Matrix with_intercept(const Matrix& x) {
  Matrix out(x.rows(), x.cols() + 1);
  out.col(0).setOnes();
  out.rightCols(x.cols()) = x;
  return out;
}

}  // namespace

// Ridge-penalized Newton/IRLS with step halving on the penalized log-likelihood.
LogRegParams fit_logreg(const Matrix& x, std::span<const int> y, double ridge) {
  const Matrix xt = with_intercept(x);
  const Eigen::Index n = xt.rows();
  const Eigen::Index q = xt.cols();
  Vector yv(n);
  for (Eigen::Index i = 0; i < n; ++i) yv[i] = y[static_cast<std::size_t>(i)];

  auto objective = [&](const Vector& beta) {
    const Vector eta = xt * beta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) ll += yv[i] * eta[i] - log1p_exp(eta[i]);
    return ll - 0.5 * ridge * beta.squaredNorm();
  };

  LogRegParams out;
  Vector beta = Vector::Zero(q);
  double current = objective(beta);
  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    out.iterations = iter;
    const Vector eta = xt * beta;
    Vector mu(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      mu[i] = sigmoid(eta[i]);
      w[i] = mu[i] * (1.0 - mu[i]);
    }
    const Vector grad = xt.transpose() * (yv - mu) - ridge * beta;
    Eigen::MatrixXd hess = xt.transpose() * w.asDiagonal() * xt;
    hess.diagonal().array() += ridge;
    const Vector step = hess.ldlt().solve(grad);

    double t = 1.0;
    Vector candidate = beta + step;
    double value = objective(candidate);
    while (value < current && t > 1e-10) {
      t *= 0.5;
      candidate = beta + t * step;
      value = objective(candidate);
    }
    const double change = (t * step).cwiseAbs().maxCoeff();
    beta = candidate;
    current = value;
    if (change < kStepTolerance) {
      out.converged = true;
      break;
    }
  }
  out.coefficients = beta;
  return out;
}

Vector logreg_prob1(const LogRegParams& p, const Matrix& x) {
  Vector out(x.rows());
  const auto slope = p.coefficients.tail(p.coefficients.size() - 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = sigmoid(p.coefficients[0] + x.row(i).dot(slope));
  return out;
}

}  // namespace alsim::detail
