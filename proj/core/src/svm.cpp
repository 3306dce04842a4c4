#include <algorithm>
#include <cmath>
#include <numeric>

#include "alsim/classifiers.hpp"

namespace alsim::detail {

namespace {

struct LinearSvm {
  Vector weights;
  double bias = 0.0;
};

// Pegasos: stochastic subgradient descent on
//   (lambda / 2) |w|^2 + mean_i hinge(y_i (w.x_i + b)),   lambda = 1 / (C n),
// with the bias carried as a unit-valued augmented feature and the
// second-half iterate average returned.
LinearSvm train_pegasos(const Matrix& z, std::span<const int> y, std::span<const std::size_t> rows, double penalty,
                        Rng& rng) {
  const Eigen::Index p = z.cols();
  const std::size_t n = rows.size();
  const double lambda = 1.0 / (penalty * static_cast<double>(n));
  const std::size_t iterations = std::clamp<std::size_t>(20 * n, 2000, 20000);

  Vector w = Vector::Zero(p + 1);
  Vector avg = Vector::Zero(p + 1);
  std::size_t averaged = 0;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const double radius = 1.0 / std::sqrt(lambda);
  Vector xi(p + 1);
  for (std::size_t t = 1; t <= iterations; ++t) {
    const std::size_t r = rows[pick(rng)];
    xi.head(p) = z.row(static_cast<Eigen::Index>(r)).transpose();
    xi[p] = 1.0;
    const double label = y[r] == 1 ? 1.0 : -1.0;
    const double eta = 1.0 / (lambda * static_cast<double>(t));
    const double margin = label * w.dot(xi);
    w *= 1.0 - eta * lambda;
    if (margin < 1.0) w += eta * label * xi;
    const double norm = w.norm();
    if (norm > radius) w *= radius / norm;
    if (t > iterations / 2) {
      avg += w;
      ++averaged;
    }
  }
  avg /= static_cast<double>(averaged);
  return {avg.head(p), avg[p]};
}

double decision(const LinearSvm& m, const Matrix& z, std::size_t row) {
  return z.row(static_cast<Eigen::Index>(row)).dot(m.weights) + m.bias;
}

}  // namespace
}  // namespace alsim::detail

namespace alsim {
double SvmParams::decision_value(std::span<const double> row) const {
  double acc = bias;
  for (Eigen::Index j = 0; j < weights.size(); ++j)
    acc += weights[j] * (row[static_cast<std::size_t>(j)] - center[j]) / scale[j];
  return acc;
}
}  // namespace alsim

namespace alsim::detail {

// Platt scaling with the regularized targets and the Newton / backtracking
// scheme of Lin, Lin and Weng.
std::pair<double, double> fit_platt(std::span<const double> f, std::span<const int> y) {
  const std::size_t n = f.size();
  double prior1 = 0.0, prior0 = 0.0;
  for (int v : y) (v == 1 ? prior1 : prior0) += 1.0;
  const double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo_target = 1.0 / (prior0 + 2.0);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = y[i] == 1 ? hi_target : lo_target;

  double a = 0.0;
  double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  auto objective = [&](double aa, double bb) {
    double fval = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fa = f[i] * aa + bb;
      fval += fa >= 0 ? t[i] * fa + std::log1p(std::exp(-fa)) : (t[i] - 1.0) * fa + std::log1p(std::exp(fa));
    }
    return fval;
  };
  double fval = objective(a, b);
  constexpr double kSigma = 1e-12;
  for (int iter = 0; iter < 100; ++iter) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fa = f[i] * a + b;
      double p, q;
      if (fa >= 0) {
        p = std::exp(-fa) / (1.0 + std::exp(-fa));
        q = 1.0 / (1.0 + std::exp(-fa));
      } else {
        p = 1.0 / (1.0 + std::exp(fa));
        q = std::exp(fa) / (1.0 + std::exp(fa));
      }
      const double d2 = p * q;
      h11 += f[i] * f[i] * d2;
      h22 += d2;
      h21 += f[i] * d2;
      const double d1 = t[i] - p;
      g1 += f[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    bool moved = false;
    while (step >= 1e-10) {
      const double na = a + step * da;
      const double nb = b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return {a, b};
}

SvmParams fit_svm(const Matrix& x, std::span<const int> y, std::span<const double> penalties, int folds, Seed seed) {
  const auto n = static_cast<std::size_t>(x.rows());
  const Eigen::Index p = x.cols();
  SvmParams out;
  out.center = x.colwise().mean().transpose();
  out.scale.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double sd = std::sqrt((x.col(j).array() - out.center[j]).square().sum() / static_cast<double>(n));
    out.scale[j] = sd > 0.0 ? sd : 1.0;
  }
  Matrix z(x.rows(), p);
  for (Eigen::Index j = 0; j < p; ++j) z.col(j) = (x.col(j).array() - out.center[j]) / out.scale[j];

  // Stratified fold assignment.
  Rng fold_rng(derive_seed(seed, SeedRole::kSplit));
  std::vector<int> fold(n);
  for (int c = 0; c < 2; ++c) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (y[i] == c) idx.push_back(i);
    std::shuffle(idx.begin(), idx.end(), fold_rng);
    for (std::size_t k = 0; k < idx.size(); ++k) fold[idx[k]] = static_cast<int>(k % static_cast<std::size_t>(folds));
  }

  double best_accuracy = -1.0;
  std::vector<double> best_oof;
  for (std::size_t ci = 0; ci < penalties.size(); ++ci) {
    std::vector<double> oof(n, 0.0);
    std::size_t correct = 0;
    for (int f = 0; f < folds; ++f) {
      std::vector<std::size_t> train_rows, held;
      for (std::size_t i = 0; i < n; ++i) (fold[i] == f ? held : train_rows).push_back(i);
      if (held.empty() || train_rows.empty()) continue;
      Rng rng(derive_seed(seed, SeedRole::kFit, ci * 1000 + static_cast<std::size_t>(f)));
      const LinearSvm m = train_pegasos(z, y, train_rows, penalties[ci], rng);
      for (auto i : held) {
        oof[i] = decision(m, z, i);
        correct += ((oof[i] > 0.0 ? 1 : 0) == y[i]) ? 1 : 0;
      }
    }
    const double accuracy = static_cast<double>(correct) / static_cast<double>(n);
    if (accuracy > best_accuracy) {
      best_accuracy = accuracy;
      out.penalty = penalties[ci];
      best_oof = std::move(oof);
    }
  }

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  Rng rng(derive_seed(seed, SeedRole::kFit, 999'999));
  const LinearSvm final_model = train_pegasos(z, y, all, out.penalty, rng);
  out.weights = final_model.weights;
  out.bias = final_model.bias;
  std::tie(out.platt_a, out.platt_b) = fit_platt(best_oof, y);
  return out;
}

Vector svm_prob1(const SvmParams& p, const Matrix& x) {
  Vector out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    const double f = p.decision_value({row.data(), static_cast<std::size_t>(row.size())});
    const double fa = p.platt_a * f + p.platt_b;
    out[i] = fa >= 0 ? std::exp(-fa) / (1.0 + std::exp(-fa)) : 1.0 / (1.0 + std::exp(fa));
  }
  return out;
}

}  // namespace alsim::detail
