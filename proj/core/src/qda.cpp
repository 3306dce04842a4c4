#include <cmath>

#include "alsim/classifiers.hpp"

namespace alsim::detail {

QdaParams fit_qda(const Matrix& x, std::span<const int> y, double ridge) {
  const Eigen::Index p = x.cols();
  QdaParams out;
  const double n = static_cast<double>(y.size());
  for (int c = 0; c < 2; ++c) {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == c) rows.push_back(static_cast<Eigen::Index>(i));
    const double nc = static_cast<double>(rows.size());
    out.log_prior[c] = std::log(nc / n);

    Vector mean = Vector::Zero(p);
    for (auto i : rows) mean += x.row(i).transpose();
    mean /= nc;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
    for (auto i : rows) {
      const Vector d = x.row(i).transpose() - mean;
      cov.noalias() += d * d.transpose();
    }
    cov /= std::max(nc - 1.0, 1.0);
    // Relative ridge; the absolute floor covers classes whose points coincide.
    const double eps = std::max(ridge * cov.trace() / static_cast<double>(p), 1e-10);
    cov.diagonal().array() += eps;

    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw DegenerateFitError("qda covariance is not positive definite");
    out.mean[c] = mean;
    out.chol_lower[c] = llt.matrixL();
    out.log_det[c] = 2.0 * out.chol_lower[c].diagonal().array().log().sum();
  }
  return out;
}

Vector qda_prob1(const QdaParams& p, const Matrix& x) {
  Vector out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double score[2];
    for (int c = 0; c < 2; ++c) {
      const Vector z = p.chol_lower[c].triangularView<Eigen::Lower>().solve(x.row(i).transpose() - p.mean[c]);
      score[c] = p.log_prior[c] - 0.5 * p.log_det[c] - 0.5 * z.squaredNorm();
    }
    out[i] = 1.0 / (1.0 + std::exp(score[0] - score[1]));
  }
  return out;
}

}  // namespace alsim::detail
