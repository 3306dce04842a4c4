#include <cmath>

#include <gtest/gtest.h>

#include "alsim/classifiers.hpp"

namespace alsim {
namespace {

TaskSpec symmetric_gaussians(double mu) {
  TaskSpec spec;
  spec.task_id = "pair";
  GaussianCluster c0{Vector::Zero(2), Eigen::MatrixXd::Identity(2, 2), 1.0, 0};
  GaussianCluster c1 = c0;
  c0.mean << -mu, 0.0;
  c1.mean << mu, 0.0;
  c1.class_label = 1;
  spec.clusters = {c0, c1};
  return spec;
}

std::vector<ClassifierSpec> all_kinds() {
  return {ClassifierSpec::logreg(), ClassifierSpec::qda(), ClassifierSpec::knn(5),
          ClassifierSpec::random_forest(30), ClassifierSpec::svm()};
}

TEST(Classifiers, QdaNearBayesError) {
  const Task task = build_task(symmetric_gaussians(1.0));
  const double ber = estimate_bayes_error(task, 100000, 1).rate;
  const Model m = fit(ClassifierSpec::qda(), sample_dataset(task, 5000, 2), 3);
  const double err = 1.0 - score(m, sample_dataset(task, 20000, 4));
  EXPECT_NEAR(err, ber, 0.02);
}

TEST(Classifiers, ProbaRowsSumToOne) {
  const Task task = build_task(make_preset("sd7"));
  for (const auto& spec : all_kinds()) {
    const Model m = fit(spec, sample_dataset(task, 200, 5), 6);
    const Matrix p = predict_proba(m, sample_dataset(task, 300, 7).features);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      EXPECT_NEAR(p(i, 0) + p(i, 1), 1.0, 1e-12) << spec.label();
      EXPECT_GE(p(i, 1), 0.0);
      EXPECT_LE(p(i, 1), 1.0);
    }
  }
}

TEST(Classifiers, SingleClassIsDegenerate) {
  Matrix x = Matrix::Random(20, 2);
  std::vector<int> y(20, 1);
  for (const auto& spec : all_kinds()) EXPECT_THROW(fit(spec, x, y, 1), DegenerateFitError) << spec.label();
}

TEST(Classifiers, SameSeedSamePredictions) {
  const Task task = build_task(make_preset("sd8"));
  const Dataset train = sample_dataset(task, 300, 1);
  const Matrix probe = sample_dataset(task, 200, 2).features;
  for (const auto& spec : all_kinds()) {
    EXPECT_EQ(fit(spec, train, 42).predict_prob1(probe), fit(spec, train, 42).predict_prob1(probe)) << spec.label();
  }
}

TEST(Classifiers, DimensionMismatchOnPredict) {
  const Dataset train = sample_dataset(build_task(make_preset("sd2")), 100, 1);
  const Model m = fit(ClassifierSpec::qda(), train, 1);
  EXPECT_THROW(m.predict_prob1(Matrix::Zero(3, 5)), DimensionMismatch);
}

TEST(LogReg, SeparableStaysFinite) {
  Matrix x(40, 1);
  std::vector<int> y(40);
  for (int i = 0; i < 40; ++i) {
    x(i, 0) = i < 20 ? -1.0 - i : 1.0 + i;
    y[static_cast<std::size_t>(i)] = i < 20 ? 0 : 1;
  }
  const Model m = fit(ClassifierSpec::logreg(), x, y, 0);
  const auto& p = std::get<LogRegParams>(m.params());
  EXPECT_TRUE(p.coefficients.allFinite());
  EXPECT_TRUE(m.converged());
  EXPECT_EQ(score(m, Dataset{x, y, {}}), 1.0);
}

TEST(LogReg, ZeroCoefficientsGiveHalf) {
  const Model m(ClassifierSpec::logreg(), 2, LogRegParams{Vector::Zero(3), true, 1});
  const Matrix p = predict_proba(m, Matrix::Random(10, 2));
  for (Eigen::Index i = 0; i < 10; ++i) {
    EXPECT_EQ(p(i, 0), 0.5);
    EXPECT_EQ(p(i, 1), 0.5);
  }
  // Tie goes to class 0.
  for (int label : predict_labels(m, Matrix::Random(5, 2))) EXPECT_EQ(label, 0);
}

TEST(Qda, SymmetryPointIsHalf) {
  Matrix x(40, 2);
  std::vector<int> y(40);
  Rng rng(3);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 20; ++i) {
    const double a = n01(rng), b = n01(rng);
    x.row(i) << -2.0 + a, b;
    x.row(i + 20) << 2.0 - a, b;  // mirror image
    y[static_cast<std::size_t>(i)] = 0;
    y[static_cast<std::size_t>(i + 20)] = 1;
  }
  const Model m = fit(ClassifierSpec::qda(), x, y, 0);
  const Matrix p = predict_proba(m, Matrix::Zero(1, 2));
  EXPECT_NEAR(p(0, 1), 0.5, 1e-12);
}

TEST(Knn, VoteFraction) {
  Matrix x(10, 1);
  std::vector<int> y(10);
  // Five nearest to 0: distances 1..5 with labels 1,1,0,1,0; the rest far away.
  const double pos[] = {1, -2, 3, -4, 5, 100, 101, 102, 103, 104};
  const int lab[] = {1, 1, 0, 1, 0, 0, 0, 0, 0, 0};
  for (int i = 0; i < 10; ++i) {
    x(i, 0) = pos[i];
    y[static_cast<std::size_t>(i)] = lab[i];
  }
  const Model m = fit(ClassifierSpec::knn(5), x, y, 0);
  const Matrix p = predict_proba(m, Matrix::Zero(1, 1));
  EXPECT_DOUBLE_EQ(p(0, 0), 0.4);
  EXPECT_DOUBLE_EQ(p(0, 1), 0.6);
}

TEST(Score, PerfectAndConstant) {
  const Task task = build_task(make_preset("sd2"));
  const Dataset test = sample_dataset(task, 4000, 9);
  const Model zero(ClassifierSpec::logreg(), 2, LogRegParams{Vector::Zero(3), true, 1});
  const double frac0 = static_cast<double>(test.count_label(0)) / 4000.0;
  EXPECT_DOUBLE_EQ(score(zero, test), frac0);
  EXPECT_NEAR(score(zero, test), 0.5, 0.03);
}

TEST(OptimumError, QdaMatchedTask) {
  TaskSpec spec = symmetric_gaussians(1.0);
  spec.separation_scale = calibrate_separation(spec, 0.10, 0.005, 100000, 2);
  const Task task = build_task(spec);
  EXPECT_NEAR(optimum_error_rate(ClassifierSpec::qda(), task, 5, 5000, 3), 0.10, 0.01);
}

TEST(OptimumError, LinearModelOnXorExceedsBer) {
  const Task task = build_task(make_preset("sd10"));
  const double ber = estimate_bayes_error(task, 100000, 1).rate;
  EXPECT_GT(optimum_error_rate(ClassifierSpec::logreg(), task, 5, 5000, 3), ber + 0.1);
}

TEST(Mismatch, Clamped) {
  EXPECT_DOUBLE_EQ(classifier_mismatch(0.15, 0.10), 0.15 - 0.10);
  EXPECT_EQ(classifier_mismatch(0.10, 0.10), 0.0);
  EXPECT_EQ(classifier_mismatch(0.098, 0.10), 0.0);
}

TEST(Qda, PosteriorApproachesBayes) {
  TaskSpec spec = make_preset("sd2");
  const Task task = build_task(spec);
  const Model m = fit(ClassifierSpec::qda(), sample_dataset(task, 10000, 5), 0);
  // Mean KL between true and fitted Bernoulli posteriors on a probe grid.
  double kl = 0.0;
  int count = 0;
  for (double a = -3; a <= 3; a += 0.25)
    for (double b = -3; b <= 3; b += 0.25) {
      const std::vector<double> x{a, b};
      const double p = std::clamp(task.posterior_class1(x), 1e-12, 1 - 1e-12);
      Matrix q_row(1, 2);
      q_row << a, b;
      const double q = std::clamp(m.predict_prob1(q_row)[0], 1e-12, 1 - 1e-12);
      kl += p * std::log(p / q) + (1 - p) * std::log((1 - p) / (1 - q));
      ++count;
    }
  EXPECT_LT(kl / count, 0.01);
}

TEST(Parse, ClassifierLabels) {
  EXPECT_EQ(parse_classifier("rf").kind, ClassifierKind::kRandomForest);
  EXPECT_EQ(parse_classifier("knn21").k, 21);
  EXPECT_EQ(ClassifierSpec::knn(5).label(), "knn5");
  EXPECT_THROW(parse_classifier("tree"), InvalidArgument);
}

TEST(Platt, RecoversSigmoid) {
  Rng rng(1);
  std::uniform_real_distribution<double> u(-3, 3), v(0, 1);
  std::vector<double> f(20000);
  std::vector<int> y(20000);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = u(rng);
    y[i] = v(rng) < 1.0 / (1.0 + std::exp(-2.0 * f[i] + 0.5)) ? 1 : 0;
  }
  const auto [a, b] = detail::fit_platt(f, y);
  EXPECT_NEAR(a, -2.0, 0.15);
  EXPECT_NEAR(b, 0.5, 0.1);
}

}  // namespace
}  // namespace alsim
