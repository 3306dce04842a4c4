#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "alsim/factoranalysis.hpp"

namespace alsim {
namespace {

struct Simulated {
  Eigen::MatrixXd x;
  std::vector<double> y;
};

// Intercept plus one standard-normal covariate; kappa <= 0 draws Poisson counts,
// otherwise gamma-Poisson mixture counts with Var = mu + mu^2 / kappa.
Simulated simulate(std::size_t n, double b0, double b1, double kappa, Seed seed) {
  Rng rng(seed);
  std::normal_distribution<double> n01;
  Simulated s;
  s.x.resize(static_cast<Eigen::Index>(n), 2);
  s.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = n01(rng);
    s.x(static_cast<Eigen::Index>(i), 0) = 1.0;
    s.x(static_cast<Eigen::Index>(i), 1) = z;
    double mu = std::exp(b0 + b1 * z);
    if (kappa > 0) mu = std::gamma_distribution<double>(kappa, mu / kappa)(rng);
    s.y[i] = static_cast<double>(std::poisson_distribution<long>(mu)(rng));
  }
  return s;
}

bool within_3se(const GlmFit& f, double b0, double b1) {
  return std::abs(f.coefficients[0] - b0) < 3 * f.standard_errors[0] &&
         std::abs(f.coefficients[1] - b1) < 3 * f.standard_errors[1];
}

FactorRow row(std::string task, std::string classifier, std::string input_type, std::size_t zone, double space) {
  FactorRow r;
  r.task = std::move(task);
  r.classifier = std::move(classifier);
  r.input_type = std::move(input_type);
  r.strategy = "se";
  r.zone_length = zone;
  r.gain_flag = zone > 0;
  r.space_for_al = space;
  r.mismatch = space * 0.3 + (zone % 3) * 0.01;
  return r;
}

TEST(Poisson, RecoversCoefficients) {
  const Simulated s = simulate(2000, 0.5, -1.0, 0.0, 1);
  const GlmFit f = fit_poisson_glm(s.x, s.y, {"(intercept)", "z"});
  EXPECT_TRUE(f.converged);
  EXPECT_TRUE(within_3se(f, 0.5, -1.0));
  EXPECT_NEAR(f.pearson_dispersion, 1.0, 0.15);
  for (Eigen::Index j = 0; j < 2; ++j) {
    EXPECT_GE(f.p_values[j], 0.0);
    EXPECT_LE(f.p_values[j], 1.0);
  }
}

TEST(Poisson, OverdispersionSignal) {
  double mean = 0.0;
  for (Seed seed = 0; seed < 10; ++seed) mean += fit_poisson_glm(simulate(2000, 0.5, -1.0, 1.0, seed).x,
                                                                  simulate(2000, 0.5, -1.0, 1.0, seed).y)
                                                      .pearson_dispersion;
  EXPECT_GT(mean / 10.0, 1.5);
}

TEST(Poisson, AllZeroFlagsNonConvergence) {
  Simulated s = simulate(200, 0.0, 0.0, 0.0, 3);
  std::fill(s.y.begin(), s.y.end(), 0.0);
  const GlmFit f = fit_poisson_glm(s.x, s.y);
  EXPECT_FALSE(f.converged);
  EXPECT_LT(f.coefficients[0], -10.0);
}

TEST(Poisson, RankDeficient) {
  Eigen::MatrixXd x(10, 3);
  x.col(0).setOnes();
  x.col(1) = Eigen::VectorXd::LinSpaced(10, 0, 1);
  x.col(2) = 2.0 * x.col(1);
  const std::vector<double> y(10, 1.0);
  EXPECT_THROW(fit_poisson_glm(x, y), RankDeficiencyError);
}

TEST(Poisson, RejectsNonCounts) {
  const Simulated s = simulate(50, 0.0, 0.0, 0.0, 4);
  std::vector<double> y = s.y;
  y[0] = 1.5;
  EXPECT_THROW(fit_poisson_glm(s.x, y), InvalidArgument);
}

TEST(NegBin, RecoversCoefficientsAndKappa) {
  const Simulated s = simulate(2000, 0.5, -1.0, 2.0, 5);
  const GlmFit f = fit_negbin_glm(s.x, s.y);
  EXPECT_TRUE(f.converged);
  EXPECT_TRUE(within_3se(f, 0.5, -1.0));
  EXPECT_GE(f.kappa, 1.5);
  EXPECT_LE(f.kappa, 2.7);
  EXPECT_FALSE(f.poisson_limit);
}

TEST(NegBin, PoissonDataHitsCap) {
  const Simulated s = simulate(2000, 0.5, -1.0, 0.0, 6);
  const GlmFit f = fit_negbin_glm(s.x, s.y);
  EXPECT_TRUE(f.poisson_limit);
  EXPECT_EQ(f.kappa, kKappaCap);
}

TEST(NegBin, CapMatchesPoisson) {
  const Simulated s = simulate(1000, 0.2, 0.7, 3.0, 7);
  NegBinOptions o;
  o.fixed_kappa = kKappaCap;
  const GlmFit nb = fit_negbin_glm(s.x, s.y, {}, o);
  const GlmFit po = fit_poisson_glm(s.x, s.y);
  EXPECT_LT((nb.coefficients - po.coefficients).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(NegBin, PValuesInvariantToRowOrder) {
  const Simulated s = simulate(500, 0.5, -0.3, 2.0, 8);
  std::vector<Eigen::Index> perm(500);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), Rng(2));
  Eigen::MatrixXd xp(500, 2);
  std::vector<double> yp(500);
  for (Eigen::Index i = 0; i < 500; ++i) {
    xp.row(i) = s.x.row(perm[static_cast<std::size_t>(i)]);
    yp[static_cast<std::size_t>(i)] = s.y[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
  }
  const GlmFit a = fit_negbin_glm(s.x, s.y);
  const GlmFit b = fit_negbin_glm(xp, yp);
  EXPECT_LT((a.p_values - b.p_values).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Glm, StandardErrorsShrinkWithN) {
  double se_small = 0.0, se_large = 0.0;
  for (Seed seed = 0; seed < 20; ++seed) {
    se_small += fit_poisson_glm(simulate(1000, 0.5, -1.0, 0.0, seed).x, simulate(1000, 0.5, -1.0, 0.0, seed).y)
                    .standard_errors[1];
    se_large += fit_poisson_glm(simulate(2000, 0.5, -1.0, 0.0, seed + 100).x,
                                simulate(2000, 0.5, -1.0, 0.0, seed + 100).y)
                    .standard_errors[1];
  }
  EXPECT_NEAR(se_large / se_small, 1.0 / std::sqrt(2.0), 0.05);
}

TEST(Encode, TreatmentCoding) {
  std::vector<FactorRow> rows;
  const char* classifiers[] = {"svm", "logreg", "rf", "qda"};
  for (int i = 0; i < 48; ++i)
    rows.push_back(row(i % 2 ? "sd2" : "sd7", classifiers[i % 4], i % 3 ? "continuous" : "discretized",
                       static_cast<std::size_t>(i % 5), 0.1 + 0.01 * i));
  const DesignMatrix d = encode_factors(rows);
  // intercept + task(1) + input_type(1) + classifier(3) + 2 covariates; the rest are single-level.
  EXPECT_EQ(d.x.cols(), 1 + 1 + 1 + 3 + 2);
  EXPECT_EQ(d.column_names.front(), "(intercept)");
  EXPECT_NE(std::find(d.reference_levels.begin(), d.reference_levels.end(), "classifier=logreg"),
            d.reference_levels.end());
  for (const char* name : {"classifier=qda", "classifier=rf", "classifier=svm"})
    EXPECT_NE(std::find(d.column_names.begin(), d.column_names.end(), name), d.column_names.end()) << name;
  EXPECT_FALSE(d.warnings.empty());
  const auto sfa = std::find(d.column_names.begin(), d.column_names.end(), "space_for_al") - d.column_names.begin();
  EXPECT_NEAR(d.x.col(sfa).mean(), 0.0, 1e-12);
  const double var = (d.x.col(sfa).array() - d.x.col(sfa).mean()).square().sum() / 47.0;
  EXPECT_NEAR(var, 1.0, 1e-12);

  EncodeOptions no_cov;
  no_cov.include_inferred_covariates = false;
  EXPECT_EQ(encode_factors(rows, no_cov).x.cols(), 6);
}

TEST(Findings, EmptySignificantTable) {
  std::vector<FactorRow> rows;
  for (int i = 0; i < 40; ++i) rows.push_back(row(i % 2 ? "sd2" : "sd7", "qda", "continuous", i % 10 == 0 ? 30 : 0, 0.2));
  GlmFit fit;
  fit.coefficients = Vector::Zero(2);
  fit.standard_errors = Vector::Ones(2);
  fit.p_values = Vector::Constant(2, 0.5);
  fit.design_column_names = {"(intercept)", "task=sd7"};
  const FindingsReport rep = summarize_findings(fit, rows);
  EXPECT_TRUE(rep.significant.empty());
  EXPECT_EQ(rep.experiments, 40u);
  EXPECT_EQ(rep.gain_experiments, 4u);
  EXPECT_DOUBLE_EQ(rep.gain_rate, 0.1);
  EXPECT_EQ(rep.mean_zone_length, 30.0);
  EXPECT_EQ(rep.median_zone_length, 30.0);
}

TEST(Findings, SortedByPValue) {
  GlmFit fit;
  fit.coefficients = Vector::LinSpaced(3, 1, 3);
  fit.standard_errors = Vector::Ones(3);
  fit.p_values = Vector(3);
  fit.p_values << 0.04, 0.001, 0.2;
  fit.design_column_names = {"a", "b", "c"};
  const FindingsReport rep = summarize_findings(fit, {});
  ASSERT_EQ(rep.significant.size(), 2u);
  EXPECT_EQ(rep.significant[0].name, "b");
  EXPECT_EQ(rep.significant[1].name, "a");
}

}  // namespace
}  // namespace alsim
