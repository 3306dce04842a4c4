#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "alsim/evalstat.hpp"

namespace alsim {
namespace {

double inv_logit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Lag-1 autocorrelation via the successive-difference identity
//   r1 = 1 - (d_1^2 + d_n^2 + sum (x_{t+1} - x_t)^2) / (2 sum d_t^2),  d_t = x_t - mean.
double acf1_oracle(const std::vector<double>& x) {
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double s = 0.0, jumps = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    s += (x[t] - m) * (x[t] - m);
    if (t + 1 < x.size()) jumps += (x[t + 1] - x[t]) * (x[t + 1] - x[t]);
  }
  const double d1 = x.front() - m, dn = x.back() - m;
  return 1.0 - (d1 * d1 + dn * dn + jumps) / (2.0 * s);
}

// A_i drawn as the mean of n_rs three-valued comparisons with the given win rate.
std::vector<double> synthetic_a(const std::vector<double>& mean, std::size_t n_rs, Rng& rng) {
  std::vector<double> a(mean.size());
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t i = 0; i < mean.size(); ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < n_rs; ++j) {
      // Half-steps: two Bernoulli(mean) coins per comparison give {0, 0.5, 1}.
      total += 0.5 * ((u(rng) < mean[i]) + (u(rng) < mean[i]));
    }
    a[i] = total / static_cast<double>(n_rs);
  }
  return a;
}

Trajectory trajectory(std::vector<double> scores, std::optional<std::size_t> inst = std::nullopt) {
  Trajectory t;
  t.labelled_counts.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) t.labelled_counts[i] = 10 + 10 * i;
  t.scores = std::move(scores);
  t.rs_instance = inst;
  t.strategy = inst ? StrategyId::kRandom : StrategyId::kEntropy;
  return t;
}

TEST(Differences, Definition) {
  const std::vector<double> s{0.5, 0.6, 0.55};
  const auto d = score_differences(s);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_NEAR(d[0], 0.1, 1e-15);
  EXPECT_NEAR(d[1], -0.05, 1e-15);
  const std::vector<double> flat(10, 0.7);
  for (double v : score_differences(flat)) EXPECT_EQ(v, 0.0);
}

TEST(Differences, TelescopingProperty) {
  Rng rng(4);
  std::uniform_int_distribution<int> k(0, 2000);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> s(101);
    for (auto& v : s) v = k(rng) / 2000.0;
    const auto d = score_differences(s);
    // Partial sums reproduce every score exactly up to rounding.
    double run = s[0];
    for (std::size_t i = 0; i < d.size(); ++i) {
      run += d[i];
      EXPECT_NEAR(run, s[i + 1], 1e-12);
    }
  }
}

TEST(Compare, PiecewiseValues) {
  EXPECT_EQ(compare(0.02, 0.01), 1.0);
  EXPECT_EQ(compare(0.0, 0.0), 0.5);
  EXPECT_EQ(compare(-0.01, 0.01), 0.0);
  EXPECT_THROW(compare(NAN, 0.0), InvalidArgument);
}

TEST(Compare, ComplementarityProperty) {
  Rng rng(5);
  std::uniform_int_distribution<int> k(-5, 5);
  for (int i = 0; i < 10000; ++i) {
    const double x = k(rng) / 1000.0, y = k(rng) / 1000.0;
    EXPECT_EQ(compare(x, y) + compare(y, x), 1.0);
  }
}

TEST(Series, TiesAndDominance) {
  const std::vector<double> al{0.01, 0.0, -0.02};
  const std::vector<std::vector<double>> rs{al, al, al};
  for (double a : comparison_series(al, rs).a) EXPECT_EQ(a, 0.5);
  const std::vector<std::vector<double>> lower{{0.0, -0.01, -0.03}, {-0.1, -0.1, -0.1}};
  for (double a : comparison_series(al, lower).a) EXPECT_EQ(a, 1.0);
}

TEST(Series, GranularityProperty) {
  Rng rng(6);
  std::uniform_int_distribution<int> k(-3, 3);
  for (std::size_t n_rs : {2u, 5u, 10u}) {
    std::vector<double> al(100);
    std::vector<std::vector<double>> rs(n_rs, std::vector<double>(100));
    for (auto& v : al) v = k(rng) / 500.0;
    for (auto& inst : rs)
      for (auto& v : inst) v = k(rng) / 500.0;
    for (double a : comparison_series(al, rs).a) {
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, 1.0);
      const double units = a / (0.5 / static_cast<double>(n_rs));
      EXPECT_NEAR(units, std::round(units), 1e-9);
    }
  }
}

TEST(Acf, LinearRamp) {
  std::vector<double> ramp(101);
  std::iota(ramp.begin(), ramp.end(), 0.0);
  const double r1 = acf(ramp, 1)[0];
  EXPECT_NEAR(r1, acf1_oracle(ramp), 1e-12);
  EXPECT_NEAR(r1, 0.97, 0.005);
  EXPECT_THROW(acf(score_differences(ramp), 1), InvalidArgument);
}

TEST(Acf, WhiteNoiseBand) {
  Rng rng(8);
  std::normal_distribution<double> n01;
  int inside = 0;
  const int reps = 1000;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> x(100);
    for (auto& v : x) v = n01(rng);
    const double r1 = acf(x, 1)[0];
    EXPECT_NEAR(r1, acf1_oracle(x), 1e-12);
    inside += std::abs(r1) < 2.0 / std::sqrt(100.0);
  }
  EXPECT_GE(inside, 930);
}

TEST(Aua, Trapezoid) {
  EXPECT_NEAR(aua(std::vector<double>(101, 0.8)), 0.8, 1e-12);
  std::vector<double> line(101);
  for (std::size_t i = 0; i < line.size(); ++i) line[i] = 0.5 + 0.4 * static_cast<double>(i) / 100.0;
  EXPECT_NEAR(aua(line), 0.7, 1e-12);
}

TEST(Gam, ConstantHalfIsFlat) {
  const std::vector<double> a(100, 0.5);
  const GamFit fit = fit_gam(a, difference_fractions(100));
  EXPECT_TRUE(fit.degenerate);
  const auto grid = zone_grid();
  for (double v : gam_curve(fit, grid)) EXPECT_EQ(v, 0.5);
  EXPECT_EQ(evaluate_zone(fit).zone_length, 0u);
}

TEST(Gam, RejectsShortOrOutOfRange) {
  EXPECT_THROW(fit_gam(std::vector<double>(10, 0.5), difference_fractions(10)), InvalidArgument);
  std::vector<double> a(30, 0.5);
  a[3] = 1.5;
  EXPECT_THROW(fit_gam(a, difference_fractions(30)), InvalidArgument);
}

TEST(Gam, RecoversLogisticDecay) {
  Rng rng(10);
  const auto t = difference_fractions(100);
  std::vector<double> truth(100);
  for (std::size_t i = 0; i < 100; ++i) truth[i] = inv_logit(1.0 - 4.0 * t[i]);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const GamFit fit = fit_gam(synthetic_a(truth, 10, rng), t);
    double sq = 0.0;
    for (std::size_t i = 0; i < 100; ++i) sq += std::pow(fit.mean(t[i]) - truth[i], 2);
    worst = std::max(worst, std::sqrt(sq / 100.0));
    for (std::size_t i = 0; i < 100; ++i) {
      EXPECT_GT(fit.mean(t[i]), 0.0);
      EXPECT_LT(fit.mean(t[i]), 1.0);
    }
  }
  EXPECT_LT(worst, 0.05);
}

TEST(Gam, FixedLambdaSkipsSearch) {
  Rng rng(3);
  const auto t = difference_fractions(100);
  std::vector<double> truth(100, 0.6);
  const auto a = synthetic_a(truth, 10, rng);
  GamOptions o;
  o.fixed_lambda = 10.0;
  EXPECT_EQ(fit_gam(a, t, o).smoothing_parameter, 10.0);
}

TEST(Band, NormalQuantileOracle) {
  // One-sided: Phi(-z) = 0.1 through the complementary error function.
  const double z = band_z(0.8);
  EXPECT_NEAR(0.5 * std::erfc(z / std::sqrt(2.0)), 0.1, 1e-12);
  EXPECT_NEAR(z, 1.2816, 5e-5);
}

TEST(Band, KnownLowerValue) {
  // Zero coefficients give eta = 0; a constant 0.25 covariance gives se = 0.5
  // because the B-spline basis sums to one inside the knot range.
  GamFit fit;
  fit.knots = uniform_knots(20);
  fit.coefficients = Vector::Zero(24);
  fit.covariance = Eigen::MatrixXd::Constant(24, 24, 0.25);
  const std::vector<double> grid{0.3};
  EXPECT_NEAR(fit.se_eta(0.3), 0.5, 1e-12);
  const double lower = gam_lower_band(fit, grid)[0];
  EXPECT_NEAR(lower, inv_logit(-band_z(0.8) * 0.5), 1e-12);
  EXPECT_NEAR(lower, 0.345, 5e-4);
  EXPECT_GT(gam_upper_band(fit, grid)[0], 0.5);
  fit.covariance.setZero();
  EXPECT_EQ(gam_lower_band(fit, grid)[0], gam_curve(fit, grid)[0]);
}

TEST(Basis, PartitionOfUnity) {
  const auto knots = uniform_knots(20);
  for (double t = 0.0; t < 1.0; t += 0.01) EXPECT_NEAR(bspline_basis(t, knots).sum(), 1.0, 1e-12);
}

TEST(Zone, PrefixRuns) {
  EXPECT_EQ(zone_length(std::vector<double>(200, 0.4)), 0u);
  EXPECT_EQ(zone_length(std::vector<double>(200, 0.6)), 200u);
  std::vector<double> band{0.6, 0.6, 0.4, 0.7, 0.8};
  EXPECT_EQ(zone_length(band), 2u);
  std::vector<double> late{0.45, 0.6, 0.6, 0.6, 0.3};
  EXPECT_EQ(zone_length(late), 3u);
  EXPECT_EQ(zone_start(late), 1u);
  std::vector<double> later{0.45, 0.45, 0.6};
  EXPECT_EQ(zone_length(later), 0u);
  std::vector<double> at_half{0.5, 0.5};
  EXPECT_EQ(zone_length(at_half), 0u);
}

TEST(Zone, MonotoneInLevelProperty) {
  Rng rng(12);
  const auto t = difference_fractions(100);
  std::vector<double> truth(100);
  for (std::size_t i = 0; i < 100; ++i) truth[i] = inv_logit(1.5 - 5.0 * t[i]);
  for (int rep = 0; rep < 10; ++rep) {
    const GamFit fit = fit_gam(synthetic_a(truth, 10, rng), t);
    std::size_t previous = 201;
    for (double level : {0.5, 0.6, 0.8, 0.9, 0.95, 0.99}) {
      const std::size_t z = evaluate_zone(fit, level).zone_length;
      EXPECT_LE(z, previous);
      previous = z;
    }
  }
}

TEST(Evaluate, DominantAlGetsAZone) {
  // Learning curves with test-set quantization noise; AL rises much faster.
  Rng rng(17);
  std::normal_distribution<double> noise(0.0, 0.004);
  auto curve = [&](double rate) {
    std::vector<double> s(101);
    for (std::size_t i = 0; i < 101; ++i) {
      const double x = static_cast<double>(i) / 100.0;
      s[i] = std::round((0.9 - 0.3 * std::exp(-rate * x) + noise(rng)) * 2000.0) / 2000.0;
    }
    return s;
  };
  const auto al = curve(15.0);
  std::vector<Trajectory> rs;
  for (std::size_t j = 0; j < 10; ++j) rs.push_back(trajectory(curve(3.0), j));
  const Evaluation ev = evaluate_experiment(trajectory(al), rs);
  EXPECT_TRUE(ev.record.gain_flag);
  EXPECT_GT(ev.record.zone_length, 10u);
  EXPECT_LT(ev.record.zone_length, 200u);
  EXPECT_GT(ev.record.aua_al, ev.record.aua_rs_mean);
  EXPECT_GT(ev.record.acf1_scores, ev.record.acf1_deltas);
}

TEST(Evaluate, IdenticalTrajectoriesGiveNoZone) {
  std::vector<double> s(101);
  for (std::size_t i = 0; i < 101; ++i) s[i] = 0.7 + 0.002 * static_cast<double>(i % 7);
  const std::vector<Trajectory> rs{trajectory(s, 0), trajectory(s, 1), trajectory(s, 2)};
  const Evaluation ev = evaluate_experiment(trajectory(s), rs);
  EXPECT_FALSE(ev.record.gain_flag);
  EXPECT_EQ(ev.record.zone_length, 0u);
  for (double a : ev.series.a) EXPECT_EQ(a, 0.5);
}

TEST(Evaluate, UndefinedAcfIsNan) {
  const std::vector<double> flat(101, 0.8);
  const std::vector<Trajectory> rs{trajectory(flat, 0), trajectory(flat, 1)};
  const Evaluation ev = evaluate_experiment(trajectory(flat), rs);
  EXPECT_TRUE(std::isnan(ev.record.acf1_scores));
  EXPECT_TRUE(std::isnan(ev.record.acf1_deltas));
}

}  // namespace
}  // namespace alsim
