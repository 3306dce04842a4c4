#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "alsim/classifiers.hpp"
#include "alsim/evalstat.hpp"
#include "alsim/factoranalysis.hpp"
#include "alsim/runner.hpp"
#include "alsim/strategies.hpp"
#include "alsim/taskgen.hpp"

namespace {

using namespace alsim;

Dataset training_set(std::size_t n) { return sample_dataset(build_task(make_preset("sd7")), n, 7); }

void fit_classifier(benchmark::State& state, const ClassifierSpec& spec) {
  const Dataset train = training_set(static_cast<std::size_t>(state.range(0)));
  Seed seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(fit(spec, train, ++seed));
}

void BM_FitLogReg(benchmark::State& s) { fit_classifier(s, ClassifierSpec::logreg()); }
void BM_FitQda(benchmark::State& s) { fit_classifier(s, ClassifierSpec::qda()); }
void BM_FitForest(benchmark::State& s) { fit_classifier(s, ClassifierSpec::random_forest(50)); }
void BM_FitSvm(benchmark::State& s) { fit_classifier(s, ClassifierSpec::svm()); }
BENCHMARK(BM_FitLogReg)->Arg(100)->Arg(1000);
BENCHMARK(BM_FitQda)->Arg(100)->Arg(1000);
BENCHMARK(BM_FitForest)->Arg(100)->Arg(1000);
BENCHMARK(BM_FitSvm)->Arg(100)->Arg(1000);

void BM_KnnPredict(benchmark::State& state) {
  const Dataset train = training_set(static_cast<std::size_t>(state.range(0)));
  const Dataset pool = training_set(1000);
  const Model m = fit(ClassifierSpec::knn(5), train, 1);
  for (auto _ : state) benchmark::DoNotOptimize(predict_proba(m, pool.features));
}
BENCHMARK(BM_KnnPredict)->Arg(100)->Arg(1000);

void BM_RankPoolEntropy(benchmark::State& state) {
  const Model m = fit(ClassifierSpec::qda(), training_set(200), 1);
  const Dataset pool = training_set(1000);
  for (auto _ : state) benchmark::DoNotOptimize(rank_pool_se(m, pool.features));
}
BENCHMARK(BM_RankPoolEntropy);

void BM_FitGam(benchmark::State& state) {
  Rng rng(3);
  const auto t = difference_fractions(100);
  std::vector<double> a(100);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-(1.0 - 4.0 * t[i])));
    a[i] = std::binomial_distribution<int>(20, p)(rng) / 20.0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_gam(a, t));
}
BENCHMARK(BM_FitGam)->Unit(benchmark::kMillisecond);

void BM_FitNegBin(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Rng rng(5);
  std::normal_distribution<double> z;
  Eigen::MatrixXd x(n, 4);
  std::vector<double> y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < 4; ++j) x(i, j) = z(rng);
    const double mu = std::exp(0.5 + 0.3 * x(i, 1) - 0.2 * x(i, 2));
    y[static_cast<std::size_t>(i)] =
        std::poisson_distribution<int>(std::gamma_distribution<double>(2.0, mu / 2.0)(rng))(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_negbin_glm(x, y));
}
BENCHMARK(BM_FitNegBin)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Experiment(benchmark::State& state) {
  ExperimentConfig c;
  c.task_spec = make_preset("sd2");
  c.classifier = ClassifierSpec::qda();
  c.pool_size = 500;
  c.n_test = 1000;
  c.n_rs = 5;
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(c, Benchmarks{0.1, 0.1}));
}
BENCHMARK(BM_Experiment)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
