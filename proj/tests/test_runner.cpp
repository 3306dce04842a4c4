#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "alsim/runner.hpp"

namespace alsim {
namespace {

ExperimentConfig small_config(StrategyId strategy, ClassifierSpec classifier = ClassifierSpec::qda()) {
  ExperimentConfig c;
  c.task_spec = make_preset("sd2");
  c.classifier = std::move(classifier);
  c.strategy = strategy;
  c.pool_size = 200;
  c.n_steps = 20;
  c.n_test = 500;
  c.n_rs = 3;
  c.master_seed = 31;
  c.ber_mc = 10000;
  c.opt_reps = 5;
  c.opt_n_large = 5000;
  return c;
}

TEST(Split, PartitionsTrainingSet) {
  const Dataset train = sample_dataset(build_task(make_preset("sd7")), 1010, 1);
  const InitialSplit s = split_initial(train, 10, 2);
  EXPECT_EQ(s.initial.size(), 10u);
  EXPECT_EQ(s.pool.size(), 1000u);
  // Disjoint and exhaustive: rows are distinct continuous draws, so compare them as keys.
  std::multiset<std::pair<double, double>> all, parts;
  for (Eigen::Index i = 0; i < train.features.rows(); ++i) all.insert({train.features(i, 0), train.features(i, 1)});
  for (Eigen::Index i = 0; i < 10; ++i) parts.insert({s.initial.features(i, 0), s.initial.features(i, 1)});
  for (Eigen::Index i = 0; i < 1000; ++i) parts.insert({s.pool.features()(i, 0), s.pool.features()(i, 1)});
  EXPECT_EQ(all, parts);
  EXPECT_GE(s.initial.count_label(0), 2u);
  EXPECT_GE(s.initial.count_label(1), 2u);
}

TEST(Split, Deterministic) {
  const Dataset train = sample_dataset(build_task(make_preset("sd7")), 300, 1);
  const InitialSplit a = split_initial(train, 10, 5);
  const InitialSplit b = split_initial(train, 10, 5);
  EXPECT_EQ(a.initial.features, b.initial.features);
  EXPECT_EQ(a.pool.features(), b.pool.features());
}

TEST(Experiment, ShapesAndEndpoints) {
  const ExperimentConfig c = small_config(StrategyId::kEntropy);
  const ExperimentResult r = run_experiment(c);
  ASSERT_EQ(r.rs_trajectories.size(), 3u);
  ASSERT_EQ(r.al_trajectory.scores.size(), 21u);
  EXPECT_EQ(r.al_trajectory.labelled_counts.front(), 10u);
  EXPECT_EQ(r.al_trajectory.labelled_counts.back(), 210u);
  for (std::size_t j = 0; j < 3; ++j) {
    const Trajectory& t = r.rs_trajectories[j];
    EXPECT_EQ(t.rs_instance, j);
    EXPECT_EQ(t.scores.front(), r.s_initial);
    EXPECT_EQ(t.scores.back(), r.s_all);
    for (std::size_t i = 0; i < t.labelled_counts.size(); ++i) EXPECT_EQ(t.labelled_counts[i], 10 + 10 * i);
  }
  EXPECT_NE(r.rs_trajectories[0].scores, r.rs_trajectories[1].scores);
}

TEST(Experiment, EndpointEqualityAcrossClassifiers) {
  // Property: every trajectory that exhausts the pool ends at S_all.
  for (const auto& spec : {ClassifierSpec::logreg(), ClassifierSpec::knn(5), ClassifierSpec::random_forest(20),
                           ClassifierSpec::svm()}) {
    ExperimentConfig c = small_config(StrategyId::kEntropy, spec);
    c.pool_size = 100;
    c.n_steps = 10;
    c.n_rs = 2;
    const ExperimentResult r = run_experiment(c, Benchmarks{0.1, 0.1});
    for (const auto& t : r.rs_trajectories) EXPECT_EQ(t.scores.back(), r.al_trajectory.scores.back()) << spec.label();
  }
}

TEST(Experiment, QbcRuns) {
  ExperimentConfig c = small_config(StrategyId::kQbcKl, ClassifierSpec::logreg());
  c.committee.members = {ClassifierSpec::logreg(), ClassifierSpec::knn(5), ClassifierSpec::qda()};
  c.pool_size = 100;
  c.n_steps = 10;
  const ExperimentResult r = run_experiment(c, Benchmarks{0.1, 0.1});
  EXPECT_EQ(r.al_trajectory.scores.size(), 11u);
  EXPECT_EQ(r.al_trajectory.scores.back(), r.s_all);
}

TEST(Experiment, Deterministic) {
  const ExperimentConfig c = small_config(StrategyId::kEntropy);
  const ExperimentResult a = run_experiment(c);
  const ExperimentResult b = run_experiment(c);
  EXPECT_EQ(a.al_trajectory.scores, b.al_trajectory.scores);
  for (std::size_t j = 0; j < a.rs_trajectories.size(); ++j)
    EXPECT_EQ(a.rs_trajectories[j].scores, b.rs_trajectories[j].scores);
  EXPECT_EQ(a.ber_estimate, b.ber_estimate);
  EXPECT_EQ(a.opt_error_rate, b.opt_error_rate);
}

TEST(Experiment, RejectsBadConfig) {
  ExperimentConfig c = small_config(StrategyId::kEntropy);
  c.pool_size = 205;
  EXPECT_THROW(run_experiment(c), InvalidArgument);
  c = small_config(StrategyId::kEntropy);
  c.n_initial = 5;
  EXPECT_THROW(run_experiment(c), InvalidArgument);
}

TEST(SpaceForAl, Arithmetic) {
  EXPECT_NEAR(space_for_al(0.90, 0.72), 0.20, 1e-15);
  EXPECT_EQ(space_for_al(0.90, 0.90), 0.0);
  EXPECT_NEAR(space_for_al(0.80, 0.90), -0.125, 1e-15);
  EXPECT_THROW(space_for_al(0.0, 0.5), InvalidArgument);
}

TEST(TrajectoryIo, RoundTrip) {
  const ExperimentResult r = run_experiment(small_config(StrategyId::kEntropy), Benchmarks{0.1, 0.1});
  std::stringstream ss;
  write_trajectories(ss, r.al_trajectory, r.rs_trajectories);
  const TrajectorySet back = read_trajectories(ss);
  EXPECT_EQ(back.al.scores, r.al_trajectory.scores);
  EXPECT_EQ(back.al.labelled_counts, r.al_trajectory.labelled_counts);
  EXPECT_EQ(back.al.strategy, StrategyId::kEntropy);
  ASSERT_EQ(back.rs.size(), r.rs_trajectories.size());
  for (std::size_t j = 0; j < back.rs.size(); ++j) {
    EXPECT_EQ(back.rs[j].scores, r.rs_trajectories[j].scores);
    EXPECT_EQ(back.rs[j].rs_instance, j);
  }
  std::stringstream bad("step,labelled_count,strategy,instance,score\n0,10,se,,notanumber\n");
  EXPECT_THROW(read_trajectories(bad), InvalidArgument);
}

}  // namespace
}  // namespace alsim
