#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "alsim/classifiers.hpp"
#include "alsim/strategies.hpp"
#include "alsim/taskgen.hpp"

namespace alsim {

struct ExperimentConfig {
  TaskSpec task_spec;
  ClassifierSpec classifier;
  StrategyId strategy = StrategyId::kEntropy;
  CommitteeSpec committee;  // used by the qbc strategies only
  std::size_t n_initial = 10;
  std::size_t pool_size = 1000;
  std::size_t n_test = 2000;
  std::size_t n_steps = 100;
  std::size_t n_rs = 10;
  Seed master_seed = 0;

  std::size_t ber_mc = 100000;
  std::size_t opt_reps = 5;
  std::size_t opt_n_large = 5000;

  void validate() const;
  [[nodiscard]] std::size_t batch_size() const noexcept { return pool_size / n_steps; }
};

struct Trajectory {
  std::vector<double> scores;  // accuracy S_0 .. S_n_steps
  std::vector<std::size_t> labelled_counts;
  StrategyId strategy = StrategyId::kRandom;
  std::optional<std::size_t> rs_instance;  // set for random-selection baselines
};

struct Benchmarks {
  double ber_estimate = 0.0;
  double opt_error_rate = 0.0;
};

struct ExperimentResult {
  Trajectory al_trajectory;
  std::vector<Trajectory> rs_trajectories;
  double s_initial = 0.0;
  double s_all = 0.0;
  double space_for_al = 0.0;
  double ber_estimate = 0.0;
  double opt_error_rate = 0.0;
};

// Pool rows whose labels only leave through reveal().
class LabelOracle {
 public:
  explicit LabelOracle(Dataset pool) : pool_(std::move(pool)) {}
  [[nodiscard]] const Matrix& features() const noexcept { return pool_.features; }
  [[nodiscard]] std::size_t size() const noexcept { return pool_.size(); }
  [[nodiscard]] std::vector<int> reveal(std::span<const std::size_t> rows) const;

 private:
  Dataset pool_;
};

struct InitialSplit {
  Dataset initial;
  LabelOracle pool;
};

/// Random partition into initial and pool; resampled (up to 100 times) until the
/// initial set holds at least `min_per_class` examples of each class.
InitialSplit split_initial(const Dataset& train, std::size_t n_initial, Seed seed, std::size_t min_per_class = 2);

// Everything shared by the trajectories of one experiment.
struct TrajectoryContext {
  const ClassifierSpec& classifier;
  const CommitteeSpec& committee;
  const Dataset& initial;
  const LabelOracle& pool;
  const Dataset& test;
  std::size_t n_steps = 100;
  Seed fit_seed = 0;
};

/// Labelled data at every step is the initial set followed by the revealed pool
/// rows in pool order, and every refit uses the same seed; a trajectory that
/// exhausts the pool therefore ends on exactly the full-data fit.
Trajectory run_trajectory(const TrajectoryContext& ctx, StrategyId strategy, Seed strategy_seed,
                          std::optional<std::size_t> rs_instance = std::nullopt);

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::optional<Benchmarks>& benchmarks = std::nullopt);

Benchmarks compute_benchmarks(const ExperimentConfig& config, const Task& task);

double space_for_al(double s_all, double s_initial);

// CSV: step,labelled_count,strategy,instance,score  (instance empty for the AL run)
void write_trajectories(std::ostream& out, const Trajectory& al, std::span<const Trajectory> rs);
struct TrajectorySet {
  Trajectory al;
  std::vector<Trajectory> rs;
};
TrajectorySet read_trajectories(std::istream& in);

}  // namespace alsim
