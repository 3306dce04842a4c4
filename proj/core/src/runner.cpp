#include "alsim/runner.hpp"

#include <algorithm>
#include <numeric>

namespace alsim {

void ExperimentConfig::validate() const {
  if (n_initial < 10) throw InvalidArgument("n_initial must be >= 10");
  if (n_steps < 1) throw InvalidArgument("n_steps must be >= 1");
  if (pool_size == 0 || pool_size % n_steps != 0) throw InvalidArgument("pool_size must be a positive multiple of n_steps");
  if (n_rs < 2) throw InvalidArgument("n_rs must be >= 2");
  if (n_test < 20) throw InvalidArgument("n_test must be >= 20");
  classifier.validate();
  if (strategy == StrategyId::kQbcKl || strategy == StrategyId::kQbcVoteEntropy) committee.validate();
}

std::vector<int> LabelOracle::reveal(std::span<const std::size_t> rows) const {
  std::vector<int> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(pool_.labels.at(r));
  return out;
}

InitialSplit split_initial(const Dataset& train, std::size_t n_initial, Seed seed, std::size_t min_per_class) {
  const std::size_t n = train.size();
  if (n_initial >= n) throw InvalidArgument("n_initial must be smaller than the training set");
  Rng rng(seed);
  std::vector<std::size_t> order(n);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t ones = 0;
    for (std::size_t i = 0; i < n_initial; ++i) ones += train.labels[order[i]] == 1 ? 1 : 0;
    if (ones < min_per_class || n_initial - ones < min_per_class) continue;
    std::vector<std::size_t> init(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_initial));
    std::vector<std::size_t> rest(order.begin() + static_cast<std::ptrdiff_t>(n_initial), order.end());
    std::sort(init.begin(), init.end());
    std::sort(rest.begin(), rest.end());
    return {train.subset(init), LabelOracle(train.subset(rest))};
  }
  throw Error("could not draw an initial set containing both classes");
}

namespace {

Dataset labelled_set(const Dataset& initial, const LabelOracle& pool, const std::vector<bool>& revealed,
                     const std::vector<int>& revealed_labels) {
  const auto n_init = static_cast<Eigen::Index>(initial.size());
  Eigen::Index count = n_init;
  for (bool r : revealed) count += r ? 1 : 0;
  Dataset out;
  out.features.resize(count, initial.features.cols());
  out.features.topRows(n_init) = initial.features;
  out.labels = initial.labels;
  out.labels.reserve(static_cast<std::size_t>(count));
  Eigen::Index row = n_init;
  for (std::size_t j = 0; j < revealed.size(); ++j) {
    if (!revealed[j]) continue;
    out.features.row(row++) = pool.features().row(static_cast<Eigen::Index>(j));
    out.labels.push_back(revealed_labels[j]);
  }
  out.column_meta = initial.column_meta;
  return out;
}

}  // namespace

Trajectory run_trajectory(const TrajectoryContext& ctx, StrategyId strategy, Seed strategy_seed,
                          std::optional<std::size_t> rs_instance) {
  const std::size_t pool_n = ctx.pool.size();
  if (ctx.n_steps == 0 || pool_n % ctx.n_steps != 0) throw InvalidArgument("pool size must be a multiple of n_steps");
  const std::size_t batch = pool_n / ctx.n_steps;

  Trajectory traj;
  traj.strategy = strategy;
  traj.rs_instance = rs_instance;
  std::vector<bool> revealed(pool_n, false);
  std::vector<int> revealed_labels(pool_n, -1);

  Model model = fit(ctx.classifier, ctx.initial, ctx.fit_seed);
  traj.scores.push_back(score(model, ctx.test));
  traj.labelled_counts.push_back(ctx.initial.size());

  std::vector<std::size_t> remaining(pool_n);
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});
  for (std::size_t step = 1; step <= ctx.n_steps; ++step) {
    Matrix remaining_features(static_cast<Eigen::Index>(remaining.size()), ctx.pool.features().cols());
    for (std::size_t i = 0; i < remaining.size(); ++i)
      remaining_features.row(static_cast<Eigen::Index>(i)) = ctx.pool.features().row(static_cast<Eigen::Index>(remaining[i]));

    PoolScores scores;
    switch (strategy) {
      case StrategyId::kRandom:
        scores = {Vector::Zero(remaining_features.rows()), StrategyId::kRandom};
        break;
      case StrategyId::kEntropy:
        scores = rank_pool_se(model, remaining_features);
        break;
      case StrategyId::kQbcKl:
      case StrategyId::kQbcVoteEntropy: {
        const Dataset current = labelled_set(ctx.initial, ctx.pool, revealed, revealed_labels);
        std::vector<Model> committee;
        committee.reserve(ctx.committee.members.size());
        for (std::size_t m = 0; m < ctx.committee.members.size(); ++m)
          committee.push_back(fit(ctx.committee.members[m], current, derive_seed(ctx.fit_seed, SeedRole::kCommittee, m)));
        scores = qbc_disagreement(committee, remaining_features,
                                  strategy == StrategyId::kQbcKl ? Disagreement::kAverageKl : Disagreement::kVoteEntropy);
        break;
      }
    }
    const auto picked = select_batch(scores, batch, derive_seed(strategy_seed, SeedRole::kActiveStrategy, step));

    std::vector<std::size_t> rows;
    rows.reserve(picked.size());
    for (auto k : picked) rows.push_back(remaining[k]);
    const auto labels = ctx.pool.reveal(rows);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      revealed[rows[i]] = true;
      revealed_labels[rows[i]] = labels[i];
    }
    std::erase_if(remaining, [&](std::size_t r) { return revealed[r]; });

    const Dataset current = labelled_set(ctx.initial, ctx.pool, revealed, revealed_labels);
    model = fit(ctx.classifier, current, ctx.fit_seed);
    traj.scores.push_back(score(model, ctx.test));
    traj.labelled_counts.push_back(current.size());
  }
  return traj;
}

Benchmarks compute_benchmarks(const ExperimentConfig& config, const Task& task) {
  const Seed master = config.master_seed;
  Benchmarks b;
  b.ber_estimate = estimate_bayes_error(task, config.ber_mc, derive_seed(master, SeedRole::kBayesError)).rate;
  b.opt_error_rate = optimum_error_rate(config.classifier, task, config.opt_reps, config.opt_n_large,
                                        derive_seed(master, SeedRole::kOptimumError));
  return b;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::optional<Benchmarks>& benchmarks) {
  config.validate();
  const Seed master = config.master_seed;
  const Task task = build_task(config.task_spec);
  const Dataset train = sample_dataset(task, config.n_initial + config.pool_size, derive_seed(master, SeedRole::kTrainData));
  const Dataset test = sample_dataset(task, config.n_test, derive_seed(master, SeedRole::kTestData));
  const InitialSplit split = split_initial(train, config.n_initial, derive_seed(master, SeedRole::kSplit));

  const TrajectoryContext ctx{config.classifier, config.committee, split.initial, split.pool, test, config.n_steps,
                              derive_seed(master, SeedRole::kFit)};

  ExperimentResult result;
  result.al_trajectory = run_trajectory(ctx, config.strategy, derive_seed(master, SeedRole::kActiveStrategy));
  result.rs_trajectories.reserve(config.n_rs);
  for (std::size_t j = 0; j < config.n_rs; ++j)
    result.rs_trajectories.push_back(
        run_trajectory(ctx, StrategyId::kRandom, derive_seed(master, SeedRole::kRandomInstance, j), j));

  result.s_initial = result.al_trajectory.scores.front();
  result.s_all = result.al_trajectory.scores.back();
  result.space_for_al = space_for_al(result.s_all, result.s_initial);
  const Benchmarks b = benchmarks ? *benchmarks : compute_benchmarks(config, task);
  result.ber_estimate = b.ber_estimate;
  result.opt_error_rate = b.opt_error_rate;
  return result;
}

double space_for_al(double s_all, double s_initial) {
  if (!(s_all > 0.0)) throw InvalidArgument("space_for_al needs s_all > 0");
  return (s_all - s_initial) / s_all;
}

}  // namespace alsim
