#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "alsim/runner.hpp"

namespace alsim::app {

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Factor grid and experiment settings for a sweep. See README for the schema.
struct SweepConfig {
  std::vector<std::string> tasks;
  std::vector<InputType> input_types{InputType::kContinuous};
  std::vector<int> input_dims{2};
  std::vector<ClassifierSpec> classifiers;
  std::vector<std::size_t> n_initials{10};
  std::vector<double> bers{0.10};
  std::vector<StrategyId> strategies;
  std::size_t repeats = 1;
  std::size_t n_rs = 10;
  Seed master_seed = 0;
  std::string output_dir = "out";
  std::size_t parallelism = 1;

  std::size_t pool_size = 1000;
  std::size_t n_test = 2000;
  std::size_t n_steps = 100;
  std::size_t ber_mc = 100000;
  double calibration_tol = 0.005;
  std::size_t opt_reps = 5;
  std::size_t opt_n_large = 5000;
  double band_level = 0.8;
  CommitteeSpec committee;

  [[nodiscard]] std::size_t grid_size() const noexcept;  // cells including repeats
};

// Throws ConfigError with a line/column or field diagnostic.
SweepConfig parse_config(std::string_view text);
SweepConfig load_config(const std::filesystem::path& path);

// One experiment of the grid.
struct Cell {
  std::string id;
  std::string task;
  InputType input_type = InputType::kContinuous;
  int input_dim = 2;
  ClassifierSpec classifier;
  std::size_t n_initial = 10;
  double ber = 0.1;
  StrategyId strategy = StrategyId::kEntropy;
  std::size_t repeat = 0;
  Seed seed = 0;
};

// Canonical grid order: task, input_type, input_dim, classifier, n_initial, ber,
// strategy, repeat. Seeds depend only on task, input_dim, n_initial, ber and the
// repeat, so classifiers, strategies and input types share the same base draws.
std::vector<Cell> expand_grid(const SweepConfig& config);

ExperimentConfig experiment_config(const SweepConfig& config, const Cell& cell, double separation_scale);

}  // namespace alsim::app
