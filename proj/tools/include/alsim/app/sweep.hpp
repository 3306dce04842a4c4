#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "alsim/app/config.hpp"
#include "alsim/evalstat.hpp"
#include "alsim/results.hpp"

namespace alsim::app {

struct SweepOptions {
  bool force = false;
  std::ostream* log = nullptr;  // progress lines; null for silence
};

struct SweepSummary {
  std::size_t cells = 0;
  std::size_t computed = 0;
  std::size_t skipped = 0;  // already complete on disk
  std::size_t failed = 0;
};

// Runs every cell of the grid with up to config.parallelism workers and writes
//   <out>/experiments/<id>/{trajectories.csv, evaluation.csv, result.csv}
//   <out>/results.csv, <out>/errors.csv  (canonical grid order)
SweepSummary run_sweep(const SweepConfig& config, const std::filesystem::path& out_dir,
                       const SweepOptions& options = {});

struct CellArtifacts {
  ExperimentResult result;
  Evaluation evaluation;
  ResultRow row;
};

CellArtifacts run_cell(const SweepConfig& config, const Cell& cell, double separation_scale);
ResultRow make_result_row(const Cell& cell, const ExperimentResult& result, const EvaluationRecord& record);
void write_cell_outputs(const std::filesystem::path& dir, const std::string& id, const CellArtifacts& artifacts);

// Re-evaluates every experiment directory under <out>/experiments and writes
// <out>/evaluations.csv. Returns the number of experiments evaluated.
std::size_t evaluate_sweep(const std::filesystem::path& out_dir, double level);

// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

inline constexpr const char* kErrorsHeader = "experiment_id,stage,message";

}  // namespace alsim::app
