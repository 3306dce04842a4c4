#include "alsim/app/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "alsim/format.hpp"

namespace alsim::app {

namespace fs = std::filesystem;

namespace {

struct CellError {
  std::string stage;
  std::string message;
};

std::string sanitize(std::string text) {
  for (char& ch : text)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ch == ',' ? ';' : ' ';
  return text;
}

std::string error_line(const std::string& id, const CellError& e) {
  return id + "," + e.stage + "," + sanitize(e.message);
}

std::string calibration_key(const std::string& task, double ber) { return task + "@" + format_double(ber); }

// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <class F>
void parallel_for(std::size_t n, std::size_t workers, F fn) {
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    work();
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
}

bool cell_complete(const fs::path& dir) {
  return fs::exists(dir / "result.csv") && fs::exists(dir / "trajectories.csv") && fs::exists(dir / "evaluation.csv");
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw Error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ResultRow make_result_row(const Cell& cell, const ExperimentResult& result, const EvaluationRecord& record) {
  ResultRow row;
  row.experiment_id = cell.id;
  row.task = cell.task;
  row.input_type = std::string(to_string(cell.input_type));
  row.input_dim = cell.input_dim;
  row.classifier = cell.classifier.label();
  row.strategy = std::string(to_string(cell.strategy));
  row.n_initial = cell.n_initial;
  row.ber_target = cell.ber;
  row.ber_est = result.ber_estimate;
  row.opt_error_rate = result.opt_error_rate;
  row.mismatch = classifier_mismatch(result.opt_error_rate, result.ber_estimate);
  row.space_for_al = result.space_for_al;
  row.s_initial = result.s_initial;
  row.s_all = result.s_all;
  row.zone_length = record.zone_length;
  row.gain_flag = record.gain_flag;
  row.aua_al = record.aua_al;
  row.aua_rs_mean = record.aua_rs_mean;
  row.acf1_scores = record.acf1_scores;
  row.acf1_deltas = record.acf1_deltas;
  row.seed = cell.seed;
  row.status = "ok";
  return row;
}

CellArtifacts run_cell(const SweepConfig& config, const Cell& cell, double separation_scale) {
  CellArtifacts a;
  a.result = run_experiment(experiment_config(config, cell, separation_scale));
  a.evaluation = evaluate_experiment(a.result.al_trajectory, a.result.rs_trajectories, config.band_level);
  a.row = make_result_row(cell, a.result, a.evaluation.record);
  return a;
}

void write_cell_outputs(const fs::path& dir, const std::string& id, const CellArtifacts& artifacts) {
  std::ostringstream traj;
  write_trajectories(traj, artifacts.result.al_trajectory, artifacts.result.rs_trajectories);
  write_file_atomic(dir / "trajectories.csv", traj.str());
  write_file_atomic(dir / "evaluation.csv",
                    evaluation_header() + "\n" + serialize_evaluation(id, artifacts.evaluation.record) + "\n");
  // result.csv last: its presence marks the cell complete.
  write_file_atomic(dir / "result.csv", results_header() + "\n" + serialize_result(artifacts.row) + "\n");
}

SweepSummary run_sweep(const SweepConfig& config, const fs::path& out_dir, const SweepOptions& options) {
  const std::vector<Cell> cells = expand_grid(config);
  SweepSummary summary;
  summary.cells = cells.size();
  std::mutex log_mutex;
  auto log = [&](const std::string& line) {
    if (!options.log) return;
    std::lock_guard lock(log_mutex);
    *options.log << line << '\n' << std::flush;
  };
  log("grid: " + std::to_string(config.grid_size() / config.repeats) + " factor combinations x " +
      std::to_string(config.repeats) + " repeats = " + std::to_string(cells.size()) + " experiments");

  fs::create_directories(out_dir / "experiments");
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const fs::path dir = out_dir / "experiments" / cells[i].id;
    if (!options.force && cell_complete(dir)) {
      ++summary.skipped;
      continue;
    }
    pending.push_back(i);
  }
  log("already complete: " + std::to_string(summary.skipped) + ", to run: " + std::to_string(pending.size()));

  // Calibrate each (task, ber) once.
  std::vector<std::pair<std::string, double>> keys;
  for (auto i : pending) {
    const std::pair<std::string, double> k{cells[i].task, cells[i].ber};
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  }
  std::vector<double> scales(keys.size(), 0.0);
  std::vector<std::string> calibration_errors(keys.size());
  parallel_for(keys.size(), config.parallelism, [&](std::size_t k) {
    const auto& [task, ber] = keys[k];
    try {
      scales[k] = calibrate_separation(make_preset(task), ber, config.calibration_tol, config.ber_mc,
                                       derive_seed(config.master_seed, SeedRole::kCalibration,
                                                   stable_hash(calibration_key(task, ber))));
      log("calibrated " + calibration_key(task, ber) + ": separation_scale=" + format_double(scales[k]));
    } catch (const std::exception& e) {
      calibration_errors[k] = e.what();
      log("calibration failed for " + calibration_key(task, ber) + ": " + e.what());
    }
  });
  std::map<std::string, std::size_t> key_index;
  for (std::size_t k = 0; k < keys.size(); ++k) key_index[calibration_key(keys[k].first, keys[k].second)] = k;

  std::mutex journal_mutex;
  std::ofstream journal(out_dir / "results.journal.csv", std::ios::app);
  std::atomic<std::size_t> done{0};

  parallel_for(pending.size(), config.parallelism, [&](std::size_t p) {
    const Cell& cell = cells[pending[p]];
    const fs::path dir = out_dir / "experiments" / cell.id;
    std::error_code ec;
    fs::remove(dir / "error.csv", ec);
    std::optional<CellError> failure;
    const std::size_t k = key_index.at(calibration_key(cell.task, cell.ber));
    if (!calibration_errors[k].empty()) {
      failure = CellError{"calibration", calibration_errors[k]};
    } else {
      try {
        const CellArtifacts a = run_cell(config, cell, scales[k]);
        write_cell_outputs(dir, cell.id, a);
        if (a.row.space_for_al < 0.0) log("note: " + cell.id + " has negative space_for_al (initial fit beats full data)");
        std::lock_guard lock(journal_mutex);
        journal << serialize_result(a.row) << '\n' << std::flush;
      } catch (const Error& e) {
        failure = CellError{"experiment", e.what()};
      } catch (const std::exception& e) {
        failure = CellError{"internal", e.what()};
      }
    }
    if (failure) {
      try {
        write_file_atomic(dir / "error.csv", std::string(kErrorsHeader) + "\n" + error_line(cell.id, *failure) + "\n");
      } catch (const std::exception&) {
      }
    }
    log("[" + std::to_string(++done) + "/" + std::to_string(pending.size()) + "] " + cell.id +
        (failure ? " FAILED (" + failure->stage + "): " + failure->message : " ok"));
  });
  summary.computed = pending.size();

  // Canonical assembly from the per-cell files.
  std::string results = results_header() + "\n";
  std::string errors = std::string(kErrorsHeader) + "\n";
  for (const auto& cell : cells) {
    const fs::path dir = out_dir / "experiments" / cell.id;
    if (fs::exists(dir / "error.csv")) {
      ++summary.failed;
      std::istringstream in(read_file(dir / "error.csv"));
      std::string line;
      std::getline(in, line);
      if (std::getline(in, line)) errors += line + "\n";
      continue;
    }
    if (!fs::exists(dir / "result.csv")) continue;
    std::istringstream in(read_file(dir / "result.csv"));
    std::string line;
    std::getline(in, line);
    if (std::getline(in, line)) results += line + "\n";
  }
  write_file_atomic(out_dir / "results.csv", results);
  write_file_atomic(out_dir / "errors.csv", errors);
  log("done: " + std::to_string(summary.computed) + " run, " + std::to_string(summary.skipped) + " skipped, " +
      std::to_string(summary.failed) + " failed");
  return summary;
}

std::size_t evaluate_sweep(const fs::path& out_dir, double level) {
  const fs::path root = out_dir / "experiments";
  if (!fs::is_directory(root)) throw Error("no experiments directory under '" + out_dir.string() + "'");
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root))
    if (fs::exists(entry.path() / "trajectories.csv")) ids.push_back(entry.path().filename().string());
  std::sort(ids.begin(), ids.end());
  std::string all = evaluation_header() + "\n";
  for (const auto& id : ids) {
    std::istringstream in(read_file(root / id / "trajectories.csv"));
    const TrajectorySet set = read_trajectories(in);
    const Evaluation ev = evaluate_experiment(set.al, set.rs, level);
    const std::string line = serialize_evaluation(id, ev.record);
    write_file_atomic(root / id / "evaluation.csv", evaluation_header() + "\n" + line + "\n");
    all += line + "\n";
  }
  write_file_atomic(out_dir / "evaluations.csv", all);
  return ids.size();
}

}  // namespace alsim::app
