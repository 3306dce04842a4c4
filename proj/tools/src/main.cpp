#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "alsim/app/analyze.hpp"
#include "alsim/app/config.hpp"
#include "alsim/app/plots.hpp"
#include "alsim/app/sweep.hpp"
#include "alsim/format.hpp"

namespace fs = std::filesystem;
using namespace alsim;
using namespace alsim::app;

namespace {

constexpr int kExitFailedCells = 1;
constexpr int kExitUsage = 2;

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<Seed> seed;
  std::optional<std::size_t> parallelism;
  bool force = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Sweep config file (JSON)");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--seed", f.seed, "Master seed (overrides the config)");
  cmd->add_option("--parallelism", f.parallelism, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
  cmd->add_flag("--force", f.force, "Recompute or overwrite existing outputs");
}

std::optional<SweepConfig> maybe_config(const CommonFlags& f) {
  if (f.config.empty()) return std::nullopt;
  SweepConfig c = load_config(f.config);
  if (f.seed) c.master_seed = *f.seed;
  if (f.parallelism) c.parallelism = *f.parallelism;
  if (!f.out.empty()) c.output_dir = f.out;
  return c;
}

fs::path out_dir(const CommonFlags& f, const std::optional<SweepConfig>& c) {
  if (!f.out.empty()) return f.out;
  if (c) return c->output_dir;
  throw InvalidArgument("--out DIR is required");
}

void refuse_overwrite(const fs::path& path, bool force) {
  if (!force && fs::exists(path)) throw InvalidArgument("'" + path.string() + "' exists; pass --force to overwrite");
}

// gen-task ------------------------------------------------------------------

struct GenTaskFlags {
  std::vector<std::string> tasks;
  std::vector<double> bers;
  std::string input_type = "continuous";
  int dim = 2;
  std::size_t samples = 0;
};

int gen_task(const CommonFlags& common, const GenTaskFlags& g) {
  const auto config = maybe_config(common);
  const fs::path dir = out_dir(common, config);
  std::vector<std::string> tasks = g.tasks;
  std::vector<double> bers = g.bers;
  if (config) {
    if (tasks.empty()) tasks = config->tasks;
    if (bers.empty()) bers = config->bers;
  }
  if (tasks.empty()) throw InvalidArgument("gen-task needs --task or --config");
  if (bers.empty()) bers = {0.10};
  const Seed master = common.seed.value_or(config ? config->master_seed : 0);
  const double tol = config ? config->calibration_tol : 0.005;
  const std::size_t n_mc = config ? config->ber_mc : 100000;
  for (const auto& id : tasks)
    for (double ber : bers) {
      TaskSpec spec = make_preset(id);
      spec.input_type = parse_input_type(g.input_type);
      spec.input_dim = g.dim;
      spec.target_ber = ber;
      spec.separation_scale = calibrate_separation(
          spec, ber, tol, n_mc, derive_seed(master, SeedRole::kCalibration, stable_hash(id + "@" + format_double(ber))));
      const Task task = build_task(spec);
      const std::string stem = id + "_ber" + format_double(ber);
      const fs::path file = dir / (stem + ".task");
      refuse_overwrite(file, common.force);
      write_file_atomic(file, export_task(task));
      std::cout << file.string() << " separation_scale=" << format_double(spec.separation_scale) << '\n';
      if (g.samples > 0) {
        const Dataset d = sample_dataset(task, g.samples, derive_seed(master, SeedRole::kTrainData));
        std::ostringstream os;
        for (int j = 0; j < d.dim(); ++j) os << 'x' << j << ',';
        os << "label\n";
        for (std::size_t i = 0; i < d.size(); ++i) {
          for (int j = 0; j < d.dim(); ++j) os << format_double(d.features(static_cast<Eigen::Index>(i), j)) << ',';
          os << d.labels[i] << '\n';
        }
        write_file_atomic(dir / (stem + "_samples.csv"), os.str());
      }
    }
  return 0;
}

// run -----------------------------------------------------------------------

struct RunFlags {
  std::string task_file;
  std::string classifier = "qda";
  std::string strategy = "se";
  std::size_t n_initial = 10;
  std::size_t n_rs = 10;
  std::size_t pool_size = 1000;
  std::size_t n_test = 2000;
  double level = 0.8;
};

int run_one(const CommonFlags& common, const RunFlags& r) {
  const auto config = maybe_config(common);
  const fs::path dir = out_dir(common, config);
  refuse_overwrite(dir / "result.csv", common.force);
  if (config) {
    const auto cells = expand_grid(*config);
    if (cells.size() != 1)
      throw InvalidArgument("run expects a single-experiment config (grid has " + std::to_string(cells.size()) +
                            " cells); use sweep");
    const Cell& cell = cells.front();
    const double scale = calibrate_separation(
        make_preset(cell.task), cell.ber, config->calibration_tol, config->ber_mc,
        derive_seed(config->master_seed, SeedRole::kCalibration, stable_hash(cell.task + "@" + format_double(cell.ber))));
    const CellArtifacts a = run_cell(*config, cell, scale);
    write_cell_outputs(dir, cell.id, a);
    std::cout << serialize_result(a.row) << '\n';
    return 0;
  }
  if (r.task_file.empty()) throw InvalidArgument("run needs --config or --task-file");
  ExperimentConfig e;
  e.task_spec = parse_task_file(read_file(r.task_file));
  e.classifier = parse_classifier(r.classifier);
  e.strategy = parse_strategy(r.strategy);
  e.n_initial = r.n_initial;
  e.n_rs = r.n_rs;
  e.pool_size = r.pool_size;
  e.n_test = r.n_test;
  e.master_seed = common.seed.value_or(0);
  const ExperimentResult result = run_experiment(e);
  CellArtifacts a;
  a.result = result;
  a.evaluation = evaluate_experiment(result.al_trajectory, result.rs_trajectories, r.level);
  Cell cell;
  cell.id = fs::path(r.task_file).stem().string() + "_" + e.classifier.label() + "_" + r.strategy;
  cell.task = e.task_spec.task_id;
  cell.input_type = e.task_spec.input_type;
  cell.input_dim = e.task_spec.input_dim;
  cell.classifier = e.classifier;
  cell.n_initial = e.n_initial;
  cell.ber = e.task_spec.target_ber;
  cell.strategy = e.strategy;
  cell.seed = e.master_seed;
  a.row = make_result_row(cell, result, a.evaluation.record);
  write_cell_outputs(dir, cell.id, a);
  std::cout << serialize_result(a.row) << '\n';
  return 0;
}

// sweep ---------------------------------------------------------------------

int sweep(const CommonFlags& common) {
  const auto config = maybe_config(common);
  if (!config) throw InvalidArgument("sweep needs --config");
  SweepOptions options;
  options.force = common.force;
  options.log = &std::cerr;
  const SweepSummary s = run_sweep(*config, config->output_dir, options);
  std::cout << "experiments: " << s.cells << " run: " << s.computed << " skipped: " << s.skipped
            << " failed: " << s.failed << '\n';
  return s.failed == 0 ? 0 : kExitFailedCells;
}

// evaluate ------------------------------------------------------------------

int evaluate(const CommonFlags& common, const std::string& trajectories, std::optional<double> level_flag) {
  const auto config = maybe_config(common);
  const double level = level_flag.value_or(config ? config->band_level : 0.8);
  if (!trajectories.empty() && !fs::is_directory(trajectories)) {
    std::istringstream in(read_file(trajectories));
    const TrajectorySet set = read_trajectories(in);
    const Evaluation ev = evaluate_experiment(set.al, set.rs, level);
    const std::string id = fs::path(trajectories).parent_path().filename().string();
    const std::string text = evaluation_header() + "\n" + serialize_evaluation(id, ev.record) + "\n";
    if (!common.out.empty()) write_file_atomic(fs::path(common.out) / "evaluation.csv", text);
    std::cout << text;
    return 0;
  }
  const fs::path dir = trajectories.empty() ? out_dir(common, config) : fs::path(trajectories);
  const std::size_t n = evaluate_sweep(dir, level);
  std::cout << "evaluated " << n << " experiments -> " << (dir / "evaluations.csv").string() << '\n';
  return 0;
}

// analyze -------------------------------------------------------------------

int analyze(const CommonFlags& common, const std::string& results, const std::string& strategy, bool no_covariates) {
  const auto config = maybe_config(common);
  const fs::path dir = out_dir(common, config);
  const fs::path input = results.empty() ? dir / "results.csv" : fs::path(results);
  AnalyzeOptions options;
  if (!strategy.empty()) options.strategy = strategy;
  options.include_covariates = !no_covariates;
  const Analysis a = run_analysis(input, dir / "analysis", options);
  for (const auto& w : a.design.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << analysis_report(a);
  return 0;
}

// plot ----------------------------------------------------------------------

int plot(const CommonFlags& common, const std::string& trajectories, std::vector<std::string> ids,
         std::optional<double> level_flag) {
  const auto config = maybe_config(common);
  const double level = level_flag.value_or(config ? config->band_level : 0.8);
  const fs::path dir = out_dir(common, config);
  auto draw = [&](const fs::path& traj_file, const fs::path& target, const std::string& title) {
    std::istringstream in(read_file(traj_file));
    const PlotFiles files = render_plots(read_trajectories(in), target, title, level);
    std::cout << files.trajectory.string() << '\n'
              << files.differences.string() << '\n'
              << files.comparison.string() << '\n';
  };
  if (!trajectories.empty()) {
    draw(trajectories, dir, fs::path(trajectories).parent_path().filename().string());
    return 0;
  }
  const fs::path root = dir / "experiments";
  if (ids.empty()) {
    if (!fs::is_directory(root)) throw InvalidArgument("no experiments under '" + dir.string() + "'");
    for (const auto& entry : fs::directory_iterator(root))
      if (fs::exists(entry.path() / "trajectories.csv")) ids.push_back(entry.path().filename().string());
    std::sort(ids.begin(), ids.end());
  }
  for (const auto& id : ids) draw(root / id / "trajectories.csv", root / id, id);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pool-based active learning simulation workbench"};
  app.require_subcommand(1);
  CommonFlags common;

  GenTaskFlags gen;
  auto* gen_cmd = app.add_subcommand("gen-task", "Calibrate preset tasks and export task files");
  add_common(gen_cmd, common);
  gen_cmd->add_option("--task", gen.tasks, "Preset id (sd2, sd7, sd8, sd10); repeatable");
  gen_cmd->add_option("--ber", gen.bers, "Target Bayes error rate; repeatable");
  gen_cmd->add_option("--input-type", gen.input_type, "continuous, discretized or mixed");
  gen_cmd->add_option("--dim", gen.dim, "Input dimension")->check(CLI::Range(2, 1000));
  gen_cmd->add_option("--samples", gen.samples, "Also write this many sampled rows");

  RunFlags run;
  std::optional<double> level;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment");
  add_common(run_cmd, common);
  run_cmd->add_option("--task-file", run.task_file, "Task file from gen-task");
  run_cmd->add_option("--classifier", run.classifier, "logreg, qda, knnK, rf, svm");
  run_cmd->add_option("--strategy", run.strategy, "se, qbc_kl, qbc_ve, random");
  run_cmd->add_option("--n-initial", run.n_initial, "Initially labelled examples");
  run_cmd->add_option("--n-rs", run.n_rs, "Random-selection instances");
  run_cmd->add_option("--pool-size", run.pool_size, "Pool size (multiple of 100)");
  run_cmd->add_option("--n-test", run.n_test, "Test set size");
  run_cmd->add_option("--level", run.level, "Band level");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run the factor grid of a config");
  add_common(sweep_cmd, common);

  std::string trajectories;
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate trajectories (one file or a sweep directory)");
  add_common(eval_cmd, common);
  eval_cmd->add_option("--trajectories", trajectories, "Trajectories CSV of one experiment, or a sweep directory");
  eval_cmd->add_option("--level", level, "Band level");

  std::string results, strategy;
  bool no_covariates = false;
  auto* analyze_cmd = app.add_subcommand("analyze", "Fit the factor GLMs to a results CSV");
  add_common(analyze_cmd, common);
  analyze_cmd->add_option("--results", results, "Results CSV (default <out>/results.csv)");
  analyze_cmd->add_option("--strategy", strategy, "Only rows of this strategy");
  analyze_cmd->add_flag("--no-covariates", no_covariates, "Leave out space_for_al and mismatch");

  std::vector<std::string> ids;
  auto* plot_cmd = app.add_subcommand("plot", "Write SVG plots for experiments");
  add_common(plot_cmd, common);
  plot_cmd->add_option("--trajectories", trajectories, "Single trajectories CSV");
  plot_cmd->add_option("--experiment", ids, "Experiment id; repeatable");
  plot_cmd->add_option("--level", level, "Band level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen_cmd) return gen_task(common, gen);
    if (*run_cmd) return run_one(common, run);
    if (*sweep_cmd) return sweep(common);
    if (*eval_cmd) return evaluate(common, trajectories, level);
    if (*analyze_cmd) return analyze(common, results, strategy, no_covariates);
    if (*plot_cmd) return plot(common, trajectories, ids, level);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailedCells;
  }
  return kExitUsage;
}
