#include <algorithm>
#include <filesystem>
#include <random>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "alsim/app/analyze.hpp"
#include "alsim/app/config.hpp"
#include "alsim/app/plots.hpp"
#include "alsim/app/sweep.hpp"

namespace alsim::app {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("alsim_test_app_" + name);
  fs::remove_all(dir);
  return dir;
}

// Small experiments keep the sweep tests quick.
SweepConfig small(std::string_view grid) {
  SweepConfig c = parse_config(std::string(grid));
  c.pool_size = 200;
  c.n_steps = 20;
  c.n_test = 400;
  c.n_rs = 3;
  c.ber_mc = 20000;
  return c;
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

TEST(Config, MinimalGetsDefaults) {
  const SweepConfig c = parse_config(R"({"tasks": ["sd2"], "classifiers": ["qda"], "strategies": ["se"]})");
  EXPECT_EQ(c.grid_size(), 1u);
  EXPECT_EQ(c.n_rs, 10u);
  EXPECT_EQ(c.repeats, 1u);
  EXPECT_EQ(c.pool_size, 1000u);
  EXPECT_EQ(c.n_test, 2000u);
  EXPECT_EQ(c.input_dims, std::vector<int>{2});
  EXPECT_EQ(c.n_initials, std::vector<std::size_t>{10});
  EXPECT_EQ(c.band_level, 0.8);
  ASSERT_EQ(expand_grid(c).size(), 1u);
  EXPECT_EQ(expand_grid(c)[0].id, "sd2_continuous_d2_qda_n10_ber0.1_se_r0");
}

TEST(Config, UnknownKeyIsNamed) {
  try {
    parse_config(R"({"tasks": ["sd2"], "clasifier": ["qda"], "classifiers": ["qda"], "strategies": ["se"]})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("'clasifier'"), std::string::npos) << e.what();
  }
}

TEST(Config, ParseErrorHasLineAndColumn) {
  try {
    parse_config("{\n  \"tasks\": [\"sd2\"],\n  \"classifiers\": [qda]\n}");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Config, FieldDiagnostics) {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message(R"({"tasks": ["sd2"], "classifiers": ["tree"], "strategies": ["se"]})").find("classifiers[0]"),
            std::string::npos);
  EXPECT_NE(message(R"({"tasks": ["sd9"], "classifiers": ["qda"], "strategies": ["se"]})").find("tasks[0]"),
            std::string::npos);
  EXPECT_NE(message(R"({"tasks": [], "classifiers": ["qda"], "strategies": ["se"]})").find("tasks"),
            std::string::npos);
  EXPECT_NE(message(R"({"tasks": ["sd2"], "classifiers": ["qda"], "strategies": ["se"], "n_rs": 1})").find("n_rs"),
            std::string::npos);
  EXPECT_NE(message(R"({"classifiers": ["qda"], "strategies": ["se"]})").find("tasks"), std::string::npos);
  EXPECT_NE(message(R"({"tasks": ["sd2"], "classifiers": ["qda"], "strategies": ["se"], "bers": [0.6]})").find("bers"),
            std::string::npos);
}

TEST(Grid, SeedsPairClassifiersAndStrategies) {
  const SweepConfig c = parse_config(
      R"({"tasks": ["sd2"], "classifiers": ["qda", "logreg"], "strategies": ["se", "random"], "repeats": 2})");
  const auto cells = expand_grid(c);
  ASSERT_EQ(cells.size(), 8u);
  for (const auto& a : cells)
    for (const auto& b : cells) EXPECT_EQ(a.seed == b.seed, a.repeat == b.repeat) << a.id << " " << b.id;
}

TEST(Sweep, RowsResumeAndDeterminism) {
  const SweepConfig c = small(
      R"({"tasks": ["sd2", "sd7"], "classifiers": ["qda", "logreg"], "strategies": ["se"], "repeats": 3,
          "master_seed": 5})");
  const fs::path a = scratch("sweep_a"), b = scratch("sweep_b");
  const SweepSummary first = run_sweep(c, a);
  EXPECT_EQ(first.cells, 12u);
  EXPECT_EQ(first.computed, 12u);
  EXPECT_EQ(first.failed, 0u);
  const std::string results = read_file(a / "results.csv");
  EXPECT_EQ(count_lines(results), 13u);
  EXPECT_EQ(count_lines(read_file(a / "errors.csv")), 1u);

  const SweepSummary again = run_sweep(c, a);
  EXPECT_EQ(again.computed, 0u);
  EXPECT_EQ(again.skipped, 12u);
  EXPECT_EQ(read_file(a / "results.csv"), results);

  SweepConfig parallel = c;
  parallel.parallelism = 3;
  run_sweep(parallel, b);
  EXPECT_EQ(read_file(b / "results.csv"), results);

  SweepOptions force;
  force.force = true;
  EXPECT_EQ(run_sweep(c, a, force).computed, 12u);
  EXPECT_EQ(read_file(a / "results.csv"), results);
}

TEST(Sweep, FailedCellsAreRecorded) {
  SweepConfig c = small(R"({"tasks": ["sd2"], "classifiers": ["qda"], "strategies": ["se"], "repeats": 2})");
  c.calibration_tol = 0.001;  // below the supported minimum, so calibration fails
  const fs::path dir = scratch("sweep_fail");
  const SweepSummary s = run_sweep(c, dir);
  EXPECT_EQ(s.failed, 2u);
  EXPECT_EQ(count_lines(read_file(dir / "results.csv")), 1u);
  const std::string errors = read_file(dir / "errors.csv");
  EXPECT_EQ(count_lines(errors), 3u);
  EXPECT_NE(errors.find(",calibration,"), std::string::npos);
  // Failed cells are retried on the next run.
  EXPECT_EQ(run_sweep(c, dir).computed, 2u);
}

TEST(Sweep, EvaluateMatchesSweepRecords) {
  const SweepConfig c = small(R"({"tasks": ["sd8"], "classifiers": ["qda"], "strategies": ["se"], "repeats": 2})");
  const fs::path dir = scratch("sweep_eval");
  run_sweep(c, dir);
  const auto id = expand_grid(c)[0].id;
  const std::string before = read_file(dir / "experiments" / id / "evaluation.csv");
  EXPECT_EQ(evaluate_sweep(dir, c.band_level), 2u);
  EXPECT_EQ(read_file(dir / "experiments" / id / "evaluation.csv"), before);
  EXPECT_EQ(count_lines(read_file(dir / "evaluations.csv")), 3u);
}

TEST(Plots, ContractsAndDeterminism) {
  const SweepConfig c = small(R"({"tasks": ["sd7"], "classifiers": ["logreg"], "strategies": ["se"]})");
  const fs::path dir = scratch("plots");
  run_sweep(c, dir);
  const auto id = expand_grid(c)[0].id;
  std::istringstream in(read_file(dir / "experiments" / id / "trajectories.csv"));
  const TrajectorySet set = read_trajectories(in);
  const PlotFiles files = render_plots(set, dir / "p1", id);
  const PlotFiles again = render_plots(set, dir / "p2", id);
  for (auto [x, y] : {std::pair{files.trajectory, again.trajectory}, std::pair{files.differences, again.differences},
                      std::pair{files.comparison, again.comparison}})
    EXPECT_EQ(read_file(x), read_file(y));

  const std::string c_svg = read_file(files.comparison);
  const std::regex dotted("stroke-dasharray");
  EXPECT_EQ(std::distance(std::sregex_iterator(c_svg.begin(), c_svg.end(), dotted), std::sregex_iterator()), 1);
  // The dotted line sits at A = 0.5, i.e. mid-height of the plotting area.
  EXPECT_NE(c_svg.find("y1=\"205.00\" x2=\"700.00\" y2=\"205.00\" stroke=\"black\" stroke-width=\"1\" stroke-dasharray"),
            std::string::npos);

  // Plot (a) embeds n_rs values per step.
  const std::string a_svg = read_file(files.trajectory);
  const std::regex step_line("rs_scores: ([^ ]+) -->");
  std::size_t steps = 0;
  for (auto it = std::sregex_iterator(a_svg.begin(), a_svg.end(), step_line); it != std::sregex_iterator(); ++it) {
    const std::string values = (*it)[1];
    EXPECT_EQ(std::count(values.begin(), values.end(), ';') + 1, static_cast<long>(c.n_rs));
    ++steps;
  }
  EXPECT_EQ(steps, c.n_steps + 1);
  EXPECT_EQ(a_svg.find("<svg"), 0u);
}

TEST(Analyze, CoefficientTable) {
  std::vector<ResultRow> rows;
  Rng rng(3);
  std::poisson_distribution<int> pois(4.0);
  for (int i = 0; i < 80; ++i) {
    ResultRow r;
    r.experiment_id = "e" + std::to_string(i);
    r.task = i % 2 ? "sd2" : "sd7";
    r.input_type = i % 4 < 2 ? "continuous" : "discretized";
    r.classifier = i % 3 ? "qda" : "logreg";
    r.strategy = "se";
    r.space_for_al = 0.1 + 0.003 * i;
    r.mismatch = 0.01 * (i % 5);
    r.zone_length = static_cast<std::size_t>(pois(rng) * (r.input_type == "continuous" ? 3 : 1));
    r.gain_flag = r.zone_length > 0;
    rows.push_back(r);
  }
  rows[5].status = "failed";
  const Analysis a = analyze_results(rows);
  EXPECT_EQ(a.excluded_rows, 1u);
  const std::string csv = coefficients_csv(a);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "family,name,coefficient,std_error,z,p_value");
  EXPECT_NE(csv.find("negbin,input_type=discretized,"), std::string::npos);
  EXPECT_NE(analysis_report(a).find("input_type=discretized"), std::string::npos);
  EXPECT_LT(a.negbin.coefficients[2], 0.0);  // discretized vs continuous reference
}

}  // namespace
}  // namespace alsim::app
