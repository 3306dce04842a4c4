#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "alsim/evalstat.hpp"
#include "alsim/runner.hpp"

namespace alsim::app {

// (a) AL accuracy over per-step RS boxplots.
std::string trajectory_svg(const TrajectorySet& set, std::string_view title);
// (b) score differences, AL line over RS points.
std::string differences_svg(const TrajectorySet& set, std::string_view title);
// (c) A_i with the GAM curve, the 0.5 reference line and the pointwise band.
std::string comparison_svg(const Evaluation& evaluation, std::string_view title, double level);

struct PlotFiles {
  std::filesystem::path trajectory;
  std::filesystem::path differences;
  std::filesystem::path comparison;
};

PlotFiles render_plots(const TrajectorySet& set, const std::filesystem::path& dir, std::string_view title,
                       double level = 0.8);

}  // namespace alsim::app
