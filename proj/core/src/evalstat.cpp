#include "alsim/evalstat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace alsim {

std::vector<double> score_differences(std::span<const double> scores) {
  if (scores.size() < 2) throw InvalidArgument("score_differences needs at least two scores");
  std::vector<double> out(scores.size() - 1);
  for (std::size_t i = 1; i < scores.size(); ++i) out[i - 1] = scores[i] - scores[i - 1];
  return out;
}

double compare(double x, double y) {
  if (std::isnan(x) || std::isnan(y)) throw InvalidArgument("compare: NaN input");
  if (x > y) return 1.0;
  if (x < y) return 0.0;
  return 0.5;
}

ComparisonSeries comparison_series(std::span<const double> al_deltas,
                                   std::span<const std::vector<double>> rs_deltas_per_instance) {
  if (rs_deltas_per_instance.empty()) throw InvalidArgument("comparison_series needs at least one RS instance");
  for (const auto& rs : rs_deltas_per_instance)
    if (rs.size() != al_deltas.size()) throw InvalidArgument("comparison_series: ragged input");
  const double n_rs = static_cast<double>(rs_deltas_per_instance.size());
  ComparisonSeries out;
  out.c.resize(al_deltas.size());
  out.a.resize(al_deltas.size());
  for (std::size_t i = 0; i < al_deltas.size(); ++i) {
    double total = 0.0;
    for (const auto& rs : rs_deltas_per_instance) {
      const double v = compare(al_deltas[i], rs[i]);
      out.c[i].push_back(v);
      total += v;
    }
    out.a[i] = total / n_rs;
  }
  return out;
}

std::vector<double> acf(std::span<const double> series, std::size_t max_lag) {
  const std::size_t n = series.size();
  if (n <= max_lag + 1) throw InvalidArgument("acf: series too short for the requested lag");
  if (std::all_of(series.begin(), series.end(), [&](double v) { return v == series[0]; }))
    throw InvalidArgument("acf: zero-variance series");
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double denom = 0.0;
  for (double v : series) denom += (v - mean) * (v - mean);
  if (!(denom > 0.0)) throw InvalidArgument("acf: zero-variance series");
  std::vector<double> out(max_lag);
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double num = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) num += (series[t] - mean) * (series[t + k] - mean);
    out[k - 1] = num / denom;
  }
  return out;
}

double aua(std::span<const double> scores) {
  if (scores.size() < 2) throw InvalidArgument("aua needs at least two scores");
  double area = 0.0;
  for (std::size_t i = 1; i < scores.size(); ++i) area += 0.5 * (scores[i] + scores[i - 1]);
  return area / static_cast<double>(scores.size() - 1);
}

std::vector<double> zone_grid(std::size_t points) {
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

std::size_t zone_start(std::span<const double> lower_band) {
  if (!lower_band.empty() && lower_band[0] > 0.5) return 0;
  return 1;
}

std::size_t zone_length(std::span<const double> lower_band) {
  std::size_t start = zone_start(lower_band);
  std::size_t len = 0;
  for (std::size_t i = start; i < lower_band.size() && lower_band[i] > 0.5; ++i) ++len;
  return len;
}

ZoneResult evaluate_zone(const GamFit& fit, double level, std::size_t points) {
  ZoneResult z;
  z.grid = zone_grid(points);
  z.fit_curve = gam_curve(fit, z.grid);
  z.lower_band = gam_lower_band(fit, z.grid, level);
  z.zone_length = zone_length(z.lower_band);
  z.zone_start = z.zone_length > 0 ? zone_start(z.lower_band) : 0;
  z.gain_flag = z.zone_length > 0;
  return z;
}

std::vector<double> difference_fractions(std::size_t n_steps) {
  std::vector<double> t(n_steps);
  for (std::size_t i = 0; i < n_steps; ++i) t[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n_steps);
  return t;
}

Evaluation evaluate_experiment(const Trajectory& al, std::span<const Trajectory> rs, double level,
                               const GamOptions& options) {
  Evaluation ev;
  const auto al_deltas = score_differences(al.scores);
  std::vector<std::vector<double>> rs_deltas;
  rs_deltas.reserve(rs.size());
  double aua_rs = 0.0;
  for (const auto& t : rs) {
    rs_deltas.push_back(score_differences(t.scores));
    aua_rs += aua(t.scores);
  }
  ev.series = comparison_series(al_deltas, rs_deltas);
  ev.gam = fit_gam(ev.series.a, difference_fractions(al_deltas.size()), options);
  ev.zone = evaluate_zone(ev.gam, level);

  auto& r = ev.record;
  r.zone_length = ev.zone.zone_length;
  r.zone_start = ev.zone.zone_start;
  r.gain_flag = ev.zone.gain_flag;
  r.aua_al = aua(al.scores);
  r.aua_rs_mean = aua_rs / static_cast<double>(rs.size());
  r.dispersion = ev.gam.dispersion;
  r.smoothing_parameter = ev.gam.smoothing_parameter;
  r.edf = ev.gam.edf;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    r.acf1_scores = acf(al.scores, 1)[0];
  } catch (const InvalidArgument&) {
    r.acf1_scores = nan;
  }
  try {
    r.acf1_deltas = acf(al_deltas, 1)[0];
  } catch (const InvalidArgument&) {
    r.acf1_deltas = nan;
  }
  return ev;
}

}  // namespace alsim
