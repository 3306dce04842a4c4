#include "alsim/app/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "alsim/app/sweep.hpp"
#include "alsim/format.hpp"

namespace alsim::app {

namespace {

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '-':
        // Keep "--" out of comments and text alike.
        out += (!out.empty() && out.back() == '-') ? " -" : "-";
        break;
      default: out += c;
    }
  }
  return out;
}

// Linear-interpolation quantile of a sorted sample.
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

class Canvas {
 public:
  Canvas(double x0, double x1, double y0, double y1) : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
    if (!(x1_ > x0_)) x1_ = x0_ + 1;
    if (!(y1_ > y0_)) {
      y0_ -= 0.5;
      y1_ += 0.5;
    }
  }

  double x(double v) const { return kLeft + (v - x0_) / (x1_ - x0_) * (kWidth - kLeft - kRight); }
  double y(double v) const { return kHeight - kBottom - (v - y0_) / (y1_ - y0_) * (kHeight - kTop - kBottom); }

  void comment(const std::string& text) { body_ << "<!-- " << escape(text) << " -->\n"; }
  void raw(const std::string& element) { body_ << element << '\n'; }

  void line(double xa, double ya, double xb, double yb, const std::string& style) {
    body_ << "<line x1=\"" << num(x(xa)) << "\" y1=\"" << num(y(ya)) << "\" x2=\"" << num(x(xb)) << "\" y2=\""
          << num(y(yb)) << "\" " << style << "/>\n";
  }

  void polyline(const std::vector<double>& xs, const std::vector<double>& ys, const std::string& style) {
    body_ << "<polyline fill=\"none\" " << style << " points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) body_ << (i ? " " : "") << num(x(xs[i])) << ',' << num(y(ys[i]));
    body_ << "\"/>\n";
  }

  void polygon(const std::vector<double>& xs, const std::vector<double>& ys, const std::string& style) {
    body_ << "<polygon " << style << " points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) body_ << (i ? " " : "") << num(x(xs[i])) << ',' << num(y(ys[i]));
    body_ << "\"/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& style) {
    body_ << "<circle cx=\"" << num(x(cx)) << "\" cy=\"" << num(y(cy)) << "\" r=\"" << num(r) << "\" " << style
          << "/>\n";
  }

  void rect(double xa, double ya, double xb, double yb, const std::string& style) {
    const double left = std::min(x(xa), x(xb)), top = std::min(y(ya), y(yb));
    body_ << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(std::abs(x(xb) - x(xa)))
          << "\" height=\"" << num(std::abs(y(yb) - y(ya))) << "\" " << style << "/>\n";
  }

  std::string render(std::string_view title, std::string_view xlabel, std::string_view ylabel) const {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
       << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight) << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
       << "</text>\n";
    // Axes and ticks.
    const double bx = kLeft, by = kHeight - kBottom;
    os << "<g stroke=\"black\" stroke-width=\"1\">\n";
    os << "<line x1=\"" << num(bx) << "\" y1=\"" << num(by) << "\" x2=\"" << num(kWidth - kRight) << "\" y2=\""
       << num(by) << "\"/>\n";
    os << "<line x1=\"" << num(bx) << "\" y1=\"" << num(by) << "\" x2=\"" << num(bx) << "\" y2=\"" << num(kTop)
       << "\"/>\n";
    os << "</g>\n<g text-anchor=\"middle\">\n";
    for (double v : nice_ticks(x0_, x1_))
      os << "<text x=\"" << num(x(v)) << "\" y=\"" << num(by + 16) << "\">" << tick(v) << "</text>\n";
    os << "</g>\n<g text-anchor=\"end\">\n";
    for (double v : nice_ticks(y0_, y1_))
      os << "<text x=\"" << num(bx - 6) << "\" y=\"" << num(y(v) + 4) << "\">" << tick(v) << "</text>\n";
    os << "</g>\n";
    os << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - 10)
       << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
    os << "<text x=\"16\" y=\"" << num((kTop + kHeight - kBottom) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << num((kTop + kHeight - kBottom) / 2) << ")\">" << escape(ylabel) << "</text>\n";
    os << body_.str();
    os << "</svg>\n";
    return os.str();
  }

 private:
  // Multiples of a 1-2-5 step inside [lo, hi], about five of them.
  static std::vector<double> nice_ticks(double lo, double hi) {
    const double raw = (hi - lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double frac = raw / mag;
    const double step = (frac <= 1.5 ? 1.0 : frac <= 3.0 ? 2.0 : frac <= 7.0 ? 5.0 : 10.0) * mag;
    std::vector<double> out;
    for (double k = std::ceil(lo / step - 1e-9); k * step <= hi + 1e-9 * step; k += 1.0) out.push_back(k * step);
    return out;
  }

  static std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
  }

  double x0_, x1_, y0_, y1_;
  std::ostringstream body_;
};

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + format_double(v[i]);
  return out;
}

std::pair<double, double> padded_range(const std::vector<const std::vector<double>*>& series, double pad) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto* s : series)
    for (double v : *s) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  return {lo - pad * (hi - lo), hi + pad * (hi - lo)};
}

std::vector<double> at_step(const std::vector<Trajectory>& rs, std::size_t i, bool deltas) {
  std::vector<double> v;
  v.reserve(rs.size());
  for (const auto& t : rs) v.push_back(deltas ? t.scores[i + 1] - t.scores[i] : t.scores[i]);
  std::sort(v.begin(), v.end());
  return v;
}

constexpr const char* kAlStyle = "stroke=\"#c0392b\" stroke-width=\"2\"";
constexpr const char* kRsStyle = "stroke=\"#34495e\" stroke-width=\"1\"";

}  // namespace

std::string trajectory_svg(const TrajectorySet& set, std::string_view title) {
  const auto& al = set.al;
  const std::size_t n = al.scores.size();
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = static_cast<double>(al.labelled_counts[i]);
  std::vector<const std::vector<double>*> all{&al.scores};
  for (const auto& t : set.rs) all.push_back(&t.scores);
  const auto [lo, hi] = padded_range(all, 0.03);
  Canvas c(xs.front(), xs.back(), lo, hi);
  c.comment("plot: trajectory; x: labelled_count; y: accuracy; rs_instances: " + std::to_string(set.rs.size()));
  c.comment("data al_scores: " + join(al.scores));

  // Boxes span the quartiles, whiskers the full RS range at each step.
  const double half = n > 1 ? 0.3 * (xs[1] - xs[0]) : 1.0;
  c.raw("<g fill=\"#d6eaf8\" " + std::string(kRsStyle) + ">");
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = at_step(set.rs, i, false);
    c.comment("data step " + std::to_string(i) + " rs_scores: " + join(v));
    c.line(xs[i], v.front(), xs[i], v.back(), "");
    c.rect(xs[i] - half, quantile(v, 0.25), xs[i] + half, quantile(v, 0.75), "");
    c.line(xs[i] - half, quantile(v, 0.5), xs[i] + half, quantile(v, 0.5), "");
  }
  c.raw("</g>");
  c.polyline(xs, al.scores, kAlStyle);
  // Legend in the lower right, below the learning curves.
  const std::string legend_x = num(kWidth - kRight - 110);
  c.raw("<text x=\"" + legend_x + "\" y=\"" + num(kHeight - kBottom - 30) + "\" font-size=\"12\" fill=\"#c0392b\">AL (" +
        std::string(to_string(al.strategy)) + ")</text>");
  c.raw("<text x=\"" + legend_x + "\" y=\"" + num(kHeight - kBottom - 12) +
        "\" font-size=\"12\" fill=\"#34495e\">RS boxplots</text>");
  return c.render(title, "labelled examples", "accuracy");
}

std::string differences_svg(const TrajectorySet& set, std::string_view title) {
  const auto& al = set.al;
  const auto al_d = score_differences(al.scores);
  const std::size_t n = al_d.size();
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = static_cast<double>(i + 1);
  std::vector<std::vector<double>> rs_d;
  for (const auto& t : set.rs) rs_d.push_back(score_differences(t.scores));
  std::vector<const std::vector<double>*> all{&al_d};
  for (const auto& d : rs_d) all.push_back(&d);
  const auto [lo, hi] = padded_range(all, 0.05);
  Canvas c(0.0, static_cast<double>(n + 1), lo, hi);
  c.comment("plot: score_differences; x: step; y: delta accuracy; rs_instances: " + std::to_string(set.rs.size()));
  c.comment("data al_deltas: " + join(al_d));
  c.line(0.0, 0.0, static_cast<double>(n + 1), 0.0, "stroke=\"#999999\" stroke-width=\"1\"");
  c.raw("<g fill=\"#34495e\" fill-opacity=\"0.5\">");
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = at_step(set.rs, i, true);
    c.comment("data step " + std::to_string(i + 1) + " rs_deltas: " + join(v));
    for (double d : v) c.circle(xs[i], d, 1.8, "");
  }
  c.raw("</g>");
  c.polyline(xs, al_d, kAlStyle);
  return c.render(title, "step", "score difference");
}

std::string comparison_svg(const Evaluation& ev, std::string_view title, double level) {
  const auto& a = ev.series.a;
  const auto t = difference_fractions(a.size());
  const auto& z = ev.zone;
  const auto upper = gam_upper_band(ev.gam, z.grid, level);
  Canvas c(0.0, 1.0, 0.0, 1.0);
  c.comment("plot: comparison; x: budget fraction; y: A_i; band_level: " + format_double(level));
  c.comment("data a: " + join(a));
  c.comment("data gam_fit: " + join(z.fit_curve));
  c.comment("data lower_band: " + join(z.lower_band));
  c.comment("zone_length: " + std::to_string(z.zone_length) + "; zone_start: " + std::to_string(z.zone_start) +
            "; smoothing_parameter: " + format_double(ev.gam.smoothing_parameter) +
            "; dispersion: " + format_double(ev.gam.dispersion));

  if (z.zone_length > 0) {
    const double x0 = z.grid[z.zone_start];
    const double x1 = z.grid[std::min(z.zone_start + z.zone_length - 1, z.grid.size() - 1)];
    c.rect(x0, 0.0, x1, 1.0, "fill=\"#fdebd0\" stroke=\"none\"");
  }
  std::vector<double> bx(z.grid), by(z.lower_band);
  for (std::size_t i = z.grid.size(); i-- > 0;) {
    bx.push_back(z.grid[i]);
    by.push_back(upper[i]);
  }
  c.polygon(bx, by, "fill=\"#aed6f1\" fill-opacity=\"0.6\" stroke=\"none\"");
  c.line(0.0, 0.5, 1.0, 0.5, "stroke=\"black\" stroke-width=\"1\" stroke-dasharray=\"2,3\"");
  c.raw("<g fill=\"#34495e\">");
  for (std::size_t i = 0; i < a.size(); ++i) c.circle(t[i], a[i], 2.2, "");
  c.raw("</g>");
  c.polyline(z.grid, z.fit_curve, "stroke=\"#1f618d\" stroke-width=\"2\"");
  c.polyline(z.grid, z.lower_band, "stroke=\"#1f618d\" stroke-width=\"1\"");
  return c.render(title, "budget fraction", "averaged comparison value");
}

PlotFiles render_plots(const TrajectorySet& set, const std::filesystem::path& dir, std::string_view title,
                       double level) {
  PlotFiles files{dir / "plot_a_trajectory.svg", dir / "plot_b_differences.svg", dir / "plot_c_comparison.svg"};
  const Evaluation ev = evaluate_experiment(set.al, set.rs, level);
  write_file_atomic(files.trajectory, trajectory_svg(set, title));
  write_file_atomic(files.differences, differences_svg(set, title));
  write_file_atomic(files.comparison, comparison_svg(ev, title, level));
  return files;
}

}  // namespace alsim::app
