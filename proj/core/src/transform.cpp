#include <algorithm>
#include <numeric>

#include "alsim/taskgen.hpp"

namespace alsim {

std::vector<double> discretize_column(std::span<const double> column, int bins) {
  if (bins < 1) throw InvalidArgument("bin count must be positive");
  const std::size_t n = column.size();
  std::vector<double> out(column.begin(), column.end());
  if (n == 0) return out;

  std::vector<double> sorted(column.begin(), column.end());
  std::sort(sorted.begin(), sorted.end());

  // Cut b is the value at rank floor(b n / bins); a value's bin is the number of
  // cuts at or below it, so equal values can never straddle a boundary.
  std::vector<double> cuts;
  cuts.reserve(static_cast<std::size_t>(bins - 1));
  for (int b = 1; b < bins; ++b) cuts.push_back(sorted[static_cast<std::size_t>(b) * n / static_cast<std::size_t>(bins)]);

  auto bin_of = [&](double v) {
    return static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
  };

  std::vector<double> lo(static_cast<std::size_t>(bins), INFINITY);
  std::vector<double> hi(static_cast<std::size_t>(bins), -INFINITY);
  for (double v : column) {
    const std::size_t b = bin_of(v);
    lo[b] = std::min(lo[b], v);
    hi[b] = std::max(hi[b], v);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t b = bin_of(column[i]);
    out[i] = lo[b] == hi[b] ? lo[b] : 0.5 * (lo[b] + hi[b]);
  }
  return out;
}

Dataset apply_input_transform(const Dataset& dataset, InputType type, int bins) {
  Dataset out = dataset;
  const auto p = dataset.features.cols();
  if (out.column_meta.size() != static_cast<std::size_t>(p))
    out.column_meta.assign(static_cast<std::size_t>(p), ColumnKind::kContinuous);
  if (type == InputType::kContinuous) return out;

  std::vector<double> col(static_cast<std::size_t>(dataset.features.rows()));
  for (Eigen::Index j = 0; j < p; ++j) {
    if (type == InputType::kMixed && j % 2 == 1) continue;
    for (Eigen::Index i = 0; i < dataset.features.rows(); ++i) col[static_cast<std::size_t>(i)] = dataset.features(i, j);
    const std::vector<double> binned = discretize_column(col, bins);
    for (Eigen::Index i = 0; i < dataset.features.rows(); ++i) out.features(i, j) = binned[static_cast<std::size_t>(i)];
    out.column_meta[static_cast<std::size_t>(j)] = ColumnKind::kDiscretized;
  }
  return out;
}

}  // namespace alsim
