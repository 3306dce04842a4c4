#include <algorithm>
#include <cmath>
#include <numeric>

#include "alsim/classifiers.hpp"

namespace alsim {

namespace {

struct PendingNode {
  int index;
  std::vector<std::size_t> rows;
};

double gini_weighted(double n1, double n) {
  // n * gini = n * 2 p (1 - p)
  return n > 0 ? 2.0 * n1 * (n - n1) / n : 0.0;
}

}  // namespace

DecisionTree DecisionTree::grow(const Matrix& x, std::span<const int> y, std::vector<std::size_t> rows, int mtry,
                                Rng& rng) {
  const int p = static_cast<int>(x.cols());
  mtry = std::clamp(mtry, 1, p);
  std::vector<TreeNode> nodes(1);
  std::vector<PendingNode> stack;
  stack.push_back({0, std::move(rows)});

  std::vector<int> features(static_cast<std::size_t>(p));
  std::vector<std::pair<double, int>> column;

  while (!stack.empty()) {
    PendingNode node = std::move(stack.back());
    stack.pop_back();
    const double n = static_cast<double>(node.rows.size());
    double ones = 0.0;
    for (auto r : node.rows) ones += y[r];
    nodes[static_cast<std::size_t>(node.index)].prob1 = ones / n;
    if (ones == 0.0 || ones == n || node.rows.size() < 2) continue;

    std::iota(features.begin(), features.end(), 0);
    for (int f = 0; f < mtry; ++f) {
      std::uniform_int_distribution<int> pick(f, p - 1);
      std::swap(features[static_cast<std::size_t>(f)], features[static_cast<std::size_t>(pick(rng))]);
    }

    double best_impurity = INFINITY;
    int best_feature = -1;
    double best_threshold = 0.0;
    for (int f = 0; f < mtry; ++f) {
      const int feat = features[static_cast<std::size_t>(f)];
      column.clear();
      for (auto r : node.rows) column.emplace_back(x(static_cast<Eigen::Index>(r), feat), y[r]);
      std::sort(column.begin(), column.end());
      double left_ones = 0.0;
      for (std::size_t i = 1; i < column.size(); ++i) {
        left_ones += column[i - 1].second;
        if (column[i].first == column[i - 1].first) continue;
        const double nl = static_cast<double>(i);
        const double impurity = gini_weighted(left_ones, nl) + gini_weighted(ones - left_ones, n - nl);
        if (impurity < best_impurity) {
          best_impurity = impurity;
          best_feature = feat;
          const double a = column[i - 1].first;
          const double b = column[i].first;
          const double mid = 0.5 * (a + b);
          best_threshold = mid < b ? mid : a;
        }
      }
    }
    if (best_feature < 0) continue;  // every sampled feature is constant here

    std::vector<std::size_t> left, right;
    for (auto r : node.rows)
      (x(static_cast<Eigen::Index>(r), best_feature) <= best_threshold ? left : right).push_back(r);

    const int li = static_cast<int>(nodes.size());
    nodes.emplace_back();
    const int ri = static_cast<int>(nodes.size());
    nodes.emplace_back();
    auto& parent = nodes[static_cast<std::size_t>(node.index)];
    parent.feature = best_feature;
    parent.threshold = best_threshold;
    parent.left = li;
    parent.right = ri;
    stack.push_back({ri, std::move(right)});
    stack.push_back({li, std::move(left)});
  }
  return DecisionTree(std::move(nodes));
}

double DecisionTree::predict_prob1(std::span<const double> row) const {
  std::size_t i = 0;
  while (nodes_[i].feature >= 0)
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(nodes_[i].feature)] <= nodes_[i].threshold
                                     ? nodes_[i].left
                                     : nodes_[i].right);
  return nodes_[i].prob1;
}

namespace detail {

ForestParams fit_forest(const Matrix& x, std::span<const int> y, int trees, int mtry, Seed seed) {
  const auto n = static_cast<std::size_t>(x.rows());
  const int p = static_cast<int>(x.cols());
  if (mtry == 0) mtry = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(p)))));
  ForestParams out;
  out.trees.reserve(static_cast<std::size_t>(trees));
  for (int t = 0; t < trees; ++t) {
    Rng rng(derive_seed(seed, SeedRole::kFit, static_cast<std::uint64_t>(t)));
    std::uniform_int_distribution<std::size_t> draw(0, n - 1);
    std::vector<std::size_t> rows(n);
    for (auto& r : rows) r = draw(rng);
    out.trees.push_back(DecisionTree::grow(x, y, std::move(rows), mtry, rng));
  }
  return out;
}

Vector forest_prob1(const ForestParams& p, const Matrix& x) {
  Vector out = Vector::Zero(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    const std::span<const double> r(row.data(), static_cast<std::size_t>(row.size()));
    double acc = 0.0;
    for (const auto& tree : p.trees) acc += tree.predict_prob1(r);
    out[i] = acc / static_cast<double>(p.trees.size());
  }
  return out;
}

}  // namespace detail
}  // namespace alsim
