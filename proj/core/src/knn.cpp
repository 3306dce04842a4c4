#include <algorithm>
#include <numeric>

#include "alsim/classifiers.hpp"

namespace alsim::detail {

// Vote fraction among the k nearest training rows (Euclidean); distance ties
// resolve toward the lower training index. Uses all rows when fewer than k exist.
Vector knn_prob1(const KnnParams& p, const Matrix& x) {
  const auto n = static_cast<std::size_t>(p.features.rows());
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(p.k), n);
  Vector out(x.rows());
  Vector dist(static_cast<Eigen::Index>(n));
  std::vector<std::pair<double, std::size_t>> best;
  best.reserve(k + 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    dist = (p.features.rowwise() - x.row(i)).rowwise().squaredNorm();
    best.clear();
    // Bounded insertion keeps the k smallest (distance, index) pairs in order.
    for (std::size_t j = 0; j < n; ++j) {
      const std::pair<double, std::size_t> cand{dist[static_cast<Eigen::Index>(j)], j};
      if (best.size() == k && !(cand < best.back())) continue;
      best.insert(std::upper_bound(best.begin(), best.end(), cand), cand);
      if (best.size() > k) best.pop_back();
    }
    std::size_t ones = 0;
    for (const auto& b : best) ones += p.labels[b.second] == 1 ? 1 : 0;
    out[i] = static_cast<double>(ones) / static_cast<double>(k);
  }
  return out;
}

}  // namespace alsim::detail
