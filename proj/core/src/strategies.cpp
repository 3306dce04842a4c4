#include "alsim/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace alsim {

namespace {
constexpr double kClamp = 1e-12;

double kl_binary(double p1, double q1) {
  const double p = std::clamp(p1, kClamp, 1.0 - kClamp);
  const double q = std::clamp(q1, kClamp, 1.0 - kClamp);
  return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}
}  // namespace

std::string_view to_string(StrategyId id) noexcept {
  switch (id) {
    case StrategyId::kEntropy: return "se";
    case StrategyId::kQbcVoteEntropy: return "qbc_ve";
    case StrategyId::kQbcKl: return "qbc_kl";
    case StrategyId::kRandom: return "random";
  }
  return "se";
}

StrategyId parse_strategy(std::string_view text) {
  if (text == "se") return StrategyId::kEntropy;
  if (text == "qbc_ve") return StrategyId::kQbcVoteEntropy;
  if (text == "qbc_kl" || text == "qbc") return StrategyId::kQbcKl;
  if (text == "random" || text == "rs") return StrategyId::kRandom;
  throw InvalidArgument("unknown strategy '" + std::string(text) + "'");
}

std::vector<ClassifierSpec> CommitteeSpec::default_members() {
  return {ClassifierSpec::logreg(), ClassifierSpec::knn(5), ClassifierSpec::knn(21), ClassifierSpec::svm(),
          ClassifierSpec::random_forest()};
}

void CommitteeSpec::validate() const {
  if (members.size() < 2) throw InvalidArgument("a committee needs at least two members");
  for (const auto& m : members) m.validate();
}

double entropy(std::span<const double> p) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("probability entries must be finite and >= 0");
    sum += v;
  }
  if (p.empty() || std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("probability vector must sum to 1");
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

PoolScores rank_pool_se(const Model& model, const Matrix& pool_features) {
  if (pool_features.rows() == 0) throw InvalidArgument("pool is empty");
  const Matrix proba = predict_proba(model, pool_features);
  PoolScores out{Vector(proba.rows()), StrategyId::kEntropy};
  for (Eigen::Index i = 0; i < proba.rows(); ++i) {
    const double row[2] = {proba(i, 0), proba(i, 1)};
    out.values[i] = entropy(row);
  }
  return out;
}

PoolScores qbc_disagreement(std::span<const Model> committee, const Matrix& pool_features, Disagreement measure) {
  if (committee.size() < 2) throw InvalidArgument("a committee needs at least two members");
  if (pool_features.rows() == 0) throw InvalidArgument("pool is empty");
  const Eigen::Index n = pool_features.rows();
  const double m = static_cast<double>(committee.size());
  std::vector<Vector> member_p1;
  member_p1.reserve(committee.size());
  for (const auto& model : committee) member_p1.push_back(model.predict_prob1(pool_features));

  PoolScores out{Vector(n), measure == Disagreement::kAverageKl ? StrategyId::kQbcKl : StrategyId::kQbcVoteEntropy};
  for (Eigen::Index i = 0; i < n; ++i) {
    if (measure == Disagreement::kVoteEntropy) {
      double votes1 = 0.0;
      for (const auto& p : member_p1) votes1 += p[i] > 1.0 - p[i] ? 1.0 : 0.0;
      const double dist[2] = {1.0 - votes1 / m, votes1 / m};
      out.values[i] = entropy(dist);
    } else {
      double consensus = 0.0;
      for (const auto& p : member_p1) consensus += p[i];
      consensus /= m;
      double kl = 0.0;
      for (const auto& p : member_p1) kl += kl_binary(p[i], consensus);
      out.values[i] = std::max(kl / m, 0.0);
    }
  }
  return out;
}

std::vector<std::size_t> select_batch(const PoolScores& scores, std::size_t batch, Seed seed) {
  const auto n = static_cast<std::size_t>(scores.values.size());
  if (batch > n) throw InvalidArgument("batch larger than pool");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (scores.strategy == StrategyId::kRandom) {
    Rng rng(seed);
    for (std::size_t i = 0; i < batch; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(batch);
    return idx;
  }
  for (Eigen::Index i = 0; i < scores.values.size(); ++i)
    if (!std::isfinite(scores.values[i])) throw InvalidArgument("pool scores must be finite");
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(batch), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double sa = scores.values[static_cast<Eigen::Index>(a)];
                      const double sb = scores.values[static_cast<Eigen::Index>(b)];
                      return sa != sb ? sa > sb : a < b;
                    });
  idx.resize(batch);
  return idx;
}

}  // namespace alsim
