#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "alsim/classifiers.hpp"

namespace alsim {

enum class StrategyId { kEntropy, kQbcVoteEntropy, kQbcKl, kRandom };
enum class Disagreement { kVoteEntropy, kAverageKl };

std::string_view to_string(StrategyId id) noexcept;  // "se", "qbc_ve", "qbc_kl", "random"
StrategyId parse_strategy(std::string_view text);

// Higher value = more informative.
struct PoolScores {
  Vector values;
  StrategyId strategy = StrategyId::kEntropy;
};

struct CommitteeSpec {
  std::vector<ClassifierSpec> members = default_members();
  Disagreement disagreement = Disagreement::kAverageKl;

  // LogReg, kNN (k = 5), kNN (k = 21), linear SVM, random forest.
  static std::vector<ClassifierSpec> default_members();
  void validate() const;
};

// Shannon entropy in nats with 0 ln 0 = 0.
double entropy(std::span<const double> p);

// Strategies only ever see pool features; labels stay with the oracle.
PoolScores rank_pool_se(const Model& model, const Matrix& pool_features);
PoolScores qbc_disagreement(std::span<const Model> committee, const Matrix& pool_features, Disagreement measure);

/// Informative strategies take the top `batch` scores (ties by lower index);
/// kRandom draws a uniform sample without replacement from `seed`.
std::vector<std::size_t> select_batch(const PoolScores& scores, std::size_t batch, Seed seed);

}  // namespace alsim
