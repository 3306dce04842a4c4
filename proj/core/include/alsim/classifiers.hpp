#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "alsim/common.hpp"
#include "alsim/taskgen.hpp"

namespace alsim {

enum class ClassifierKind { kLogReg, kQda, kKnn, kRandomForest, kSvm };

std::string_view to_string(ClassifierKind kind) noexcept;

class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::kLogReg;
  int k = 5;                // knn
  int trees = 500;          // random_forest
  int mtry = 0;             // random_forest; 0 selects floor(sqrt(p))
  std::vector<double> svm_penalties{0.1, 1.0, 10.0};
  int svm_folds = 5;
  double ridge = 1e-6;      // logreg L2 penalty; qda relative covariance ridge

  static ClassifierSpec logreg() { return {ClassifierKind::kLogReg}; }
  static ClassifierSpec qda() { return {ClassifierKind::kQda}; }
  static ClassifierSpec knn(int k);
  static ClassifierSpec random_forest(int trees = 500, int mtry = 0);
  static ClassifierSpec svm() { return {ClassifierKind::kSvm}; }

  void validate() const;
  // Stable label used in file formats: "logreg", "qda", "knn5", "random_forest", "svm".
  [[nodiscard]] std::string label() const;
};

// Accepts the labels produced by ClassifierSpec::label() plus "rf" and "knn".
ClassifierSpec parse_classifier(std::string_view text);

struct LogRegParams {
  Vector coefficients;  // intercept first
  bool converged = false;
  int iterations = 0;
};

struct QdaParams {
  double log_prior[2] = {0.0, 0.0};
  Vector mean[2];
  Eigen::MatrixXd chol_lower[2];
  double log_det[2] = {0.0, 0.0};
};

struct KnnParams {
  Matrix features;
  std::vector<int> labels;
  int k = 5;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double prob1 = 0.0;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  // Unpruned CART on the given (possibly repeated) rows, Gini splits over
  // mtry randomly chosen features at every node.
  static DecisionTree grow(const Matrix& x, std::span<const int> y, std::vector<std::size_t> rows, int mtry,
                           Rng& rng);

  [[nodiscard]] double predict_prob1(std::span<const double> row) const;
  [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size(); }

 private:
  std::vector<TreeNode> nodes_;
};

struct ForestParams {
  std::vector<DecisionTree> trees;
};

struct SvmParams {
  Vector center;
  Vector scale;
  Vector weights;
  double bias = 0.0;
  double penalty = 1.0;
  double platt_a = -1.0;
  double platt_b = 0.0;

  [[nodiscard]] double decision_value(std::span<const double> row) const;
};

using FittedParams = std::variant<LogRegParams, QdaParams, KnnParams, ForestParams, SvmParams>;

/// A fitted classifier. Immutable after fit.
class Model {
 public:
  Model(ClassifierSpec spec, int training_dim, FittedParams params)
      : spec_(std::move(spec)), training_dim_(training_dim), params_(std::move(params)) {}

  [[nodiscard]] const ClassifierSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] int training_dim() const noexcept { return training_dim_; }
  [[nodiscard]] const FittedParams& params() const noexcept { return params_; }
  // False only for an IRLS fit that hit its iteration cap.
  [[nodiscard]] bool converged() const noexcept;

  // P(y = 1 | x) per row.
  [[nodiscard]] Vector predict_prob1(const Matrix& features) const;

 private:
  ClassifierSpec spec_;
  int training_dim_ = 0;
  FittedParams params_;
};

Model fit(const ClassifierSpec& spec, const Matrix& features, std::span<const int> labels, Seed seed);
Model fit(const ClassifierSpec& spec, const Dataset& train, Seed seed);

// m x 2 matrix of (P(y=0|x), P(y=1|x)).
Matrix predict_proba(const Model& model, const Matrix& features);

// Argmax labels, ties toward class 0.
std::vector<int> predict_labels(const Model& model, const Matrix& features);

double score(const Model& model, const Dataset& test);

double optimum_error_rate(const ClassifierSpec& spec, const Task& task, std::size_t reps, std::size_t n_large,
                          Seed seed);

double classifier_mismatch(double opt_rate, double ber);

namespace detail {
LogRegParams fit_logreg(const Matrix& x, std::span<const int> y, double ridge);
QdaParams fit_qda(const Matrix& x, std::span<const int> y, double ridge);
ForestParams fit_forest(const Matrix& x, std::span<const int> y, int trees, int mtry, Seed seed);
SvmParams fit_svm(const Matrix& x, std::span<const int> y, std::span<const double> penalties, int folds, Seed seed);
Vector logreg_prob1(const LogRegParams& p, const Matrix& x);
Vector qda_prob1(const QdaParams& p, const Matrix& x);
Vector knn_prob1(const KnnParams& p, const Matrix& x);
Vector forest_prob1(const ForestParams& p, const Matrix& x);
Vector svm_prob1(const SvmParams& p, const Matrix& x);
// Platt sigmoid fit: returns (A, B) for P(y=1|f) = 1 / (1 + exp(A f + B)).
std::pair<double, double> fit_platt(std::span<const double> decision, std::span<const int> y);
}  // namespace detail

}  // namespace alsim
