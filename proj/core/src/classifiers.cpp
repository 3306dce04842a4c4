#include "alsim/classifiers.hpp"

#include <algorithm>
#include <cmath>

namespace alsim {

std::string_view to_string(ClassifierKind kind) noexcept {
  switch (kind) {
    case ClassifierKind::kLogReg: return "logreg";
    case ClassifierKind::kQda: return "qda";
    case ClassifierKind::kKnn: return "knn";
    case ClassifierKind::kRandomForest: return "random_forest";
    case ClassifierKind::kSvm: return "svm";
  }
  return "logreg";
}

ClassifierSpec ClassifierSpec::knn(int k) {
  ClassifierSpec s{ClassifierKind::kKnn};
  s.k = k;
  return s;
}

ClassifierSpec ClassifierSpec::random_forest(int trees, int mtry) {
  ClassifierSpec s{ClassifierKind::kRandomForest};
  s.trees = trees;
  s.mtry = mtry;
  return s;
}

void ClassifierSpec::validate() const {
  if (kind == ClassifierKind::kKnn && (k < 1 || k % 2 == 0)) throw InvalidArgument("knn k must be odd and >= 1");
  if (kind == ClassifierKind::kRandomForest && trees < 1) throw InvalidArgument("random forest needs >= 1 tree");
  if (kind == ClassifierKind::kRandomForest && mtry < 0) throw InvalidArgument("mtry must be >= 0");
  if (!(ridge > 0.0)) throw InvalidArgument("ridge must be positive");
  if (kind == ClassifierKind::kSvm) {
    if (svm_penalties.empty()) throw InvalidArgument("svm needs at least one penalty value");
    for (double c : svm_penalties)
      if (!(c > 0.0)) throw InvalidArgument("svm penalties must be positive");
    if (svm_folds < 2) throw InvalidArgument("svm needs >= 2 CV folds");
  }
}

std::string ClassifierSpec::label() const {
  if (kind == ClassifierKind::kKnn) return "knn" + std::to_string(k);
  return std::string(to_string(kind));
}

ClassifierSpec parse_classifier(std::string_view text) {
  if (text == "logreg") return ClassifierSpec::logreg();
  if (text == "qda") return ClassifierSpec::qda();
  if (text == "svm") return ClassifierSpec::svm();
  if (text == "random_forest" || text == "rf") return ClassifierSpec::random_forest();
  if (text == "knn") return ClassifierSpec::knn(5);
  if (text.starts_with("knn")) {
    int k = 0;
    for (char c : text.substr(3)) {
      if (c < '0' || c > '9') throw InvalidArgument("unknown classifier '" + std::string(text) + "'");
      k = k * 10 + (c - '0');
    }
    auto spec = ClassifierSpec::knn(k);
    spec.validate();
    return spec;
  }
  throw InvalidArgument("unknown classifier '" + std::string(text) + "'");
}

bool Model::converged() const noexcept {
  if (const auto* lr = std::get_if<LogRegParams>(&params_)) return lr->converged;
  return true;
}

Vector Model::predict_prob1(const Matrix& features) const {
  if (features.cols() != training_dim_)
    throw DimensionMismatch("model trained on " + std::to_string(training_dim_) + " features, got " +
                            std::to_string(features.cols()));
  return std::visit(
      [&](const auto& p) -> Vector {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LogRegParams>) return detail::logreg_prob1(p, features);
        else if constexpr (std::is_same_v<T, QdaParams>) return detail::qda_prob1(p, features);
        else if constexpr (std::is_same_v<T, KnnParams>) return detail::knn_prob1(p, features);
        else if constexpr (std::is_same_v<T, ForestParams>) return detail::forest_prob1(p, features);
        else return detail::svm_prob1(p, features);
      },
      params_);
}

Model fit(const ClassifierSpec& spec, const Matrix& features, std::span<const int> labels, Seed seed) {
  spec.validate();
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw DimensionMismatch("feature rows and label count differ");
  std::size_t counts[2] = {0, 0};
  for (int y : labels) {
    if (y != 0 && y != 1) throw InvalidArgument("labels must be 0 or 1");
    ++counts[y];
  }
  if (counts[0] == 0 || counts[1] == 0)
    throw DegenerateFitError("training set contains a single class (" + spec.label() + ")");
  const bool needs_two = spec.kind == ClassifierKind::kLogReg || spec.kind == ClassifierKind::kQda ||
                         spec.kind == ClassifierKind::kSvm;
  if (needs_two && (counts[0] < 2 || counts[1] < 2))
    throw DegenerateFitError(spec.label() + " needs at least two examples of each class");

  const int p = static_cast<int>(features.cols());
  switch (spec.kind) {
    case ClassifierKind::kLogReg:
      return Model(spec, p, detail::fit_logreg(features, labels, spec.ridge));
    case ClassifierKind::kQda:
      return Model(spec, p, detail::fit_qda(features, labels, spec.ridge));
    case ClassifierKind::kKnn:
      return Model(spec, p, KnnParams{features, std::vector<int>(labels.begin(), labels.end()), spec.k});
    case ClassifierKind::kRandomForest:
      return Model(spec, p, detail::fit_forest(features, labels, spec.trees, spec.mtry, seed));
    case ClassifierKind::kSvm:
      return Model(spec, p, detail::fit_svm(features, labels, spec.svm_penalties, spec.svm_folds, seed));
  }
  throw InvalidArgument("unknown classifier kind");
}

Model fit(const ClassifierSpec& spec, const Dataset& train, Seed seed) {
  return fit(spec, train.features, train.labels, seed);
}

Matrix predict_proba(const Model& model, const Matrix& features) {
  const Vector p1 = model.predict_prob1(features);
  Matrix out(p1.size(), 2);
  out.col(1) = p1;
  out.col(0) = (1.0 - p1.array()).matrix();
  return out;
}

std::vector<int> predict_labels(const Model& model, const Matrix& features) {
  const Vector p1 = model.predict_prob1(features);
  std::vector<int> out(static_cast<std::size_t>(p1.size()));
  for (Eigen::Index i = 0; i < p1.size(); ++i) out[static_cast<std::size_t>(i)] = p1[i] > 1.0 - p1[i] ? 1 : 0;
  return out;
}

double score(const Model& model, const Dataset& test) {
  if (test.size() == 0) throw InvalidArgument("score needs a non-empty test set");
  const auto pred = predict_labels(model, test.features);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == test.labels[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

double optimum_error_rate(const ClassifierSpec& spec, const Task& task, std::size_t reps, std::size_t n_large,
                          Seed seed) {
  if (reps < 5) throw InvalidArgument("optimum_error_rate needs reps >= 5");
  if (n_large < 5000) throw InvalidArgument("optimum_error_rate needs n_large >= 5000");
  double total = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const Dataset train = sample_dataset(task, n_large, derive_seed(seed, SeedRole::kTrainData, r));
    const Dataset test = sample_dataset(task, n_large, derive_seed(seed, SeedRole::kTestData, r));
    const Model model = fit(spec, train, derive_seed(seed, SeedRole::kFit, r));
    total += 1.0 - score(model, test);
  }
  return total / static_cast<double>(reps);
}

double classifier_mismatch(double opt_rate, double ber) { return std::max(opt_rate - ber, 0.0); }

}  // namespace alsim
