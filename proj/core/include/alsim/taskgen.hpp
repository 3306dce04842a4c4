#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alsim/common.hpp"

namespace alsim {

enum class InputType { kContinuous, kDiscretized, kMixed };
enum class ColumnKind { kContinuous, kDiscretized };

std::string_view to_string(InputType type) noexcept;
InputType parse_input_type(std::string_view text);

class CalibrationError : public Error {
 public:
  using Error::Error;
};

struct GaussianCluster {
  Vector mean;
  Eigen::MatrixXd covariance;
  double weight = 1.0;  // proportion within its class
  int class_label = 0;
};

// A generative binary task. Preset geometries live in 2-D; custom specs may use
// any base dimension (the 1-D analytic check family, for example).
struct TaskSpec {
  std::string task_id;
  std::vector<GaussianCluster> clusters;
  double class_prior = 0.5;  // P(y = 0)
  double separation_scale = 1.0;
  InputType input_type = InputType::kContinuous;
  int input_dim = 2;
  double target_ber = 0.10;
};

struct Dataset {
  Matrix features;
  std::vector<int> labels;
  std::vector<ColumnKind> column_meta;

  [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
  [[nodiscard]] int dim() const noexcept { return static_cast<int>(features.cols()); }
  [[nodiscard]] Dataset subset(std::span<const std::size_t> rows) const;
  [[nodiscard]] std::size_t count_label(int label) const noexcept;
};

/// Fixed 2-D preset geometries, version-frozen:
///  - sd2:  one cluster per class with unequal covariances (single curved boundary)
///  - sd7:  two clusters per class (moderately bent boundary)
///  - sd8:  three clusters per class (zig-zag boundary)
///  - sd10: two interleaved clusters per class (XOR layout)
const std::vector<std::string>& preset_ids();
TaskSpec make_preset(std::string_view task_id);

/// Sampleable generative model. Immutable after construction.
///
/// Scaling: every cluster mean is placed at c + s (m_k - c) where c is the
/// prior-weighted centroid. For s in [0, 1] each covariance is also blended
/// toward the pooled covariance, (1 - s) S + s S_k, so s = 0 makes both class
/// conditionals identical. For s > 1 only the means move.
class Task {
 public:
  explicit Task(TaskSpec spec);

  [[nodiscard]] const TaskSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] int base_dim() const noexcept { return base_dim_; }
  [[nodiscard]] int input_dim() const noexcept { return spec_.input_dim; }
  [[nodiscard]] const GaussianCluster& scaled_cluster(std::size_t k) const { return scaled_[k].cluster; }
  [[nodiscard]] std::size_t cluster_count() const noexcept { return scaled_.size(); }

  // log p(x | y = label) over the base (informative) coordinates.
  [[nodiscard]] double log_class_density(int label, std::span<const double> x) const;
  // Exact P(y = 1 | x) over the base coordinates.
  [[nodiscard]] double posterior_class1(std::span<const double> x) const;
  // Bayes rule; ties go to class 0.
  [[nodiscard]] int bayes_label(std::span<const double> x) const;

  // Draws n base-coordinate points with labels. RNG consumption per draw does
  // not depend on the separation scale, so equal seeds give common random numbers.
  void sample_base(std::size_t n, Rng& rng, Matrix& features, std::vector<int>& labels) const;

 private:
  struct Component {
    GaussianCluster cluster;
    Eigen::MatrixXd chol_lower;
    double log_norm = 0.0;  // log weight - log((2 pi)^{d/2} |S|^{1/2})
  };

  TaskSpec spec_;
  int base_dim_ = 0;
  std::vector<Component> scaled_;
};

Task build_task(const TaskSpec& spec);

struct BayesErrorEstimate {
  double rate = 0.0;
  double standard_error = 0.0;
};

BayesErrorEstimate estimate_bayes_error(const Task& task, std::size_t n_mc, Seed seed);

/// Bisection on separation_scale. Throws CalibrationError when the target is
/// outside (0, 0.5), unreachable, or the estimated BER is not monotone on the bracket.
double calibrate_separation(const TaskSpec& spec, double target_ber, double tol = 0.005,
                            std::size_t n_mc = 100000, Seed seed = 0);

Dataset sample_dataset(const Task& task, std::size_t n, Seed seed);

inline constexpr int kDiscretizationBins = 8;

// Equal-frequency binning; each value becomes the midpoint of its bin's range.
// Tied values always share a bin, which makes the transform idempotent.
std::vector<double> discretize_column(std::span<const double> column, int bins = kDiscretizationBins);

Dataset apply_input_transform(const Dataset& dataset, InputType type, int bins = kDiscretizationBins);

// Self-describing text export of a task (clusters in scaled form, plus the
// originating spec) and its inverse.
std::string export_task(const Task& task);
TaskSpec parse_task_file(std::string_view text);

}  // namespace alsim
