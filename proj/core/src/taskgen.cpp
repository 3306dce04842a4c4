#include "alsim/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace alsim {

namespace {

GaussianCluster cluster(int label, double weight, std::initializer_list<double> mean,
                        std::initializer_list<double> cov) {
  GaussianCluster c;
  c.class_label = label;
  c.weight = weight;
  c.mean = Vector::Map(std::data(mean), static_cast<Eigen::Index>(mean.size()));
  const auto d = static_cast<Eigen::Index>(mean.size());
  c.covariance = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      std::data(cov), d, d);
  return c;
}

double log_sum_exp(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

std::string_view to_string(InputType type) noexcept {
  switch (type) {
    case InputType::kContinuous: return "continuous";
    case InputType::kDiscretized: return "discretized";
    case InputType::kMixed: return "mixed";
  }
  return "continuous";
}

InputType parse_input_type(std::string_view text) {
  if (text == "continuous") return InputType::kContinuous;
  if (text == "discretized" || text == "discrete") return InputType::kDiscretized;
  if (text == "mixed") return InputType::kMixed;
  throw InvalidArgument("unknown input type '" + std::string(text) + "'");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(labels[rows[i]]);
  }
  out.column_meta = column_meta;
  return out;
}

std::size_t Dataset::count_label(int label) const noexcept {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

const std::vector<std::string>& preset_ids() {
  static const std::vector<std::string> ids{"sd10", "sd2", "sd7", "sd8"};
  return ids;
}

TaskSpec make_preset(std::string_view task_id) {
  TaskSpec spec;
  spec.task_id = std::string(task_id);
  spec.class_prior = 0.5;
  if (task_id == "sd2") {
    spec.clusters = {
        cluster(0, 1.0, {-1.0, 0.0}, {1.0, 0.0, 0.0, 1.0}),
        cluster(1, 1.0, {1.0, 0.0}, {0.3, 0.0, 0.0, 2.5}),
    };
  } else if (task_id == "sd7") {
    spec.clusters = {
        cluster(0, 0.5, {-2.0, 0.5}, {0.7, 0.0, 0.0, 0.7}),
        cluster(0, 0.5, {0.5, 2.0}, {0.7, 0.0, 0.0, 0.7}),
        cluster(1, 0.5, {-0.5, -1.5}, {0.7, 0.0, 0.0, 0.7}),
        cluster(1, 0.5, {2.0, 0.0}, {1.2, 0.3, 0.3, 0.6}),
    };
  } else if (task_id == "sd8") {
    const double w = 1.0 / 3.0;
    spec.clusters = {
        cluster(0, w, {-3.0, -1.0}, {0.7, 0.0, 0.0, 0.7}),
        cluster(0, w, {0.0, 1.5}, {0.7, 0.0, 0.0, 0.7}),
        cluster(0, w, {3.0, -1.0}, {0.7, 0.0, 0.0, 0.7}),
        cluster(1, w, {-3.0, 1.5}, {0.7, 0.0, 0.0, 0.7}),
        cluster(1, w, {0.0, -1.0}, {0.7, 0.0, 0.0, 0.7}),
        cluster(1, w, {3.0, 1.5}, {0.7, 0.0, 0.0, 0.7}),
    };
  } else if (task_id == "sd10") {
    spec.clusters = {
        cluster(0, 0.5, {-1.5, -1.5}, {1.0, 0.0, 0.0, 1.0}),
        cluster(0, 0.5, {1.5, 1.5}, {1.0, 0.0, 0.0, 1.0}),
        cluster(1, 0.5, {-1.5, 1.5}, {1.0, 0.0, 0.0, 1.0}),
        cluster(1, 0.5, {1.5, -1.5}, {1.0, 0.0, 0.0, 1.0}),
    };
  } else {
    throw InvalidArgument("unknown task id '" + std::string(task_id) + "'");
  }
  return spec;
}

Task::Task(TaskSpec spec) : spec_(std::move(spec)) {
  if (spec_.clusters.empty()) throw InvalidArgument("task '" + spec_.task_id + "' has no clusters");
  if (!(spec_.class_prior > 0.0 && spec_.class_prior < 1.0))
    throw InvalidArgument("class_prior must lie in (0, 1)");
  if (!(spec_.separation_scale >= 0.0) || !std::isfinite(spec_.separation_scale))
    throw InvalidArgument("separation_scale must be finite and non-negative");

  base_dim_ = static_cast<int>(spec_.clusters.front().mean.size());
  if (base_dim_ < 1) throw InvalidArgument("cluster dimension must be positive");
  if (spec_.input_dim < base_dim_)
    throw InvalidArgument("input_dim must be at least the base cluster dimension");

  double weight_sum[2] = {0.0, 0.0};
  for (const auto& c : spec_.clusters) {
    if (c.mean.size() != base_dim_ || c.covariance.rows() != base_dim_ || c.covariance.cols() != base_dim_)
      throw InvalidArgument("inconsistent cluster dimensions in task '" + spec_.task_id + "'");
    if (c.class_label != 0 && c.class_label != 1) throw InvalidArgument("cluster class label must be 0 or 1");
    if (!(c.weight > 0.0)) throw InvalidArgument("cluster weight must be positive");
    if ((c.covariance - c.covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw InvalidArgument("cluster covariance must be symmetric");
    weight_sum[c.class_label] += c.weight;
  }
  for (int label = 0; label < 2; ++label) {
    if (weight_sum[label] == 0.0)
      throw InvalidArgument("task '" + spec_.task_id + "' needs clusters for both classes");
    if (std::abs(weight_sum[label] - 1.0) > 1e-9)
      throw InvalidArgument("cluster weights within a class must sum to 1");
  }

  const double prior[2] = {spec_.class_prior, 1.0 - spec_.class_prior};
  Vector centroid = Vector::Zero(base_dim_);
  Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(base_dim_, base_dim_);
  for (const auto& c : spec_.clusters) {
    centroid += prior[c.class_label] * c.weight * c.mean;
    pooled += prior[c.class_label] * c.weight * c.covariance;
  }

  const double s = spec_.separation_scale;
  const double blend = std::min(s, 1.0);
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  for (const auto& c : spec_.clusters) {
    Component comp;
    comp.cluster = c;
    comp.cluster.mean = centroid + s * (c.mean - centroid);
    comp.cluster.covariance = (1.0 - blend) * pooled + blend * c.covariance;
    Eigen::LLT<Eigen::MatrixXd> llt(comp.cluster.covariance);
    if (llt.info() != Eigen::Success)
      throw InvalidArgument("cluster covariance is not positive definite in task '" + spec_.task_id + "'");
    comp.chol_lower = llt.matrixL();
    const double log_det = 2.0 * comp.chol_lower.diagonal().array().log().sum();
    comp.log_norm = std::log(c.weight) - 0.5 * (base_dim_ * log_2pi + log_det);
    scaled_.push_back(std::move(comp));
  }
}

double Task::log_class_density(int label, std::span<const double> x) const {
  const Eigen::Map<const Vector> xv(x.data(), base_dim_);
  double acc = -INFINITY;
  for (const auto& comp : scaled_) {
    if (comp.cluster.class_label != label) continue;
    const Vector z = comp.chol_lower.triangularView<Eigen::Lower>().solve(xv - comp.cluster.mean);
    acc = log_sum_exp(acc, comp.log_norm - 0.5 * z.squaredNorm());
  }
  return acc;
}

double Task::posterior_class1(std::span<const double> x) const {
  const double l0 = std::log(spec_.class_prior) + log_class_density(0, x);
  const double l1 = std::log(1.0 - spec_.class_prior) + log_class_density(1, x);
  if (l0 == -INFINITY && l1 == -INFINITY) throw Error("zero total density at query point");
  return 1.0 / (1.0 + std::exp(l0 - l1));
}

int Task::bayes_label(std::span<const double> x) const {
  const double l0 = std::log(spec_.class_prior) + log_class_density(0, x);
  const double l1 = std::log(1.0 - spec_.class_prior) + log_class_density(1, x);
  if (l0 == -INFINITY && l1 == -INFINITY) throw Error("zero total density at query point");
  return l1 > l0 ? 1 : 0;
}

void Task::sample_base(std::size_t n, Rng& rng, Matrix& features, std::vector<int>& labels) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  features.resize(static_cast<Eigen::Index>(n), base_dim_);
  labels.resize(n);
  Vector z(base_dim_);
  for (std::size_t i = 0; i < n; ++i) {
    const double u_label = unif(rng);
    const double u_comp = unif(rng);
    for (int j = 0; j < base_dim_; ++j) z[j] = normal(rng);

    const int label = u_label < spec_.class_prior ? 0 : 1;
    const Component* chosen = nullptr;
    double cum = 0.0;
    for (const auto& comp : scaled_) {
      if (comp.cluster.class_label != label) continue;
      chosen = &comp;
      cum += comp.cluster.weight;
      if (u_comp < cum) break;
    }
    labels[i] = label;
    features.row(static_cast<Eigen::Index>(i)) =
        (chosen->cluster.mean + chosen->chol_lower * z).transpose();
  }
}

Task build_task(const TaskSpec& spec) { return Task(spec); }

BayesErrorEstimate estimate_bayes_error(const Task& task, std::size_t n_mc, Seed seed) {
  if (n_mc < 10000) throw InvalidArgument("estimate_bayes_error needs n_mc >= 10^4");
  Rng rng(seed);
  Matrix x;
  std::vector<int> y;
  task.sample_base(n_mc, rng, x, y);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    const auto row = x.row(static_cast<Eigen::Index>(i));
    if (task.bayes_label({row.data(), static_cast<std::size_t>(row.size())}) != y[i]) ++wrong;
  }
  BayesErrorEstimate est;
  est.rate = static_cast<double>(wrong) / static_cast<double>(n_mc);
  // The Bayes rule cannot do worse than chance in expectation; clamp MC excursions.
  est.rate = std::min(est.rate, 0.5);
  est.standard_error = std::sqrt(est.rate * (1.0 - est.rate) / static_cast<double>(n_mc));
  return est;
}

double calibrate_separation(const TaskSpec& spec, double target_ber, double tol, std::size_t n_mc, Seed seed) {
  if (!(target_ber > 0.0 && target_ber < 0.5))
    throw CalibrationError("target BER must lie in (0, 0.5); got " + std::to_string(target_ber));
  if (!(tol >= 0.005)) throw InvalidArgument("calibration tolerance must be >= 0.005");

  auto ber_at = [&](double scale) {
    TaskSpec s = spec;
    s.separation_scale = scale;
    return estimate_bayes_error(Task(std::move(s)), n_mc, seed);
  };

  double lo = 0.0;
  BayesErrorEstimate ber_lo = ber_at(lo);
  double hi = 1.0;
  BayesErrorEstimate ber_hi = ber_at(hi);
  while (ber_hi.rate > target_ber) {
    if (hi >= 64.0)
      throw CalibrationError("target BER " + std::to_string(target_ber) + " unreachable for task '" +
                             spec.task_id + "'");
    lo = hi;
    ber_lo = ber_hi;
    hi *= 2.0;
    ber_hi = ber_at(hi);
  }
  if (ber_lo.rate < target_ber)
    throw CalibrationError("target BER " + std::to_string(target_ber) + " above the task's overlap limit");

  // Stop well inside tol: a fresh-seed re-estimate adds its own MC noise.
  const double inner_tol = 0.1 * tol;
  double best_scale = std::abs(ber_lo.rate - target_ber) < std::abs(ber_hi.rate - target_ber) ? lo : hi;
  double best_err = std::min(std::abs(ber_lo.rate - target_ber), std::abs(ber_hi.rate - target_ber));
  for (int iter = 0; iter < 80 && best_err > inner_tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const BayesErrorEstimate ber_mid = ber_at(mid);
    const double slack = 4.0 * std::max({ber_mid.standard_error, ber_lo.standard_error, ber_hi.standard_error});
    if (ber_mid.rate > ber_lo.rate + slack || ber_mid.rate < ber_hi.rate - slack)
      throw CalibrationError("estimated BER is not monotone in separation_scale for task '" + spec.task_id + "'");
    const double err = std::abs(ber_mid.rate - target_ber);
    if (err < best_err) {
      best_err = err;
      best_scale = mid;
    }
    if (ber_mid.rate > target_ber) {
      lo = mid;
      ber_lo = ber_mid;
    } else {
      hi = mid;
      ber_hi = ber_mid;
    }
  }
  if (best_err > tol)
    throw CalibrationError("calibration for task '" + spec.task_id + "' did not reach tolerance");
  return best_scale;
}

Dataset sample_dataset(const Task& task, std::size_t n, Seed seed) {
  if (n < 20) throw InvalidArgument("sample_dataset needs n >= 20");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int base = task.base_dim();
  const int total = task.input_dim();

  Dataset ds;
  Matrix base_x;
  for (int attempt = 0;; ++attempt) {
    task.sample_base(n, rng, base_x, ds.labels);
    ds.features.resize(static_cast<Eigen::Index>(n), total);
    ds.features.leftCols(base) = base_x;
    for (std::size_t i = 0; i < n; ++i)
      for (int j = base; j < total; ++j) ds.features(static_cast<Eigen::Index>(i), j) = normal(rng);
    if (ds.count_label(0) > 0 && ds.count_label(1) > 0) break;
    if (attempt >= 1000) throw Error("could not draw both classes for task '" + task.spec().task_id + "'");
  }
  ds.column_meta.assign(static_cast<std::size_t>(total), ColumnKind::kContinuous);
  return apply_input_transform(ds, task.spec().input_type);
}

}  // namespace alsim
