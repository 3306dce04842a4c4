#include <charconv>
#include <sstream>

#include "alsim/format.hpp"
#include "alsim/taskgen.hpp"

namespace alsim {

namespace {

void write_vector(std::ostringstream& os, const Eigen::Ref<const Vector>& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) os << ' ' << format_double(v[i]);
}

void write_matrix(std::ostringstream& os, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << ' ' << format_double(m(i, j));
}

std::vector<double> read_numbers(std::istringstream& in, std::size_t count, int line_no) {
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::string tok;
    if (!(in >> tok)) throw InvalidArgument("task file line " + std::to_string(line_no) + ": missing numbers");
    out.push_back(parse_double(tok));
  }
  return out;
}

void expect(std::istringstream& in, std::string_view word, int line_no) {
  std::string tok;
  if (!(in >> tok) || tok != word)
    throw InvalidArgument("task file line " + std::to_string(line_no) + ": expected '" + std::string(word) + "'");
}

}  // namespace

std::string export_task(const Task& task) {
  const TaskSpec& s = task.spec();
  std::ostringstream os;
  os << "# alsim task v1\n";
  os << "# cluster lines: label, weight, base dimension, mean, row-major covariance (unscaled)\n";
  os << "task_id " << s.task_id << '\n';
  os << "class_prior " << format_double(s.class_prior) << '\n';
  os << "separation_scale " << format_double(s.separation_scale) << '\n';
  os << "input_type " << to_string(s.input_type) << '\n';
  os << "input_dim " << s.input_dim << '\n';
  os << "target_ber " << format_double(s.target_ber) << '\n';
  for (const auto& c : s.clusters) {
    os << "cluster label " << c.class_label << " weight " << format_double(c.weight) << " dim " << c.mean.size()
       << " mean";
    write_vector(os, c.mean);
    os << " cov";
    write_matrix(os, c.covariance);
    os << '\n';
  }
  for (std::size_t k = 0; k < task.cluster_count(); ++k) {
    const auto& c = task.scaled_cluster(k);
    os << "# scaled cluster " << k << " label " << c.class_label << " mean";
    write_vector(os, c.mean);
    os << " cov";
    write_matrix(os, c.covariance);
    os << '\n';
  }
  return os.str();
}

TaskSpec parse_task_file(std::string_view text) {
  TaskSpec spec;
  spec.clusters.clear();
  std::istringstream lines{std::string(text)};
  std::string line;
  int line_no = 0;
  bool saw_id = false;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream in(line);
    std::string key;
    in >> key;
    auto value = [&] {
      std::string v;
      if (!(in >> v)) throw InvalidArgument("task file line " + std::to_string(line_no) + ": missing value");
      return v;
    };
    if (key == "task_id") {
      spec.task_id = value();
      saw_id = true;
    } else if (key == "class_prior") {
      spec.class_prior = parse_double(value());
    } else if (key == "separation_scale") {
      spec.separation_scale = parse_double(value());
    } else if (key == "input_type") {
      spec.input_type = parse_input_type(value());
    } else if (key == "input_dim") {
      spec.input_dim = static_cast<int>(parse_double(value()));
    } else if (key == "target_ber") {
      spec.target_ber = parse_double(value());
    } else if (key == "cluster") {
      GaussianCluster c;
      expect(in, "label", line_no);
      c.class_label = static_cast<int>(parse_double(value()));
      expect(in, "weight", line_no);
      c.weight = parse_double(value());
      expect(in, "dim", line_no);
      const auto d = static_cast<std::size_t>(parse_double(value()));
      expect(in, "mean", line_no);
      const auto mean = read_numbers(in, d, line_no);
      expect(in, "cov", line_no);
      const auto cov = read_numbers(in, d * d, line_no);
      c.mean = Vector::Map(mean.data(), static_cast<Eigen::Index>(d));
      c.covariance.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          c.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cov[i * d + j];
      spec.clusters.push_back(std::move(c));
    } else {
      throw InvalidArgument("task file line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (!saw_id) throw InvalidArgument("task file has no task_id");
  return spec;
}

}  // namespace alsim
