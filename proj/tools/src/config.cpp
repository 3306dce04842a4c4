#include "alsim/app/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "alsim/format.hpp"

namespace alsim::app {

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "tasks",     "input_types", "input_dims", "classifiers", "n_initials",      "bers",
      "strategies", "repeats",    "n_rs",       "master_seed", "output_dir",      "parallelism",
      "pool_size", "n_test",      "n_steps",    "ber_mc",      "calibration_tol", "opt_reps",
      "opt_n_large", "band_level", "committee"};
  return keys;
}

[[noreturn]] void field_error(const std::string& key, const std::string& what) {
  throw ConfigError("config field '" + key + "': " + what);
}

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

std::uint64_t get_count(const json& j, const std::string& key, std::uint64_t min_value) {
  if (!j.is_number_unsigned()) field_error(key, "expected a non-negative integer");
  const auto v = j.get<std::uint64_t>();
  if (v < min_value) field_error(key, "must be >= " + std::to_string(min_value));
  return v;
}

double get_real(const json& j, const std::string& key) {
  if (!j.is_number()) field_error(key, "expected a number");
  return j.get<double>();
}

template <class T, class F>
std::vector<T> get_list(const json& j, const std::string& key, F convert) {
  if (!j.is_array()) field_error(key, "expected a list");
  if (j.empty()) field_error(key, "list must not be empty");
  std::vector<T> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    try {
      out.push_back(convert(j[i]));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      field_error(key + "[" + std::to_string(i) + "]", e.what());
    }
  }
  return out;
}

std::string as_string(const json& j) {
  if (!j.is_string()) throw InvalidArgument("expected a string");
  return j.get<std::string>();
}

}  // namespace

std::size_t SweepConfig::grid_size() const noexcept {
  return tasks.size() * input_types.size() * input_dims.size() * classifiers.size() * n_initials.size() *
         bers.size() * strategies.size() * repeats;
}

SweepConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    if (const auto pos = msg.find("parse error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ConfigError("config parse error at " + line_column(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + msg);
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  for (const auto& item : doc.items())
    if (!known_keys().contains(item.key())) throw ConfigError("unknown config key '" + item.key() + "'");
  for (const char* required : {"tasks", "classifiers", "strategies"})
    if (!doc.contains(required)) throw ConfigError(std::string("missing required config key '") + required + "'");

  SweepConfig c;
  c.tasks = get_list<std::string>(doc["tasks"], "tasks", [](const json& j) {
    auto id = as_string(j);
    make_preset(id);
    return id;
  });
  c.classifiers = get_list<ClassifierSpec>(doc["classifiers"], "classifiers",
                                           [](const json& j) { return parse_classifier(as_string(j)); });
  c.strategies = get_list<StrategyId>(doc["strategies"], "strategies",
                                      [](const json& j) { return parse_strategy(as_string(j)); });
  if (doc.contains("input_types"))
    c.input_types = get_list<InputType>(doc["input_types"], "input_types",
                                        [](const json& j) { return parse_input_type(as_string(j)); });
  if (doc.contains("input_dims"))
    c.input_dims = get_list<int>(doc["input_dims"], "input_dims", [](const json& j) {
      if (!j.is_number_unsigned() || j.get<std::uint64_t>() < 2 || j.get<std::uint64_t>() > 1000)
        throw InvalidArgument("expected an integer in [2, 1000]");
      return j.get<int>();
    });
  if (doc.contains("n_initials"))
    c.n_initials = get_list<std::size_t>(doc["n_initials"], "n_initials", [](const json& j) {
      if (!j.is_number_unsigned() || j.get<std::uint64_t>() < 10) throw InvalidArgument("expected an integer >= 10");
      return j.get<std::size_t>();
    });
  if (doc.contains("bers"))
    c.bers = get_list<double>(doc["bers"], "bers", [](const json& j) {
      if (!j.is_number() || !(j.get<double>() > 0.0 && j.get<double>() < 0.5))
        throw InvalidArgument("expected a number in (0, 0.5)");
      return j.get<double>();
    });
  if (doc.contains("committee"))
    c.committee.members = get_list<ClassifierSpec>(doc["committee"], "committee",
                                                   [](const json& j) { return parse_classifier(as_string(j)); });

  auto count = [&](const char* key, std::size_t& target, std::uint64_t min_value) {
    if (doc.contains(key)) target = static_cast<std::size_t>(get_count(doc[key], key, min_value));
  };
  count("repeats", c.repeats, 1);
  count("n_rs", c.n_rs, 2);
  count("parallelism", c.parallelism, 1);
  count("pool_size", c.pool_size, 1);
  count("n_test", c.n_test, 20);
  count("n_steps", c.n_steps, 1);
  count("ber_mc", c.ber_mc, 10000);
  count("opt_reps", c.opt_reps, 5);
  count("opt_n_large", c.opt_n_large, 5000);
  if (doc.contains("master_seed")) c.master_seed = get_count(doc["master_seed"], "master_seed", 0);
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) field_error("output_dir", "expected a string");
    c.output_dir = doc["output_dir"].get<std::string>();
  }
  if (doc.contains("calibration_tol")) {
    c.calibration_tol = get_real(doc["calibration_tol"], "calibration_tol");
    if (!(c.calibration_tol > 0.0)) field_error("calibration_tol", "must be positive");
  }
  if (doc.contains("band_level")) {
    c.band_level = get_real(doc["band_level"], "band_level");
    if (!(c.band_level > 0.0 && c.band_level < 1.0)) field_error("band_level", "must lie in (0, 1)");
  }
  if (c.pool_size % c.n_steps != 0) field_error("pool_size", "must be a multiple of n_steps");
  try {
    c.committee.validate();
  } catch (const Error& e) {
    field_error("committee", e.what());
  }
  return c;
}

SweepConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::vector<Cell> expand_grid(const SweepConfig& config) {
  std::vector<Cell> cells;
  cells.reserve(config.grid_size());
  for (const auto& task : config.tasks)
    for (auto type : config.input_types)
      for (int dim : config.input_dims)
        for (const auto& classifier : config.classifiers)
          for (auto n_initial : config.n_initials)
            for (double ber : config.bers)
              for (auto strategy : config.strategies)
                for (std::size_t r = 0; r < config.repeats; ++r) {
                  Cell cell;
                  cell.task = task;
                  cell.input_type = type;
                  cell.input_dim = dim;
                  cell.classifier = classifier;
                  cell.n_initial = n_initial;
                  cell.ber = ber;
                  cell.strategy = strategy;
                  cell.repeat = r;
                  const std::string data_key = task + "_d" + std::to_string(dim) + "_n" + std::to_string(n_initial) + "_ber" +
                                               format_double(ber) + "_r" + std::to_string(r);
                  cell.id = task + "_" + std::string(to_string(type)) + "_d" + std::to_string(dim) + "_" +
                            classifier.label() + "_n" + std::to_string(n_initial) + "_ber" + format_double(ber) +
                            "_" + std::string(to_string(strategy)) + "_r" + std::to_string(r);
                  cell.seed = derive_seed(config.master_seed, SeedRole::kExperiment, stable_hash(data_key));
                  cells.push_back(std::move(cell));
                }
  return cells;
}

ExperimentConfig experiment_config(const SweepConfig& config, const Cell& cell, double separation_scale) {
  ExperimentConfig e;
  e.task_spec = make_preset(cell.task);
  e.task_spec.separation_scale = separation_scale;
  e.task_spec.input_type = cell.input_type;
  e.task_spec.input_dim = cell.input_dim;
  e.task_spec.target_ber = cell.ber;
  e.classifier = cell.classifier;
  e.strategy = cell.strategy;
  e.committee = config.committee;
  e.n_initial = cell.n_initial;
  e.pool_size = config.pool_size;
  e.n_test = config.n_test;
  e.n_steps = config.n_steps;
  e.n_rs = config.n_rs;
  e.master_seed = cell.seed;
  e.ber_mc = config.ber_mc;
  e.opt_reps = config.opt_reps;
  e.opt_n_large = config.opt_n_large;
  return e;
}

}  // namespace alsim::app
