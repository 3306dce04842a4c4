#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "alsim/format.hpp"
#include "alsim/runner.hpp"

namespace alsim {

namespace {

void write_one(std::ostream& out, const Trajectory& t) {
  for (std::size_t i = 0; i < t.scores.size(); ++i) {
    out << i << ',' << t.labelled_counts[i] << ',' << to_string(t.strategy) << ',';
    if (t.rs_instance) out << *t.rs_instance;
    out << ',' << format_double(t.scores[i]) << '\n';
  }
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

void write_trajectories(std::ostream& out, const Trajectory& al, std::span<const Trajectory> rs) {
  out << "step,labelled_count,strategy,instance,score\n";
  write_one(out, al);
  for (const auto& t : rs) write_one(out, t);
}

TrajectorySet read_trajectories(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "step,labelled_count,strategy,instance,score")
    throw InvalidArgument("trajectory CSV: unexpected header");
  TrajectorySet set;
  bool have_al = false;
  std::map<std::size_t, Trajectory> rs;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 5) throw InvalidArgument("trajectory CSV line " + std::to_string(line_no) + ": expected 5 fields");
    const auto step = static_cast<std::size_t>(parse_integer(f[0]));
    Trajectory* t = nullptr;
    if (f[3].empty()) {
      t = &set.al;
      if (!have_al) {
        set.al.strategy = parse_strategy(f[2]);
        have_al = true;
      }
    } else {
      const auto inst = static_cast<std::size_t>(parse_integer(f[3]));
      t = &rs[inst];
      t->strategy = parse_strategy(f[2]);
      t->rs_instance = inst;
    }
    if (step != t->scores.size())
      throw InvalidArgument("trajectory CSV line " + std::to_string(line_no) + ": steps out of order");
    t->labelled_counts.push_back(static_cast<std::size_t>(parse_integer(f[1])));
    t->scores.push_back(parse_double(f[4]));
  }
  if (!have_al) throw InvalidArgument("trajectory CSV has no active-learning rows");
  for (auto& [idx, t] : rs) set.rs.push_back(std::move(t));
  return set;
}

}  // namespace alsim
