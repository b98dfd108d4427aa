#include "arb/core/dataset_io.hpp"

#include <fstream>
#include <sstream>

#include "arb/core/text.hpp"

namespace arb {

namespace {

constexpr std::string_view kMagic = "#arb-dataset v1";

void append_number(std::string& line, double value, std::size_t row) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("dataset_save: non-finite value in transition " + std::to_string(row));
  }
  line += ',';
  line += text::format_double(value);
}

Index parse_header_dim(std::string_view token, std::string_view key) {
  if (token.substr(0, key.size()) != key) {
    throw DatasetFormatError(1, "expected '" + std::string(key) + "<n>' in header");
  }
  auto value = text::parse_int(token.substr(key.size()));
  if (!value || *value < 1) throw DatasetFormatError(1, "invalid dimension in header");
  return static_cast<Index>(*value);
}

}  // namespace

void write_dataset(const Dataset& d, std::ostream& out) {
  validate(d);
  out << kMagic << " state_dim=" << d.state_dim << " action_dim=" << d.action_dim << '\n';
  std::string line;
  for (std::size_t i = 0; i < d.transitions.size(); ++i) {
    const Transition& t = d.transitions[i];
    line = std::to_string(t.traj_id);
    for (double v : t.state) append_number(line, v, i);
    for (double v : t.action) append_number(line, v, i);
    append_number(line, t.reward, i);
    for (double v : t.next_state) append_number(line, v, i);
    line += t.done ? ",1\n" : ",0\n";
    out << line;
  }
}

Dataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DatasetFormatError(1, "missing header");
  const auto header = text::split(text::trim(line), ' ');
  if (header.size() != 4 || std::string(header[0]) + " " + std::string(header[1]) != kMagic) {
    throw DatasetFormatError(1, "expected '#arb-dataset v1 state_dim=<n> action_dim=<m>'");
  }
  Dataset d(parse_header_dim(header[2], "state_dim="), parse_header_dim(header[3], "action_dim="));
  const auto n = static_cast<std::size_t>(d.state_dim);
  const auto m = static_cast<std::size_t>(d.action_dim);
  const std::size_t expected_fields = 1 + n + m + 1 + n + 1;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto fields = text::split(text::trim(line), ',');
    if (fields.size() != expected_fields) {
      throw DatasetFormatError(line_no, "expected " + std::to_string(expected_fields) + " fields, got " +
                                            std::to_string(fields.size()));
    }
    auto id = text::parse_int(fields[0]);
    if (!id) throw DatasetFormatError(line_no, "invalid traj_id");

    std::size_t f = 1;
    auto read_vector = [&](std::size_t count) {
      Eigen::VectorXd v(static_cast<Index>(count));
      for (std::size_t k = 0; k < count; ++k, ++f) {
        auto value = text::parse_double(fields[f]);
        if (!value || !std::isfinite(*value)) {
          throw DatasetFormatError(line_no, "invalid number in field " + std::to_string(f + 1));
        }
        v(static_cast<Index>(k)) = *value;
      }
      return v;
    };
    Transition t;
    t.traj_id = *id;
    t.state = read_vector(n);
    t.action = read_vector(m);
    t.reward = read_vector(1)(0);
    t.next_state = read_vector(n);
    if (fields[f] == "1") {
      t.done = true;
    } else if (fields[f] != "0") {
      throw DatasetFormatError(line_no, "done must be 0 or 1");
    }

    if (d.trajectories.empty() || d.trajectories.back().id != t.traj_id) {
      if (!d.trajectories.empty() && t.traj_id < d.trajectories.back().id) {
        throw DatasetFormatError(line_no, "traj_id " + std::to_string(t.traj_id) +
                                              " out of order; trajectories must be contiguous");
      }
      d.trajectories.emplace_back().id = t.traj_id;
    }
    d.trajectories.back().transition_indices.push_back(d.transitions.size());
    d.transitions.push_back(std::move(t));
  }
  return d;
}

void dataset_save(const Dataset& dataset, const std::filesystem::path& path) {
  std::ostringstream buffer;
  write_dataset(dataset, buffer);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("dataset_save: cannot open " + path.string());
  out << buffer.str();
  if (!out.flush()) throw std::runtime_error("dataset_save: write failed for " + path.string());
}

Dataset dataset_load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("dataset_load: cannot open " + path.string());
  return read_dataset(in);
}

}  // namespace arb
