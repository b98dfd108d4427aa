#include "arb/nets/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "arb/core/text.hpp"

namespace arb {

void Checkpoint::add(std::string name, Eigen::MatrixXd value) {
  if (name.empty() || name.find_first_of(" \t\n") != std::string::npos) {
    throw std::invalid_argument("Checkpoint: tensor names must be nonempty without whitespace");
  }
  if (contains(name)) throw std::invalid_argument("Checkpoint: duplicate tensor '" + name + "'");
  entries_.push_back({std::move(name), std::move(value)});
}

bool Checkpoint::contains(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return true;
  }
  return false;
}

const Eigen::MatrixXd& Checkpoint::get(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e.value;
  }
  throw std::out_of_range("Checkpoint: no tensor '" + name + "'");
}

void Checkpoint::write(std::ostream& out) const {
  out << "#arb-checkpoint v1 tensors=" << entries_.size() << '\n';
  for (const auto& e : entries_) out << "tensor " << e.name << ' ' << e.value.rows() << ' ' << e.value.cols() << '\n';
  out << "data\n";
  std::string line;
  for (const auto& e : entries_) {
    line.clear();
    for (Eigen::Index k = 0; k < e.value.size(); ++k) {
      if (k > 0) line += ' ';
      line += text::format_double(e.value.data()[k]);
    }
    out << line << '\n';
  }
}

Checkpoint Checkpoint::read(std::istream& in) {
  std::string line;
  std::size_t count = 0;
  if (!std::getline(in, line) || std::sscanf(line.c_str(), "#arb-checkpoint v1 tensors=%zu", &count) != 1) {
    throw std::runtime_error("Checkpoint: bad header");
  }
  struct Shape {
    std::string name;
    Eigen::Index rows, cols;
  };
  std::vector<Shape> shapes;
  for (std::size_t k = 0; k < count; ++k) {
    if (!std::getline(in, line)) throw std::runtime_error("Checkpoint: truncated manifest");
    std::istringstream ss(line);
    std::string tag;
    Shape s;
    if (!(ss >> tag >> s.name >> s.rows >> s.cols) || tag != "tensor" || s.rows < 0 || s.cols < 0) {
      throw std::runtime_error("Checkpoint: bad manifest line '" + line + "'");
    }
    shapes.push_back(s);
  }
  if (!std::getline(in, line) || line != "data") throw std::runtime_error("Checkpoint: missing data marker");

  Checkpoint ckpt;
  for (const Shape& s : shapes) {
    if (!std::getline(in, line)) throw std::runtime_error("Checkpoint: missing data for '" + s.name + "'");
    Eigen::MatrixXd value(s.rows, s.cols);
    const auto fields = line.empty() ? std::vector<std::string_view>{} : text::split(line, ' ');
    if (static_cast<Eigen::Index>(fields.size()) != value.size()) {
      throw std::runtime_error("Checkpoint: wrong value count for '" + s.name + "'");
    }
    for (std::size_t k = 0; k < fields.size(); ++k) {
      auto v = text::parse_double(fields[k]);
      if (!v) throw std::runtime_error("Checkpoint: bad number in '" + s.name + "'");
      value.data()[k] = *v;
    }
    ckpt.add(s.name, std::move(value));
  }
  return ckpt;
}

void Checkpoint::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("Checkpoint: cannot open " + path.string());
  write(out);
  if (!out.flush()) throw std::runtime_error("Checkpoint: write failed for " + path.string());
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("Checkpoint: cannot open " + path.string());
  return read(in);
}

}  // namespace arb
