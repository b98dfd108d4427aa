#include "arb/harness/csv.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "arb/core/text.hpp"

namespace arb {

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

std::vector<double> CsvTable::numbers(std::string_view name) const {
  const auto col = column(name);
  if (!col) throw CsvError("csv: missing column '" + std::string(name) + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string& cell = rows[r][*col];
    if (cell.empty() || cell == "nan") {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const auto v = text::parse_double(cell);
    if (!v) throw CsvError("csv: row " + std::to_string(r + 2) + ": '" + cell + "' is not a number");
    out.push_back(*v);
  }
  return out;
}

CsvTable parse_csv(std::string_view content, const std::string& source) {
  CsvTable table;
  std::size_t line_no = 0;
  for (auto raw : text::split(content, '\n')) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (raw.empty()) continue;
    std::vector<std::string> cells;
    for (auto f : text::split(raw, ',')) cells.emplace_back(f);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw CsvError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(table.header.size()) +
                     " fields, got " + std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) throw CsvError(source + ": missing header");
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), path.string());
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : out_(path), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("CsvWriter: wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << '\n';
  out_.flush();
}

std::string csv_cell(double value) { return std::isnan(value) ? std::string() : text::format_double(value); }

}  // namespace arb
