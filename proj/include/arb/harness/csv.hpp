#ifndef ARB_HARNESS_CSV_HPP
#define ARB_HARNESS_CSV_HPP

#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace arb {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Plain comma-separated table (no quoting; none of our fields need it).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column position, or nullopt.
  std::optional<std::size_t> column(std::string_view name) const;
  /// Numeric column; empty cells and "nan" read as NaN. Throws CsvError on junk.
  std::vector<double> numbers(std::string_view name) const;
};

CsvTable parse_csv(std::string_view content, const std::string& source = "<memory>");
CsvTable read_csv(const std::filesystem::path& path);

/// Writes the header at construction and flushes every row, so a run that
/// aborts keeps everything logged so far.
class CsvWriter {
 public:
  CsvWriter() = default;
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  void row(const std::vector<std::string>& cells);
  bool is_open() const { return out_.is_open(); }

 private:
  std::ofstream out_;
  std::size_t columns_ = 0;
};

/// Shortest round-trip text for a number; NaN becomes an empty cell.
std::string csv_cell(double value);

}  // namespace arb

#endif  // ARB_HARNESS_CSV_HPP
