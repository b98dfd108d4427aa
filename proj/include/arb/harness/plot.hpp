#ifndef ARB_HARNESS_PLOT_HPP
#define ARB_HARNESS_PLOT_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace arb {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // NaN y breaks the line
  bool reference = false;                         // drawn as a grey dashed line
};

struct Figure {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::optional<std::pair<double, double>> y_range;
};

/// Self-contained SVG; identical input gives byte-identical output.
std::string render_svg(const Figure& figure);

struct Figures {
  Figure online_ratio;
  Figure score;
};

/// Builds both figures from metrics CSVs. Each file contributes the series it
/// has columns for: online_ratio.csv style files give a ratio curve plus a
/// grey buffer-fraction line, files with normalized_score give a score curve.
/// A "series" column splits one file into several curves; otherwise the label
/// comes from the file's directory. Throws CsvError on malformed input.
Figures collect_figures(const std::vector<std::filesystem::path>& csvs);

/// Writes online_ratio.svg and score.svg into out_dir; returns their paths.
std::vector<std::filesystem::path> plot(const std::vector<std::filesystem::path>& csvs,
                                        const std::filesystem::path& out_dir);

}  // namespace arb

#endif  // ARB_HARNESS_PLOT_HPP
