#include "arb/harness/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "arb/harness/csv.hpp"

namespace arb {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 64, kRight = 170, kTop = 36, kBottom = 52;
constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  if (std::abs(v) >= 1000) std::snprintf(buf, sizeof(buf), "%.0f", v);
  else std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string series_label(const std::filesystem::path& csv) {
  const auto dir = csv.parent_path();
  const std::string name = dir.filename().string();
  if (name.rfind("seed_", 0) == 0 && dir.has_parent_path() && !dir.parent_path().filename().empty()) {
    return dir.parent_path().filename().string() + "/" + name;
  }
  return name.empty() ? csv.stem().string() : name;
}

}  // namespace

std::string render_svg(const Figure& fig) {
  double x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
  bool any = false;
  for (const Series& s : fig.series) {
    for (const auto& [x, y] : s.points) {
      if (std::isnan(y)) continue;
      if (!any) {
        x_lo = x_hi = x;
        y_lo = y_hi = y;
        any = true;
      }
      x_lo = std::min(x_lo, x), x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y), y_hi = std::max(y_hi, y);
    }
  }
  x_lo = std::min(x_lo, 0.0);
  if (x_hi <= x_lo) x_hi = x_lo + 1;
  if (fig.y_range) {
    std::tie(y_lo, y_hi) = *fig.y_range;
  } else if (!any) {
    y_lo = 0, y_hi = 1;
  } else {
    const double pad = y_hi > y_lo ? 0.05 * (y_hi - y_lo) : 1.0;
    y_lo -= pad, y_hi += pad;
  }

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto sy = [&](double y) { return kTop + (1 - (y - y_lo) / (y_hi - y_lo)) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(fig.title) + "</text>\n";
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x_lo + (x_hi - x_lo) * i / 4, yv = y_lo + (y_hi - y_lo) * i / 4;
    svg += "<line x1=\"" + num(sx(xv)) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(sx(xv)) + "\" y2=\"" +
           num(kTop + ph + 4) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(sx(xv)) + "\" y=\"" + num(kTop + ph + 16) + "\" text-anchor=\"middle\">" +
           tick_label(xv) + "</text>\n";
    svg += "<line x1=\"" + num(kLeft - 4) + "\" y1=\"" + num(sy(yv)) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
           num(sy(yv)) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(sy(yv) + 4) + "\" text-anchor=\"end\">" +
           tick_label(yv) + "</text>\n";
  }
  svg += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 12) + "\" text-anchor=\"middle\">" +
         escape(fig.x_label) + "</text>\n";
  svg += "<text x=\"16\" y=\"" + num(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num(kTop + ph / 2) + ")\">" + escape(fig.y_label) + "</text>\n";

  std::size_t color = 0;
  double legend_y = kTop + 8;
  for (const Series& s : fig.series) {
    const std::string stroke = s.reference ? "#999999" : kPalette[color++ % kPalette.size()];
    const std::string dash = s.reference ? " stroke-dasharray=\"5,3\"" : "";
    std::string pts;
    auto flush = [&] {
      if (!pts.empty()) {
        svg += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"1.5\"" + dash + " points=\"" + pts +
               "\"/>\n";
      }
      pts.clear();
    };
    for (const auto& [x, y] : s.points) {
      if (std::isnan(y)) {
        flush();
        continue;
      }
      const double cy = std::clamp(sy(y), kTop, kTop + ph);
      pts += (pts.empty() ? "" : " ") + num(sx(x)) + "," + num(cy);
    }
    flush();
    const double lx = kLeft + pw + 10;
    svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(legend_y) + "\" x2=\"" + num(lx + 18) + "\" y2=\"" +
           num(legend_y) + "\" stroke=\"" + stroke + "\" stroke-width=\"1.5\"" + dash + "/>\n";
    svg += "<text x=\"" + num(lx + 22) + "\" y=\"" + num(legend_y + 4) + "\">" + escape(s.label) + "</text>\n";
    legend_y += 16;
  }
  svg += "</svg>\n";
  return svg;
}

Figures collect_figures(const std::vector<std::filesystem::path>& csvs) {
  Figures f;
  f.online_ratio = {"Online data ratio", "environment step", "online ratio", {}, std::make_pair(0.0, 1.0)};
  f.score = {"Normalized score", "environment step", "normalized score", {}, std::nullopt};

  for (const auto& path : csvs) {
    const CsvTable table = read_csv(path);
    if (!table.column("step")) throw CsvError(path.string() + ": missing 'step' column");
    const bool has_ratio = table.column("minibatch_online_ratio").has_value();
    const bool has_score = table.column("normalized_score").has_value();
    if (!has_ratio && !has_score) throw CsvError(path.string() + ": nothing to plot");

    // Group rows by series, keeping first-appearance order.
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::size_t>> groups;
    const auto series_col = table.column("series");
    const std::string fallback = series_label(path);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const std::string label = series_col ? table.rows[r][*series_col] : fallback;
      if (!groups.count(label)) order.push_back(label);
      groups[label].push_back(r);
    }
    if (order.empty()) order.push_back(fallback);

    const auto steps = table.numbers("step");
    auto curve = [&](const std::string& label, const std::vector<double>& ys, bool reference, std::string name) {
      Series s{std::move(name), {}, reference};
      for (std::size_t r : groups[label]) s.points.emplace_back(steps[r], ys[r]);
      return s;
    };
    if (has_ratio) {
      const auto ratio = table.numbers("minibatch_online_ratio");
      const auto fraction =
          table.column("buffer_online_fraction") ? table.numbers("buffer_online_fraction") : std::vector<double>{};
      for (const auto& label : order) {
        f.online_ratio.series.push_back(curve(label, ratio, false, label));
        if (!fraction.empty()) f.online_ratio.series.push_back(curve(label, fraction, true, label + " buffer"));
      }
    }
    if (has_score) {
      const auto score = table.numbers("normalized_score");
      for (const auto& label : order) f.score.series.push_back(curve(label, score, false, label));
    }
  }
  return f;
}

std::vector<std::filesystem::path> plot(const std::vector<std::filesystem::path>& csvs,
                                        const std::filesystem::path& out_dir) {
  const Figures f = collect_figures(csvs);
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written{out_dir / "online_ratio.svg", out_dir / "score.svg"};
  std::ofstream(written[0], std::ios::binary) << render_svg(f.online_ratio);
  std::ofstream(written[1], std::ios::binary) << render_svg(f.score);
  return written;
}

}  // namespace arb
