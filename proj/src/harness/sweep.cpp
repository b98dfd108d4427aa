#include "arb/harness/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "arb/core/text.hpp"
#include "arb/harness/csv.hpp"

namespace arb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Seed average per step; steps missing or undefined in a seed are skipped.
template <typename Row, typename Field>
std::map<std::int64_t, double> average_curve(const std::vector<RunMetrics>& runs,
                                             const std::vector<Row> RunMetrics::*rows, Field field) {
  std::map<std::int64_t, std::pair<double, int>> acc;
  for (const RunMetrics& m : runs) {
    for (const Row& r : m.*rows) {
      const double v = field(r);
      auto& slot = acc[r.step];
      if (!std::isnan(v)) {
        slot.first += v;
        ++slot.second;
      }
    }
  }
  std::map<std::int64_t, double> out;
  for (const auto& [step, s] : acc) out[step] = s.second ? s.first / s.second : kNaN;
  return out;
}

std::string sanitized(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; }, ';');
  return s;
}

}  // namespace

SweepAxis parse_axis(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw std::invalid_argument("axis must look like key=v1,v2");
  SweepAxis axis;
  axis.key = std::string(text::trim(text.substr(0, eq)));
  for (auto v : text::split(text.substr(eq + 1), ',')) {
    const auto t = text::trim(v);
    if (t.empty()) throw std::invalid_argument("axis '" + axis.key + "' has an empty value");
    axis.values.emplace_back(t);
  }
  const auto& keys = config_keys();
  if (std::find(keys.begin(), keys.end(), axis.key) == keys.end()) {
    throw std::invalid_argument("axis: unknown key '" + axis.key + "'");
  }
  if (axis.key == "seeds" || axis.key == "out_dir") throw std::invalid_argument("axis: cannot sweep '" + axis.key + "'");
  return axis;
}

std::vector<SweepCell> sweep(const RunConfig& base, const SweepAxis& axis, std::ostream* log) {
  base.validate();
  std::filesystem::create_directories(base.out_dir);

  std::optional<Dataset> shared_data;
  if (is_dataset_independent_key(axis.key)) shared_data = load_or_generate_dataset(base);
  std::map<std::uint64_t, PretrainResult> shared_pretrain;
  const bool share_pretrain = is_online_only_key(axis.key);

  std::vector<SweepCell> cells;
  for (const std::string& value : axis.values) {
    SweepCell cell{value, {}, {}};
    try {
      RunConfig cfg = base;
      cfg.set(axis.key, value);
      cfg.out_dir = base.out_dir / (axis.key + "=" + value);
      cfg.validate();
      const Dataset data = shared_data ? *shared_data : load_or_generate_dataset(cfg);
      for (std::uint64_t seed : cfg.seeds) {
        RunOptions options;
        options.out_dir = cfg.out_dir / ("seed_" + std::to_string(seed));
        options.log = log;
        if (share_pretrain) {
          auto it = shared_pretrain.find(seed);
          if (it == shared_pretrain.end()) it = shared_pretrain.emplace(seed, pretrain_agent(cfg, seed, data)).first;
          options.pretrained = &it->second;
        }
        cell.seeds.push_back(run_seed(cfg, seed, data, options));
      }
    } catch (const std::exception& e) {
      cell.error = e.what();
      if (log) *log << "sweep " << axis.key << "=" << value << " failed: " << e.what() << "\n";
    }
    cells.push_back(std::move(cell));
  }

  CsvWriter summary(base.out_dir / "sweep_summary.csv",
                    {"key", "value", "seed", "final_score", "mean_online_ratio", "mean_buffer_fraction", "status"});
  CsvWriter curves(base.out_dir / "sweep_curves.csv",
                   {"series", "step", "minibatch_online_ratio", "buffer_online_fraction"});
  CsvWriter scores(base.out_dir / "sweep_scores.csv", {"series", "step", "normalized_score"});
  for (const SweepCell& cell : cells) {
    const std::string series = axis.key + "=" + cell.value;
    if (!cell.error.empty()) {
      summary.row({axis.key, cell.value, "", "", "", "", "error: " + sanitized(cell.error)});
    }
    for (const RunMetrics& m : cell.seeds) {
      summary.row({axis.key, cell.value, std::to_string(m.seed), csv_cell(m.final_score()),
                   csv_cell(m.mean_online_ratio()), csv_cell(m.mean_buffer_fraction()), "ok"});
    }
    const auto ratio =
        average_curve(cell.seeds, &RunMetrics::ratios, [](const RatioRow& r) { return r.minibatch_online_ratio; });
    const auto fraction =
        average_curve(cell.seeds, &RunMetrics::ratios, [](const RatioRow& r) { return r.buffer_online_fraction; });
    for (const auto& [step, v] : ratio) {
      curves.row({series, std::to_string(step), csv_cell(v), csv_cell(fraction.at(step))});
    }
    const auto score =
        average_curve(cell.seeds, &RunMetrics::evals, [](const EvalRow& r) { return r.normalized_score; });
    for (const auto& [step, v] : score) scores.row({series, std::to_string(step), csv_cell(v)});
  }
  return cells;
}

}  // namespace arb
