#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "arb/core/dataset_io.hpp"
#include "arb/harness/config.hpp"
#include "arb/harness/csv.hpp"
#include "arb/harness/plot.hpp"
#include "arb/harness/run.hpp"
#include "arb/harness/sweep.hpp"
#include "support.hpp"

using namespace arb;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

// Tiny but complete run: 300 env steps, coprime-ish schedule periods.
RunConfig tiny_config(const fs::path& out) {
  return parse_config(
      "env = point-mass\n"
      "tier = random\n"
      "dataset_episodes = 20\n"
      "n_pretrain = 40\n"
      "n_interaction = 310\n"
      "d_weight = 50\n"
      "d_update = 30\n"
      "n_update = 3\n"
      "batch_size = 16\n"
      "eval_every = 100\n"
      "eval_episodes = 2\n"
      "hidden = 16,16\n"
      "seeds = 0\n"
      "out_dir = " + out.string() + "\n");
}

}  // namespace

TEST(Config, DefaultsAndParsing) {
  const RunConfig cfg = parse_config(
      "# comment line\n"
      "env = pendulum   # trailing comment\n"
      "strategy = topn\n"
      "top_n = 5\n"
      "lambda = 0.25\n"
      "sampling = two-stage\n"
      "level = transition\n"
      "hidden = 32,32,32\n"
      "seeds = 4,5\n"
      "dataset = none\n");
  EXPECT_EQ(cfg.env, "pendulum");
  EXPECT_EQ(cfg.strategy.kind, BufferStrategy::Kind::TopN);
  EXPECT_EQ(cfg.strategy.top_n, 5u);
  EXPECT_EQ(cfg.strategy.onpolicy.lambda, 0.25);
  EXPECT_EQ(cfg.strategy.mode, SamplingMode::TwoStage);
  EXPECT_EQ(cfg.strategy.onpolicy.level, WeightLevel::Transition);
  EXPECT_EQ(cfg.agent.hidden, (std::vector<Index>{32, 32, 32}));
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{4, 5}));
  EXPECT_FALSE(cfg.dataset_path.has_value());

  const RunConfig d = parse_config("");
  EXPECT_EQ(d.schedule.n_interaction, 50000);
  EXPECT_EQ(d.schedule.d_weight, 1000);
  EXPECT_EQ(d.strategy.kind, BufferStrategy::Kind::Arb);
}

TEST(Config, ErrorsNameTheLine) {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("env = point-mass\nbogus\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("lambda = 1\nlambda = 2\n").find("duplicate"), std::string::npos);
  EXPECT_NE(message("colour = red\n").find("unknown"), std::string::npos);
  EXPECT_NE(message("n_update = many\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("lambda = -1\n"), "no error");
  EXPECT_NE(message("env = hopper\n"), "no error");
  EXPECT_NE(message("d_weight = 0\n"), "no error");
  EXPECT_NE(message("seeds = \n"), "no error");
}

TEST(Config, TextRoundTrip) {
  RunConfig cfg = parse_config("strategy = parallel\nlambda = 0.1\ncapacity = 999\nhidden = 7,9\nseeds = 1,2,3\n");
  const RunConfig back = parse_config(cfg.to_text());
  EXPECT_EQ(back.to_text(), cfg.to_text());
  for (const auto& key : config_keys()) EXPECT_EQ(back.get(key), cfg.get(key)) << key;
}

TEST(Config, KeyClasses) {
  EXPECT_TRUE(is_online_only_key("lambda"));
  EXPECT_FALSE(is_online_only_key("n_pretrain"));
  EXPECT_FALSE(is_online_only_key("lr"));
  EXPECT_TRUE(is_dataset_independent_key("lr"));
  EXPECT_FALSE(is_dataset_independent_key("tier"));
}

TEST(Config, RelativeDatasetResolvesAgainstConfigDir) {
  const auto dir = test::scratch_dir("config_rel");
  std::ofstream(dir / "c.txt") << "dataset = data/d.csv\n";
  EXPECT_EQ(*load_config(dir / "c.txt").dataset_path, dir / "data/d.csv");
  EXPECT_THROW(load_config(dir / "missing.txt"), std::runtime_error);
}

TEST(Csv, ParsesNumbersAndNaN) {
  const CsvTable t = parse_csv("step,x\n1,0.5\n2,\n3,nan\n");
  ASSERT_EQ(t.rows.size(), 3u);
  const auto x = t.numbers("x");
  EXPECT_EQ(x[0], 0.5);
  EXPECT_TRUE(std::isnan(x[1]));
  EXPECT_TRUE(std::isnan(x[2]));
  EXPECT_FALSE(t.column("y").has_value());
  EXPECT_THROW(t.numbers("y"), CsvError);
  EXPECT_THROW(parse_csv("a,b\n1,x\n").numbers("b"), CsvError);
  EXPECT_THROW(parse_csv("a,b\n1\n"), CsvError);
  EXPECT_THROW(read_csv("/nonexistent.csv"), CsvError);
  EXPECT_EQ(csv_cell(std::nan("")), "");
  EXPECT_EQ(csv_cell(0.1), "0.1");
}

TEST(Run, ScheduleFidelity) {
  const auto dir = test::scratch_dir("schedule");
  const RunConfig cfg = tiny_config(dir);
  const Dataset offline = load_or_generate_dataset(cfg);
  const RunMetrics m = run_seed(cfg, 0, offline, {});
  EXPECT_EQ(m.env_steps, 310);
  EXPECT_EQ(m.reweight_passes, 310u / 50);
  EXPECT_EQ(m.online_updates, (310u / 30) * 3);
  ASSERT_EQ(m.ratios.size(), 310u / 50);
  for (std::size_t k = 0; k < m.ratios.size(); ++k) EXPECT_EQ(m.ratios[k].step, 50 * static_cast<int>(k + 1));
  // Evaluations at 0, every 100 steps, and the final step.
  std::vector<std::int64_t> eval_steps;
  for (const auto& e : m.evals) eval_steps.push_back(e.step);
  EXPECT_EQ(eval_steps, (std::vector<std::int64_t>{0, 100, 200, 300, 310}));
  std::size_t online_losses = 0;
  for (const auto& l : m.losses) online_losses += l.phase == "online";
  EXPECT_EQ(online_losses, 310u / 30);
}

TEST(Run, NaiveNeverReweights) {
  RunConfig cfg = tiny_config(test::scratch_dir("naive"));
  cfg.set("strategy", "naive");
  const Dataset offline = load_or_generate_dataset(cfg);
  const RunMetrics m = run_seed(cfg, 0, offline, {});
  EXPECT_EQ(m.reweight_passes, 0u);
  EXPECT_EQ(m.online_updates, (310u / 30) * 3);
}

TEST(Run, WritesOutputsAndSkipsRatioWithoutInteraction) {
  const auto dir = test::scratch_dir("outputs");
  RunConfig cfg = tiny_config(dir);
  const auto runs = run(cfg);
  ASSERT_EQ(runs.size(), 1u);
  for (const char* f : {"config.txt", "eval.csv", "online_ratio.csv", "losses.csv", "checkpoint.txt"}) {
    EXPECT_TRUE(fs::exists(dir / "seed_0" / f)) << f;
  }
  const CsvTable ratio = read_csv(dir / "seed_0" / "online_ratio.csv");
  EXPECT_EQ(ratio.rows.size(), 6u);
  const CsvTable losses = read_csv(dir / "seed_0" / "losses.csv");
  EXPECT_EQ(losses.header.front(), "phase");
  EXPECT_NE(slurp(dir / "seed_0" / "config.txt").find("run_seed = 0"), std::string::npos);
  EXPECT_NO_THROW(Checkpoint::load(dir / "seed_0" / "checkpoint.txt"));

  const auto dir2 = test::scratch_dir("offline_only");
  cfg = tiny_config(dir2);
  cfg.set("n_interaction", "0");
  const auto only = run(cfg);
  EXPECT_FALSE(fs::exists(dir2 / "seed_0" / "online_ratio.csv"));
  EXPECT_TRUE(fs::exists(dir2 / "seed_0" / "eval.csv"));
  EXPECT_EQ(only[0].evals.size(), 1u);
  EXPECT_TRUE(only[0].ratios.empty());
}

TEST(Run, StrategyDoesNotChangeCollectedExperience) {
  // With a frozen behavior policy the env and policy streams alone determine
  // what is collected, whatever the buffer does.
  RunConfig cfg = tiny_config(test::scratch_dir("isolation"));
  const Dataset offline = load_or_generate_dataset(cfg);
  const PretrainResult pre = pretrain_agent(cfg, 0, offline);
  auto trace = [&](const std::string& strategy) {
    RunConfig c = cfg;
    c.set("strategy", strategy);
    std::vector<Transition> steps;
    RunOptions opt;
    opt.pretrained = &pre;
    opt.freeze_behavior = true;
    opt.on_step = [&](std::int64_t, const Transition& t) { steps.push_back(t); };
    run_seed(c, 0, offline, opt);
    return steps;
  };
  const auto arb = trace("arb");
  ASSERT_EQ(arb.size(), 310u);
  for (const char* s : {"naive", "parallel", "topn"}) {
    const auto other = trace(s);
    ASSERT_EQ(other.size(), arb.size()) << s;
    for (std::size_t i = 0; i < arb.size(); ++i) {
      ASSERT_EQ(other[i].state, arb[i].state) << s << " step " << i;
      ASSERT_EQ(other[i].action, arb[i].action) << s << " step " << i;
      ASSERT_EQ(other[i].reward, arb[i].reward) << s << " step " << i;
      ASSERT_EQ(other[i].origin, Origin::Online);
    }
  }
}

TEST(Run, ByteIdenticalAcrossRepeats) {
  const auto a = test::scratch_dir("repeat_a"), b = test::scratch_dir("repeat_b");
  run(tiny_config(a));
  run(tiny_config(b));
  for (const char* f : {"eval.csv", "online_ratio.csv", "losses.csv", "checkpoint.txt"}) {
    EXPECT_EQ(slurp(a / "seed_0" / f), slurp(b / "seed_0" / f)) << f;
  }
}

TEST(Run, SharedPretrainMatchesFreshPretrain) {
  const RunConfig cfg = tiny_config(test::scratch_dir("shared"));
  const Dataset offline = load_or_generate_dataset(cfg);
  const PretrainResult pre = pretrain_agent(cfg, 0, offline);
  RunOptions opt;
  opt.pretrained = &pre;
  const RunMetrics shared = run_seed(cfg, 0, offline, opt);
  const RunMetrics fresh = run_seed(cfg, 0, offline, {});
  ASSERT_EQ(shared.evals.size(), fresh.evals.size());
  for (std::size_t i = 0; i < fresh.evals.size(); ++i) EXPECT_EQ(shared.evals[i].mean_return, fresh.evals[i].mean_return);
}

TEST(Run, LoadsDatasetFiles) {
  const auto dir = test::scratch_dir("dataset_file");
  RunConfig cfg = tiny_config(dir);
  const Dataset generated = load_or_generate_dataset(cfg);
  dataset_save(generated, dir / "d.csv");
  cfg.dataset_path = dir / "d.csv";
  EXPECT_EQ(load_or_generate_dataset(cfg).size(), generated.size());
  cfg.set("env", "pendulum");
  EXPECT_THROW(load_or_generate_dataset(cfg), std::invalid_argument);
}

TEST(Sweep, AxisParsing) {
  const SweepAxis a = parse_axis("lambda=0.25, 0.5,2");
  EXPECT_EQ(a.key, "lambda");
  EXPECT_EQ(a.values, (std::vector<std::string>{"0.25", "0.5", "2"}));
  EXPECT_THROW(parse_axis("lambda"), std::invalid_argument);
  EXPECT_THROW(parse_axis("colour=red"), std::invalid_argument);
  EXPECT_THROW(parse_axis("seeds=1,2"), std::invalid_argument);
  EXPECT_THROW(parse_axis("lambda=1,,2"), std::invalid_argument);
}

TEST(Sweep, SingleValueMatchesPlainRun) {
  const auto plain = test::scratch_dir("sweep_plain"), swept = test::scratch_dir("sweep_one");
  run(tiny_config(plain));
  const auto cells = sweep(tiny_config(swept), parse_axis("lambda=0.5"));
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_TRUE(cells[0].error.empty());
  for (const char* f : {"eval.csv", "online_ratio.csv", "losses.csv"}) {
    EXPECT_EQ(slurp(swept / "lambda=0.5" / "seed_0" / f), slurp(plain / "seed_0" / f)) << f;
  }
}

TEST(Sweep, FailingCellDoesNotStopTheSweep) {
  const auto dir = test::scratch_dir("sweep_fail");
  RunConfig cfg = tiny_config(dir);
  cfg.set("n_interaction", "100");
  const auto cells = sweep(cfg, parse_axis("lambda=0.5,-1,2"));
  ASSERT_EQ(cells.size(), 3u);
  EXPECT_TRUE(cells[0].error.empty());
  EXPECT_FALSE(cells[1].error.empty());
  EXPECT_TRUE(cells[2].error.empty());
  const CsvTable summary = read_csv(dir / "sweep_summary.csv");
  ASSERT_EQ(summary.rows.size(), 3u);
  const auto status = *summary.column("status");
  EXPECT_EQ(summary.rows[0][status], "ok");
  EXPECT_EQ(summary.rows[1][status].rfind("error", 0), 0u);
  EXPECT_EQ(summary.rows[2][status], "ok");
  const CsvTable curves = read_csv(dir / "sweep_curves.csv");
  EXPECT_EQ(curves.rows.size(), 2u * (100 / 50));
}

TEST(Plot, DeterministicSvg) {
  Figure f;
  f.title = "t";
  f.series.push_back({"a", {{0, 0.1}, {1, 0.5}, {2, std::nan("")}, {3, 0.7}}, false});
  f.series.push_back({"b", {{0, 0.3}, {3, 0.2}}, false});
  f.series.push_back({"a buffer", {{0, 0.0}, {3, 0.4}}, true});
  const std::string svg = render_svg(f);
  EXPECT_EQ(svg, render_svg(f));
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_EQ(count(svg, "<polyline"), 4u);  // NaN splits "a" into two pieces
  EXPECT_EQ(count(svg, "stroke-dasharray"), 2u);  // the line and its legend swatch
}

TEST(Plot, EmptyFigureStillHasAxes) {
  const std::string svg = render_svg(Figure{});
  EXPECT_NE(svg.find("<line"), std::string::npos);
  EXPECT_EQ(count(svg, "<polyline"), 0u);
}

TEST(Plot, CollectsRunOutputs) {
  const auto dir = test::scratch_dir("plot_collect");
  run(tiny_config(dir / "arb"));
  const auto figs = collect_figures({dir / "arb" / "seed_0" / "online_ratio.csv", dir / "arb" / "seed_0" / "eval.csv"});
  ASSERT_EQ(figs.online_ratio.series.size(), 2u);
  EXPECT_FALSE(figs.online_ratio.series[0].reference);
  EXPECT_TRUE(figs.online_ratio.series[1].reference);
  EXPECT_EQ(figs.score.series.size(), 1u);
  const auto files = plot({dir / "arb" / "seed_0" / "online_ratio.csv"}, dir / "plots");
  EXPECT_EQ(files.size(), 2u);
  for (const auto& f : files) EXPECT_TRUE(fs::exists(f));

  std::ofstream(dir / "bad.csv") << "x,y\n1,2\n";
  EXPECT_THROW(collect_figures({dir / "bad.csv"}), CsvError);
}
