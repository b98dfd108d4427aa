// Command-line front end: data generation, runs, sweeps, plots.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "arb/core/dataset_io.hpp"
#include "arb/envs/datasets.hpp"
#include "arb/harness/config.hpp"
#include "arb/harness/plot.hpp"
#include "arb/harness/run.hpp"
#include "arb/harness/sweep.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Run only this seed");
    cmd->add_option("--out-dir", out_dir, "Output directory");
  }
  void apply(arb::RunConfig& cfg) const {
    if (seed) cfg.seeds = {*seed};
    if (out_dir) cfg.out_dir = *out_dir;
  }
};

void print_summary(const std::vector<arb::RunMetrics>& runs) {
  for (const auto& m : runs) {
    std::printf("seed %llu: final score %.2f, mean online ratio %.4f, buffer fraction %.4f\n",
                static_cast<unsigned long long>(m.seed), m.final_score(), m.mean_online_ratio(),
                m.mean_buffer_fraction());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive replay buffer experiments"};
  app.require_subcommand(1);

  std::string env_name, tier_name, out, config_path, axis_text;
  std::size_t episodes = 200, min_transitions = 0;
  std::uint64_t data_seed = 7;
  auto* gen = app.add_subcommand("gen-data", "Generate a tiered offline dataset");
  gen->add_option("env", env_name, "Environment name")->required();
  gen->add_option("tier", tier_name, "random|medium|medium-replay|expert|medium-expert")->required();
  gen->add_option("out", out, "Output dataset file")->required();
  gen->add_option("--episodes", episodes, "Episodes to collect");
  gen->add_option("--min-transitions", min_transitions, "Collect until at least this many transitions");
  gen->add_option("--seed", data_seed, "Generation seed");

  Overrides run_over, sweep_over;
  auto* run = app.add_subcommand("run", "Pretrain offline, then fine-tune online, for every seed");
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run_over.add_to(run);

  auto* sweep = app.add_subcommand("sweep", "Run a config once per value of one key");
  sweep->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--axis", axis_text, "key=v1,v2,...")->required();
  sweep_over.add_to(sweep);

  std::vector<std::string> plot_args;
  auto* plot = app.add_subcommand("plot", "Render metrics CSVs to SVG");
  plot->add_option("files", plot_args, "<csv...> <out-dir>")->required()->expected(2, -1);

  int ref_episodes = 10000;
  auto* ref = app.add_subcommand("ref-returns", "Re-measure random and expert reference returns");
  ref->add_option("env", env_name, "Environment name")->required();
  ref->add_option("--episodes", ref_episodes, "Episodes per policy");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      arb::DatasetTierSpec spec;
      spec.tier = arb::parse_tier(tier_name);
      spec.episodes = episodes;
      spec.min_transitions = min_transitions;
      arb::Rng rng(data_seed);
      const arb::Dataset d = arb::generate_dataset(env_name, spec, rng);
      arb::dataset_save(d, out);
      const auto& env = arb::env_spec(env_name);
      std::printf("%zu trajectories, %zu transitions, mean return %.4f, normalized score %.2f\n",
                  d.trajectories.size(), d.size(), d.mean_trajectory_return(),
                  arb::normalized_score(env, d.mean_trajectory_return()));
    } else if (*run) {
      arb::RunConfig cfg = arb::load_config(config_path);
      run_over.apply(cfg);
      print_summary(arb::run(cfg, &std::cerr));
      std::printf("results in %s\n", cfg.out_dir.string().c_str());
    } else if (*sweep) {
      arb::RunConfig cfg = arb::load_config(config_path);
      sweep_over.apply(cfg);
      const auto cells = arb::sweep(cfg, arb::parse_axis(axis_text), &std::cerr);
      int failed = 0;
      for (const auto& cell : cells) {
        std::printf("%s\n", cell.value.c_str());
        if (!cell.error.empty()) {
          std::printf("  error: %s\n", cell.error.c_str());
          ++failed;
        }
        print_summary(cell.seeds);
      }
      std::printf("results in %s\n", cfg.out_dir.string().c_str());
      if (failed) return 1;
    } else if (*plot) {
      const std::string out_dir = plot_args.back();
      plot_args.pop_back();
      const std::vector<std::filesystem::path> csvs(plot_args.begin(), plot_args.end());
      for (const auto& p : arb::plot(csvs, out_dir)) std::printf("%s\n", p.string().c_str());
    } else if (*ref) {
      const auto& spec = arb::env_spec(env_name);
      const auto r = arb::measure_reference_returns(spec, ref_episodes);
      std::printf("%s random %.4f expert %.4f (registered: %.4f, %.4f)\n", spec.name.c_str(), r.random, r.expert,
                  spec.return_random, spec.return_expert);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
