#ifndef ARB_HARNESS_RUN_HPP
#define ARB_HARNESS_RUN_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arb/algo/agent.hpp"
#include "arb/core/types.hpp"
#include "arb/harness/config.hpp"

namespace arb {

using RunAgent = Agent<double>;

/// Independent RNG streams of one seed; see stream_rng().
enum class Stream : std::uint64_t { Init = 1, Pretrain, Env, Policy, Buffer, Eval };
Rng stream_rng(std::uint64_t seed, Stream stream);

struct EvalRow {
  std::int64_t step = 0;
  double mean_return = 0.0;
  double normalized_score = 0.0;
};

/// Logged at every step that is a multiple of d_weight.
struct RatioRow {
  std::int64_t step = 0;
  double minibatch_online_ratio = 0.0;  // mean over minibatches since the previous row; NaN if none
  double buffer_online_fraction = 0.0;
  double p_max = 0.0;
  double weight_sum = 0.0;
  double weight_mean = 0.0;
  double weight_min = 0.0;
  double weight_max = 0.0;
};

struct LossRow {
  std::string phase;  // "pretrain" or "online"
  std::int64_t step = 0;
  double v_loss = 0.0;
  double q_loss = 0.0;
  double policy_loss = 0.0;
  double eval_return = 0.0;  // NaN unless evaluated at this step
};

struct RunMetrics {
  std::uint64_t seed = 0;
  std::vector<EvalRow> evals;
  std::vector<RatioRow> ratios;
  std::vector<LossRow> losses;
  std::size_t reweight_passes = 0;
  std::uint64_t online_updates = 0;
  std::int64_t env_steps = 0;

  double final_score() const;
  /// Time average over rows with a defined ratio.
  double mean_online_ratio() const;
  double mean_buffer_fraction() const;
};

struct PretrainResult {
  RunAgent agent;
  std::vector<LossRow> losses;
};

/// The offline dataset of a config: loaded from `dataset` or generated from
/// the tier spec with data_seed.
Dataset load_or_generate_dataset(const RunConfig& cfg);

/// Phase 1: fresh agent from the Init stream, n_pretrain uniform updates.
PretrainResult pretrain_agent(const RunConfig& cfg, std::uint64_t seed, const Dataset& offline);

struct RunOptions {
  /// Reuse this pretraining instead of running phase 1.
  const PretrainResult* pretrained = nullptr;
  /// Called after every env step with the transition as pushed.
  std::function<void(std::int64_t step, const Transition&)> on_step;
  /// Act with the pretrained policy throughout; learning still runs on the agent.
  bool freeze_behavior = false;
  /// Write config.txt, eval.csv, online_ratio.csv, losses.csv, checkpoint.txt here.
  std::optional<std::filesystem::path> out_dir;
  std::ostream* log = nullptr;
};

RunMetrics run_seed(const RunConfig& cfg, std::uint64_t seed, const Dataset& offline, const RunOptions& options = {});

/// Every seed of cfg, each into <out_dir>/seed_<s>.
std::vector<RunMetrics> run(const RunConfig& cfg, std::ostream* log = nullptr);

}  // namespace arb

#endif  // ARB_HARNESS_RUN_HPP
