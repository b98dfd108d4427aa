#include "arb/harness/run.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "arb/algo/evaluate.hpp"
#include "arb/buffer/replay_buffer.hpp"
#include "arb/core/dataset_io.hpp"
#include "arb/envs/datasets.hpp"
#include "arb/harness/csv.hpp"

namespace arb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::int64_t kPretrainLogEvery = 1000;

template <typename Row, typename Field>
double mean_of(const std::vector<Row>& rows, Field field) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const Row& r : rows) {
    const double v = field(r);
    if (std::isnan(v)) continue;
    sum += v;
    ++n;
  }
  return n ? sum / static_cast<double>(n) : kNaN;
}

struct LossAccumulator {
  LossReport sum;
  std::int64_t count = 0;

  void add(const LossReport& r) {
    sum.v_loss += r.v_loss;
    sum.q_loss += r.q_loss;
    sum.policy_loss += r.policy_loss;
    ++count;
  }
  LossRow take(std::string phase, std::int64_t step) {
    const double n = static_cast<double>(count);
    LossRow row{std::move(phase), step, sum.v_loss / n, sum.q_loss / n, sum.policy_loss / n, kNaN};
    *this = {};
    return row;
  }
};

EvalRow run_eval(const RunAgent& agent, const EnvSpec& spec, const RunConfig& cfg, std::uint64_t seed,
                 std::int64_t step) {
  // Each evaluation gets its own stream so it never perturbs training draws.
  Rng rng(derive_seed(stream_rng(seed, Stream::Eval)(), static_cast<std::uint64_t>(step)));
  auto env = make_env(spec.name);
  const EvalResult r = evaluate(agent, *env, static_cast<int>(cfg.schedule.eval_episodes), rng);
  return {step, r.mean_return, r.normalized_score};
}

std::vector<std::string> loss_cells(const LossRow& r) {
  return {r.phase, std::to_string(r.step), csv_cell(r.v_loss), csv_cell(r.q_loss), csv_cell(r.policy_loss),
          csv_cell(r.eval_return)};
}

}  // namespace

Rng stream_rng(std::uint64_t seed, Stream stream) {
  return Rng(derive_seed(seed, static_cast<std::uint64_t>(stream)));
}

double RunMetrics::final_score() const { return evals.empty() ? kNaN : evals.back().normalized_score; }

double RunMetrics::mean_online_ratio() const {
  return mean_of(ratios, [](const RatioRow& r) { return r.minibatch_online_ratio; });
}

double RunMetrics::mean_buffer_fraction() const {
  return mean_of(ratios, [](const RatioRow& r) { return r.buffer_online_fraction; });
}

Dataset load_or_generate_dataset(const RunConfig& cfg) {
  const EnvSpec& spec = env_spec(cfg.env);
  if (cfg.dataset_path) {
    Dataset d = dataset_load(*cfg.dataset_path);
    if (d.state_dim != spec.state_dim || d.action_dim != spec.action_dim) {
      throw std::invalid_argument("dataset " + cfg.dataset_path->string() + " does not match env " + spec.name);
    }
    return d;
  }
  DatasetTierSpec tier;
  tier.tier = cfg.tier;
  tier.episodes = static_cast<std::size_t>(std::max<std::int64_t>(cfg.dataset_episodes, 0));
  tier.min_transitions = static_cast<std::size_t>(std::max<std::int64_t>(cfg.dataset_min_transitions, 0));
  Rng rng(cfg.data_seed);
  return generate_dataset(spec, tier, rng);
}

PretrainResult pretrain_agent(const RunConfig& cfg, std::uint64_t seed, const Dataset& offline) {
  if (offline.empty()) throw std::invalid_argument("pretrain: offline dataset is empty");
  Rng init = stream_rng(seed, Stream::Init);
  Rng rng = stream_rng(seed, Stream::Pretrain);
  PretrainResult result{RunAgent(offline.state_dim, offline.action_dim, cfg.agent, init), {}};
  const auto batch = static_cast<std::size_t>(cfg.schedule.batch_size);
  LossAccumulator acc;
  for (std::int64_t k = 1; k <= cfg.schedule.n_pretrain; ++k) {
    const auto indices = sample_uniform(offline, batch, rng);
    acc.add(result.agent.update(gather<double>(offline.transitions, indices)));
    if (k % kPretrainLogEvery == 0 || k == cfg.schedule.n_pretrain) result.losses.push_back(acc.take("pretrain", k));
  }
  return result;
}

RunMetrics run_seed(const RunConfig& cfg, std::uint64_t seed, const Dataset& offline, const RunOptions& options) {
  cfg.validate();
  validate(offline);
  const EnvSpec& spec = env_spec(cfg.env);
  const Schedule& sch = cfg.schedule;

  RunMetrics metrics;
  metrics.seed = seed;

  CsvWriter eval_csv, ratio_csv, loss_csv;
  if (options.out_dir) {
    std::filesystem::create_directories(*options.out_dir);
    std::ofstream(*options.out_dir / "config.txt") << cfg.to_text() << "run_seed = " << seed << "\n";
    eval_csv = CsvWriter(*options.out_dir / "eval.csv", {"step", "mean_return", "normalized_score"});
    if (sch.n_interaction > 0) {
      ratio_csv = CsvWriter(*options.out_dir / "online_ratio.csv",
                            {"step", "minibatch_online_ratio", "buffer_online_fraction", "p_max", "weight_sum",
                             "weight_mean", "weight_min", "weight_max"});
    }
    loss_csv = CsvWriter(*options.out_dir / "losses.csv",
                         {"phase", "step", "v_loss", "q_loss", "policy_loss", "eval_return"});
  }
  auto log_eval = [&](const EvalRow& r) {
    metrics.evals.push_back(r);
    if (eval_csv.is_open()) {
      eval_csv.row({std::to_string(r.step), csv_cell(r.mean_return), csv_cell(r.normalized_score)});
    }
    if (options.log) *options.log << "seed " << seed << " step " << r.step << " score " << r.normalized_score << "\n";
  };
  auto log_loss = [&](const LossRow& r) {
    metrics.losses.push_back(r);
    if (loss_csv.is_open()) loss_csv.row(loss_cells(r));
  };

  // Phase 1
  PretrainResult local;
  const PretrainResult* pre = options.pretrained;
  if (!pre) {
    local = pretrain_agent(cfg, seed, offline);
    pre = &local;
  }
  for (const LossRow& r : pre->losses) log_loss(r);
  RunAgent agent = pre->agent;
  const RunAgent* behavior = options.freeze_behavior ? &pre->agent : &agent;
  log_eval(run_eval(agent, spec, cfg, seed, 0));

  // Phase 2
  if (sch.n_interaction > 0) {
    std::optional<std::size_t> capacity;
    if (cfg.capacity > 0) capacity = static_cast<std::size_t>(cfg.capacity);
    ReplayBuffer buffer(offline, cfg.strategy, capacity);
    const bool reweights = cfg.strategy.kind == BufferStrategy::Kind::Arb;
    const ReplayBuffer::BatchLogpFn logp = [&agent](const Eigen::MatrixXd& s, const Eigen::MatrixXd& a) {
      return Eigen::VectorXd(agent.policy().log_prob(s, a));
    };

    auto env = make_env(spec.name);
    Rng env_rng = stream_rng(seed, Stream::Env);
    Rng policy_rng = stream_rng(seed, Stream::Policy);
    Rng buffer_rng = stream_rng(seed, Stream::Buffer);
    Eigen::VectorXd state = env->reset(env_rng);

    double ratio_sum = 0.0;
    std::int64_t ratio_count = 0;
    LossAccumulator acc;
    const auto batch = static_cast<std::size_t>(sch.batch_size);

    for (std::int64_t e = 1; e <= sch.n_interaction; ++e) {
      const Eigen::VectorXd action = behavior->policy().sample(state, policy_rng);
      StepResult step = env->step(action);
      Transition t{state, action, step.reward, step.next_state, step.terminated, Origin::Online, 0};
      buffer.push(t, step.episode_end());
      if (options.on_step) options.on_step(e, buffer.transitions().back());
      state = step.episode_end() ? env->reset(env_rng) : std::move(step.next_state);
      ++metrics.env_steps;

      if (reweights && e % sch.d_weight == 0) buffer.reweight_batched(logp);

      if (e % sch.d_update == 0) {
        for (std::int64_t k = 0; k < sch.n_update; ++k) {
          const Minibatch mb = buffer.sample(batch, buffer_rng);
          ratio_sum += mb.origin_online_fraction;
          ++ratio_count;
          acc.add(agent.update(buffer.gather<double>(mb)));
          ++metrics.online_updates;
        }
      }

      if (e % sch.d_weight == 0) {
        const BufferStats s = buffer.stats();
        const double ratio = ratio_count ? ratio_sum / static_cast<double>(ratio_count) : kNaN;
        ratio_sum = 0.0;
        ratio_count = 0;
        const RatioRow row{e, ratio, s.online_fraction, s.p_max, s.weight_sum, s.weight_mean, s.weight_min, s.weight_max};
        metrics.ratios.push_back(row);
        if (ratio_csv.is_open()) {
          ratio_csv.row({std::to_string(e), csv_cell(ratio), csv_cell(row.buffer_online_fraction), csv_cell(row.p_max),
                         csv_cell(row.weight_sum), csv_cell(row.weight_mean), csv_cell(row.weight_min),
                         csv_cell(row.weight_max)});
        }
      }

      const bool evaluate_now = e % sch.eval_every == 0 || e == sch.n_interaction;
      double eval_return = kNaN;
      if (evaluate_now) {
        const EvalRow r = run_eval(agent, spec, cfg, seed, e);
        eval_return = r.mean_return;
        log_eval(r);
      }
      if (e % sch.d_update == 0) {
        LossRow row = acc.take("online", e);
        row.eval_return = eval_return;
        log_loss(row);
      }
    }
    metrics.reweight_passes = buffer.reweight_passes();
  }

  if (options.out_dir) agent.to_checkpoint().save(*options.out_dir / "checkpoint.txt");
  return metrics;
}

std::vector<RunMetrics> run(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  const Dataset offline = load_or_generate_dataset(cfg);
  std::vector<RunMetrics> out;
  for (std::uint64_t seed : cfg.seeds) {
    RunOptions options;
    options.out_dir = cfg.out_dir / ("seed_" + std::to_string(seed));
    options.log = log;
    out.push_back(run_seed(cfg, seed, offline, options));
  }
  return out;
}

}  // namespace arb
