#ifndef ARB_BUFFER_REPLAY_BUFFER_HPP
#define ARB_BUFFER_REPLAY_BUFFER_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "arb/buffer/alias_table.hpp"
#include "arb/core/types.hpp"
#include "arb/onpolicy.hpp"

namespace arb {

/// How ARB turns trajectory weights into a per-transition distribution.
///  Flat:     every transition of trajectory k carries weight w_k (default).
///  TwoStage: draw trajectory k with probability w_k / sum(w), then a uniform
///            transition inside it.
enum class SamplingMode { Flat, TwoStage };

struct BufferStrategy {
  enum class Kind { Arb, Naive, Parallel, TopN };

  Kind kind = Kind::Naive;
  OnPolicyConfig onpolicy{};
  SamplingMode mode = SamplingMode::Flat;
  std::size_t top_n = 1;

  static BufferStrategy arb(OnPolicyConfig cfg = {}, SamplingMode mode = SamplingMode::Flat) {
    return {Kind::Arb, cfg, mode, 1};
  }
  static BufferStrategy naive() { return {Kind::Naive, {}, SamplingMode::Flat, 1}; }
  static BufferStrategy parallel() { return {Kind::Parallel, {}, SamplingMode::Flat, 1}; }
  static BufferStrategy top(std::size_t n) { return {Kind::TopN, {}, SamplingMode::Flat, n}; }

  std::string name() const;
  void validate() const;
};

std::string_view to_string(BufferStrategy::Kind kind);
BufferStrategy::Kind parse_strategy_kind(std::string_view name);
std::string_view to_string(SamplingMode mode);
SamplingMode parse_sampling_mode(std::string_view name);
std::string_view to_string(WeightLevel level);
WeightLevel parse_weight_level(std::string_view name);

struct Minibatch {
  std::vector<std::size_t> indices;
  double origin_online_fraction = 0.0;
};

/// Summary of the most recent re-weight pass (or of uniform weights before one).
struct BufferStats {
  double p_max = 0.0;
  double weight_sum = 0.0;
  double online_fraction = 0.0;
  double weight_mean = 0.0;
  double weight_min = 0.0;
  double weight_max = 0.0;
};

/// Offline data plus the online stream, sampled according to a BufferStrategy.
///
/// Offline trajectories are ingested once at construction (after Top-N
/// filtering) and are never evicted. Online transitions are appended to an
/// open trajectory until an episode end closes it. Under ARB, trajectories
/// created after the last re-weight pass carry weight 1; transitions appended
/// to an already weighted open trajectory inherit its weight.
class ReplayBuffer {
 public:
  using LogpFn = std::function<double(const Eigen::VectorXd& state, const Eigen::VectorXd& action)>;
  /// Column-batched log-density: returns one value per column.
  using BatchLogpFn =
      std::function<Eigen::VectorXd(const Eigen::MatrixXd& states, const Eigen::MatrixXd& actions)>;

  ReplayBuffer(const Dataset& offline, BufferStrategy strategy,
               std::optional<std::size_t> capacity = std::nullopt);
  ReplayBuffer(Index state_dim, Index action_dim, BufferStrategy strategy,
               std::optional<std::size_t> capacity = std::nullopt);

  void push(Transition t, bool episode_end);

  /// Recomputes every clipped log-likelihood, p_max and weight. Strong
  /// exception guarantee: on error the previous weights stay in place.
  void reweight(const LogpFn& logp);
  void reweight_batched(const BatchLogpFn& logp, Index chunk = 4096);

  Minibatch sample(std::size_t batch_size, Rng& rng);

  template <typename Scalar>
  TransitionBatch<Scalar> gather(const Minibatch& batch) const {
    return arb::gather<Scalar>(transitions_, batch.indices);
  }

  double online_fraction() const;

  std::size_t size() const { return transitions_.size(); }
  bool empty() const { return transitions_.empty(); }
  std::size_t offline_count() const { return offline_count_; }
  std::size_t online_count() const { return online_count_; }
  Index state_dim() const { return state_dim_; }
  Index action_dim() const { return action_dim_; }
  const BufferStrategy& strategy() const { return strategy_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const std::vector<Trajectory>& trajectories() const { return trajectories_; }
  std::optional<std::size_t> open_trajectory() const { return open_traj_; }
  std::size_t reweight_passes() const { return reweight_passes_; }

  /// Clipped log-likelihood per transition from the last pass (NaN before it).
  const std::vector<double>& clipped_logps() const { return clipped_logps_; }
  /// Per-transition weights used in Transition-level mode.
  const std::vector<double>& transition_weights() const { return transition_weights_; }

  /// Exact probability that one draw returns transition i, given the current
  /// weights. Intended for verification; O(size).
  std::vector<double> sampling_distribution() const;

  BufferStats stats() const;
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  void ingest_offline(const Dataset& offline);
  void commit_reweight(const std::vector<double>& raw_logps);
  void evict_if_needed();
  void rebuild_sampler();
  std::size_t draw_arb(Rng& rng) const;
  bool transition_level() const;

  Index state_dim_;
  Index action_dim_;
  BufferStrategy strategy_;
  std::optional<std::size_t> capacity_;

  std::vector<Transition> transitions_;
  std::vector<Trajectory> trajectories_;
  std::vector<double> clipped_logps_;
  std::vector<double> transition_weights_;
  std::optional<std::size_t> open_traj_;
  std::size_t offline_count_ = 0;
  std::size_t online_count_ = 0;
  std::size_t reweight_passes_ = 0;
  double p_max_ = 0.0;

  std::vector<std::size_t> offline_indices_;
  std::vector<std::size_t> online_indices_;
  AliasTable sampler_;
  bool sampler_dirty_ = true;
  std::vector<std::string> warnings_;
};

inline double online_fraction_of_buffer(const ReplayBuffer& buffer) { return buffer.online_fraction(); }

}  // namespace arb

#endif  // ARB_BUFFER_REPLAY_BUFFER_HPP
