#include "arb/buffer/replay_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace arb {

std::string_view to_string(BufferStrategy::Kind kind) {
  switch (kind) {
    case BufferStrategy::Kind::Arb: return "arb";
    case BufferStrategy::Kind::Naive: return "naive";
    case BufferStrategy::Kind::Parallel: return "parallel";
    case BufferStrategy::Kind::TopN: return "topn";
  }
  return "naive";
}

BufferStrategy::Kind parse_strategy_kind(std::string_view name) {
  for (auto k : {BufferStrategy::Kind::Arb, BufferStrategy::Kind::Naive, BufferStrategy::Kind::Parallel,
                 BufferStrategy::Kind::TopN}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown buffer strategy '" + std::string(name) + "'");
}

std::string_view to_string(SamplingMode mode) {
  return mode == SamplingMode::Flat ? "flat" : "two-stage";
}

SamplingMode parse_sampling_mode(std::string_view name) {
  if (name == "flat") return SamplingMode::Flat;
  if (name == "two-stage") return SamplingMode::TwoStage;
  throw std::invalid_argument("unknown sampling mode '" + std::string(name) + "'");
}

std::string_view to_string(WeightLevel level) {
  return level == WeightLevel::Trajectory ? "trajectory" : "transition";
}

WeightLevel parse_weight_level(std::string_view name) {
  if (name == "trajectory") return WeightLevel::Trajectory;
  if (name == "transition") return WeightLevel::Transition;
  throw std::invalid_argument("unknown weight level '" + std::string(name) + "'");
}

std::string BufferStrategy::name() const {
  switch (kind) {
    case Kind::TopN: return "topn(" + std::to_string(top_n) + ")";
    default: return std::string(to_string(kind));
  }
}

void BufferStrategy::validate() const {
  if (kind == Kind::TopN && top_n < 1) throw std::invalid_argument("TopN requires n >= 1");
  if (kind == Kind::Arb) onpolicy.validate();
}

ReplayBuffer::ReplayBuffer(Index state_dim, Index action_dim, BufferStrategy strategy,
                           std::optional<std::size_t> capacity)
    : state_dim_(state_dim), action_dim_(action_dim), strategy_(strategy), capacity_(capacity) {
  strategy_.validate();
  if (state_dim < 1 || action_dim < 1) throw std::invalid_argument("ReplayBuffer: dimensions must be >= 1");
}

ReplayBuffer::ReplayBuffer(const Dataset& offline, BufferStrategy strategy, std::optional<std::size_t> capacity)
    : ReplayBuffer(offline.state_dim, offline.action_dim, strategy, capacity) {
  validate(offline);
  ingest_offline(offline);
}

void ReplayBuffer::ingest_offline(const Dataset& offline) {
  std::vector<std::size_t> keep(offline.trajectories.size());
  std::iota(keep.begin(), keep.end(), 0);

  if (strategy_.kind == BufferStrategy::Kind::TopN) {
    if (strategy_.top_n >= keep.size()) {
      if (strategy_.top_n > keep.size()) {
        warnings_.push_back("TopN: n=" + std::to_string(strategy_.top_n) + " exceeds " +
                            std::to_string(keep.size()) + " offline trajectories; keeping all");
        std::clog << "warning: " << warnings_.back() << '\n';
      }
    } else {
      const auto returns = offline.trajectory_returns();
      std::stable_sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
        if (returns[a] != returns[b]) return returns[a] > returns[b];
        return offline.trajectories[a].id < offline.trajectories[b].id;
      });
      keep.resize(strategy_.top_n);
      std::sort(keep.begin(), keep.end());
    }
  }

  for (std::size_t k : keep) {
    const Trajectory& src = offline.trajectories[k];
    Trajectory traj;
    traj.id = static_cast<std::int64_t>(trajectories_.size());
    for (std::size_t i : src.transition_indices) {
      Transition t = offline.transitions[i];
      t.origin = Origin::Offline;
      t.traj_id = traj.id;
      traj.transition_indices.push_back(transitions_.size());
      offline_indices_.push_back(transitions_.size());
      transitions_.push_back(std::move(t));
    }
    trajectories_.push_back(std::move(traj));
  }
  offline_count_ = transitions_.size();
  clipped_logps_.assign(transitions_.size(), std::numeric_limits<double>::quiet_NaN());
  transition_weights_.assign(transitions_.size(), 1.0);
  sampler_dirty_ = true;
}

void ReplayBuffer::push(Transition t, bool episode_end) {
  if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_ || t.action.size() != action_dim_) {
    throw std::invalid_argument("ReplayBuffer::push: dimension mismatch");
  }
  if (!open_traj_) {
    Trajectory traj;
    traj.id = static_cast<std::int64_t>(trajectories_.size());
    trajectories_.push_back(std::move(traj));
    open_traj_ = trajectories_.size() - 1;
  }
  Trajectory& traj = trajectories_[*open_traj_];
  t.origin = Origin::Online;
  t.traj_id = traj.id;
  traj.transition_indices.push_back(transitions_.size());
  online_indices_.push_back(transitions_.size());
  transitions_.push_back(std::move(t));
  clipped_logps_.push_back(std::numeric_limits<double>::quiet_NaN());
  transition_weights_.push_back(1.0);
  ++online_count_;
  if (episode_end) open_traj_.reset();
  sampler_dirty_ = true;
  evict_if_needed();
}

void ReplayBuffer::evict_if_needed() {
  if (!capacity_ || transitions_.size() <= *capacity_) return;

  std::vector<bool> drop(trajectories_.size(), false);
  std::size_t remaining = transitions_.size();
  for (std::size_t k = 0; k < trajectories_.size() && remaining > *capacity_; ++k) {
    const Trajectory& traj = trajectories_[k];
    const bool online = transitions_[traj.transition_indices.front()].origin == Origin::Online;
    if (!online || (open_traj_ && *open_traj_ == k)) continue;
    drop[k] = true;
    remaining -= traj.length();
  }
  if (remaining == transitions_.size()) return;

  std::vector<Transition> transitions;
  std::vector<Trajectory> trajectories;
  std::vector<double> clipped;
  std::vector<double> tweights;
  transitions.reserve(remaining);
  clipped.reserve(remaining);
  tweights.reserve(remaining);
  std::optional<std::size_t> open;
  offline_indices_.clear();
  online_indices_.clear();
  online_count_ = 0;
  for (std::size_t k = 0; k < trajectories_.size(); ++k) {
    if (drop[k]) continue;
    Trajectory traj = trajectories_[k];
    traj.id = static_cast<std::int64_t>(trajectories.size());
    if (open_traj_ && *open_traj_ == k) open = trajectories.size();
    for (std::size_t& i : traj.transition_indices) {
      Transition t = std::move(transitions_[i]);
      t.traj_id = traj.id;
      (t.origin == Origin::Online ? online_indices_ : offline_indices_).push_back(transitions.size());
      if (t.origin == Origin::Online) ++online_count_;
      clipped.push_back(clipped_logps_[i]);
      tweights.push_back(transition_weights_[i]);
      i = transitions.size();
      transitions.push_back(std::move(t));
    }
    trajectories.push_back(std::move(traj));
  }
  transitions_ = std::move(transitions);
  trajectories_ = std::move(trajectories);
  clipped_logps_ = std::move(clipped);
  transition_weights_ = std::move(tweights);
  open_traj_ = open;
  sampler_dirty_ = true;
}

bool ReplayBuffer::transition_level() const {
  return strategy_.onpolicy.level == WeightLevel::Transition;
}

void ReplayBuffer::reweight(const LogpFn& logp) {
  std::vector<double> raw(transitions_.size());
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    raw[i] = logp(transitions_[i].state, transitions_[i].action);
  }
  commit_reweight(raw);
}

void ReplayBuffer::reweight_batched(const BatchLogpFn& logp, Index chunk) {
  if (chunk < 1) throw std::invalid_argument("reweight_batched: chunk must be >= 1");
  std::vector<double> raw(transitions_.size());
  const auto n = static_cast<Index>(transitions_.size());
  Eigen::MatrixXd states;
  Eigen::MatrixXd actions;
  for (Index start = 0; start < n; start += chunk) {
    const Index count = std::min(chunk, n - start);
    states.resize(state_dim_, count);
    actions.resize(action_dim_, count);
    for (Index j = 0; j < count; ++j) {
      const Transition& t = transitions_[static_cast<std::size_t>(start + j)];
      states.col(j) = t.state;
      actions.col(j) = t.action;
    }
    const Eigen::VectorXd values = logp(states, actions);
    if (values.size() != count) throw std::runtime_error("reweight_batched: log-density returned wrong size");
    for (Index j = 0; j < count; ++j) raw[static_cast<std::size_t>(start + j)] = values(j);
  }
  commit_reweight(raw);
}

void ReplayBuffer::commit_reweight(const std::vector<double>& raw) {
  if (strategy_.kind != BufferStrategy::Kind::Arb) {
    throw std::logic_error("ReplayBuffer::reweight: strategy " + strategy_.name() + " has no weights");
  }
  if (transitions_.empty()) return;
  const OnPolicyConfig& cfg = strategy_.onpolicy;

  std::vector<double> clipped(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i])) {
      throw std::domain_error("reweight: non-finite log-likelihood for transition " + std::to_string(i) +
                              " (trajectory " + std::to_string(transitions_[i].traj_id) + ")");
    }
    clipped[i] = clipped_logp(raw[i], cfg, action_dim_);
  }
  const double p_max = *std::max_element(clipped.begin(), clipped.end());

  std::vector<double> traj_weights(trajectories_.size());
  std::vector<double> traj_sums(trajectories_.size());
  for (std::size_t k = 0; k < trajectories_.size(); ++k) {
    double sum = 0.0;
    double shifted = 0.0;
    for (std::size_t i : trajectories_[k].transition_indices) {
      sum += clipped[i];
      shifted += clipped[i] - p_max;
    }
    traj_sums[k] = sum;
    traj_weights[k] = weight_from_shifted_sum(shifted, trajectories_[k].length(), cfg);
  }
  std::vector<double> tweights(clipped.size(), 1.0);
  if (transition_level()) {
    for (std::size_t i = 0; i < clipped.size(); ++i) tweights[i] = transition_weight(clipped[i], p_max, cfg);
  }

  // Nothing below throws; the pass becomes visible all at once.
  for (std::size_t k = 0; k < trajectories_.size(); ++k) {
    trajectories_[k].cached_logp_sum = traj_sums[k];
    trajectories_[k].weight = traj_weights[k];
  }
  clipped_logps_ = std::move(clipped);
  transition_weights_ = std::move(tweights);
  p_max_ = p_max;
  ++reweight_passes_;
  sampler_dirty_ = true;
}

void ReplayBuffer::rebuild_sampler() {
  std::vector<double> weights;
  if (transition_level()) {
    weights = transition_weights_;
  } else {
    weights.reserve(trajectories_.size());
    for (const Trajectory& traj : trajectories_) {
      const double len = strategy_.mode == SamplingMode::Flat ? static_cast<double>(traj.length()) : 1.0;
      weights.push_back(traj.weight * len);
    }
  }
  sampler_ = AliasTable(weights);
  sampler_dirty_ = false;
}

std::size_t ReplayBuffer::draw_arb(Rng& rng) const {
  const std::size_t picked = sampler_.sample(rng);
  if (transition_level()) return picked;
  const auto& members = trajectories_[picked].transition_indices;
  return members[static_cast<std::size_t>(rng.uniform_int(members.size()))];
}

Minibatch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) {
  if (transitions_.empty()) throw std::logic_error("ReplayBuffer::sample: buffer is empty");
  if (batch_size == 0) throw std::invalid_argument("ReplayBuffer::sample: batch_size must be >= 1");
  Minibatch batch;
  batch.indices.resize(batch_size);

  switch (strategy_.kind) {
    case BufferStrategy::Kind::Naive:
    case BufferStrategy::Kind::TopN:
      for (auto& i : batch.indices) i = static_cast<std::size_t>(rng.uniform_int(transitions_.size()));
      break;
    case BufferStrategy::Kind::Parallel: {
      std::size_t n_offline = (batch_size + 1) / 2;
      if (online_indices_.empty()) n_offline = batch_size;
      if (offline_indices_.empty()) n_offline = 0;
      for (std::size_t j = 0; j < batch_size; ++j) {
        const auto& pool = j < n_offline ? offline_indices_ : online_indices_;
        batch.indices[j] = pool[static_cast<std::size_t>(rng.uniform_int(pool.size()))];
      }
      break;
    }
    case BufferStrategy::Kind::Arb:
      if (sampler_dirty_) rebuild_sampler();
      for (auto& i : batch.indices) i = draw_arb(rng);
      break;
  }

  std::size_t online = 0;
  for (std::size_t i : batch.indices) online += transitions_[i].origin == Origin::Online ? 1 : 0;
  batch.origin_online_fraction = static_cast<double>(online) / static_cast<double>(batch_size);
  return batch;
}

double ReplayBuffer::online_fraction() const {
  if (transitions_.empty()) throw std::logic_error("online_fraction: buffer is empty");
  return static_cast<double>(online_count_) / static_cast<double>(transitions_.size());
}

std::vector<double> ReplayBuffer::sampling_distribution() const {
  const std::size_t n = transitions_.size();
  std::vector<double> p(n, 0.0);
  if (n == 0) return p;
  switch (strategy_.kind) {
    case BufferStrategy::Kind::Naive:
    case BufferStrategy::Kind::TopN:
      std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(n));
      break;
    case BufferStrategy::Kind::Parallel: {
      double offline_mass = 0.5;
      if (online_indices_.empty()) offline_mass = 1.0;
      if (offline_indices_.empty()) offline_mass = 0.0;
      for (std::size_t i : offline_indices_) p[i] = offline_mass / static_cast<double>(offline_indices_.size());
      for (std::size_t i : online_indices_) p[i] = (1.0 - offline_mass) / static_cast<double>(online_indices_.size());
      break;
    }
    case BufferStrategy::Kind::Arb: {
      double total = 0.0;
      if (transition_level()) {
        for (std::size_t i = 0; i < n; ++i) total += (p[i] = transition_weights_[i]);
      } else {
        for (const Trajectory& traj : trajectories_) {
          const double len = static_cast<double>(traj.length());
          const double traj_mass = strategy_.mode == SamplingMode::Flat ? traj.weight * len : traj.weight;
          for (std::size_t i : traj.transition_indices) p[i] = traj_mass / len;
          total += traj_mass;
        }
      }
      for (double& v : p) v /= total;
      break;
    }
  }
  return p;
}

BufferStats ReplayBuffer::stats() const {
  BufferStats s;
  s.p_max = p_max_;
  if (transitions_.empty()) return s;
  s.online_fraction = online_fraction();
  s.weight_min = std::numeric_limits<double>::infinity();
  s.weight_max = -std::numeric_limits<double>::infinity();
  for (const Trajectory& traj : trajectories_) {
    s.weight_sum += traj.weight;
    s.weight_min = std::min(s.weight_min, traj.weight);
    s.weight_max = std::max(s.weight_max, traj.weight);
  }
  s.weight_mean = s.weight_sum / static_cast<double>(trajectories_.size());
  return s;
}

}  // namespace arb
