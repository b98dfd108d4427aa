#ifndef ARB_CORE_TYPES_HPP
#define ARB_CORE_TYPES_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "arb/core/rng.hpp"

namespace arb {

using Index = Eigen::Index;

enum class Origin : std::uint8_t { Offline, Online };

enum class Tier { Random, Medium, MediumReplay, Expert, MediumExpert, Custom };

std::string_view to_string(Tier tier);
Tier parse_tier(std::string_view name);

/// One environment step. `done` marks termination only; a time-limit cut ends
/// the trajectory with done == false so the critic still bootstraps.
struct Transition {
  Eigen::VectorXd state;
  Eigen::VectorXd action;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool done = false;
  Origin origin = Origin::Offline;
  std::int64_t traj_id = 0;
};

struct Trajectory {
  std::int64_t id = 0;
  std::vector<std::size_t> transition_indices;
  /// Sum of clipped log-likelihoods under the policy of the last re-weight pass.
  double cached_logp_sum = 0.0;
  double weight = 1.0;

  std::size_t length() const { return transition_indices.size(); }
};

struct Dataset {
  std::vector<Transition> transitions;
  std::vector<Trajectory> trajectories;
  Index state_dim = 0;
  Index action_dim = 0;
  Tier tier = Tier::Custom;

  Dataset() = default;
  Dataset(Index state_dim, Index action_dim, Tier tier = Tier::Custom)
      : state_dim(state_dim), action_dim(action_dim), tier(tier) {}

  std::size_t size() const { return transitions.size(); }
  bool empty() const { return transitions.empty(); }

  /// Appends `steps` as one new trajectory with the next free id.
  void append_trajectory(std::span<const Transition> steps);

  /// Undiscounted return of each trajectory, in trajectory order.
  std::vector<double> trajectory_returns() const;
  double mean_trajectory_return() const;
};

/// Throws std::invalid_argument if dimensions disagree or the trajectories do
/// not partition the transitions into contiguous, id-consistent blocks.
void validate(const Dataset& dataset);

/// True when next_state of every step equals state of its successor, bit for bit.
bool trajectories_chain(const Dataset& dataset);

/// Column-major minibatch: column j is sample j.
template <typename Scalar>
struct TransitionBatch {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix states;
  Matrix actions;
  Vector rewards;
  Matrix next_states;
  Vector dones;

  Index size() const { return states.cols(); }
};

template <typename Scalar>
TransitionBatch<Scalar> gather(std::span<const Transition> transitions,
                               std::span<const std::size_t> indices) {
  TransitionBatch<Scalar> batch;
  const auto n = static_cast<Index>(indices.size());
  if (n == 0) return batch;
  const Transition& first = transitions[indices.front()];
  batch.states.resize(first.state.size(), n);
  batch.actions.resize(first.action.size(), n);
  batch.next_states.resize(first.next_state.size(), n);
  batch.rewards.resize(n);
  batch.dones.resize(n);
  for (Index j = 0; j < n; ++j) {
    const Transition& t = transitions[indices[static_cast<std::size_t>(j)]];
    batch.states.col(j) = t.state.cast<Scalar>();
    batch.actions.col(j) = t.action.cast<Scalar>();
    batch.next_states.col(j) = t.next_state.cast<Scalar>();
    batch.rewards(j) = static_cast<Scalar>(t.reward);
    batch.dones(j) = t.done ? Scalar(1) : Scalar(0);
  }
  return batch;
}

/// Uniform with-replacement minibatch indices over a dataset.
std::vector<std::size_t> sample_uniform(const Dataset& dataset, std::size_t batch_size, Rng& rng);

}  // namespace arb

#endif  // ARB_CORE_TYPES_HPP
