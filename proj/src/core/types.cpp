#include "arb/core/types.hpp"

#include <numeric>
#include <stdexcept>

namespace arb {

std::string_view to_string(Tier tier) {
  switch (tier) {
    case Tier::Random: return "random";
    case Tier::Medium: return "medium";
    case Tier::MediumReplay: return "medium-replay";
    case Tier::Expert: return "expert";
    case Tier::MediumExpert: return "medium-expert";
    case Tier::Custom: return "custom";
  }
  return "custom";
}

Tier parse_tier(std::string_view name) {
  for (Tier t : {Tier::Random, Tier::Medium, Tier::MediumReplay, Tier::Expert, Tier::MediumExpert,
                 Tier::Custom}) {
    if (to_string(t) == name) return t;
  }
  throw std::invalid_argument("unknown dataset tier '" + std::string(name) + "'");
}

void Dataset::append_trajectory(std::span<const Transition> steps) {
  if (steps.empty()) throw std::invalid_argument("append_trajectory: empty trajectory");
  Trajectory traj;
  traj.id = trajectories.empty() ? 0 : trajectories.back().id + 1;
  traj.transition_indices.reserve(steps.size());
  for (const Transition& step : steps) {
    traj.transition_indices.push_back(transitions.size());
    Transition& stored = transitions.emplace_back(step);
    stored.traj_id = traj.id;
  }
  trajectories.push_back(std::move(traj));
}

std::vector<double> Dataset::trajectory_returns() const {
  std::vector<double> returns;
  returns.reserve(trajectories.size());
  for (const Trajectory& traj : trajectories) {
    double total = 0.0;
    for (std::size_t i : traj.transition_indices) total += transitions[i].reward;
    returns.push_back(total);
  }
  return returns;
}

double Dataset::mean_trajectory_return() const {
  const auto returns = trajectory_returns();
  if (returns.empty()) return 0.0;
  return std::accumulate(returns.begin(), returns.end(), 0.0) / static_cast<double>(returns.size());
}

void validate(const Dataset& d) {
  std::size_t covered = 0;
  for (std::size_t k = 0; k < d.trajectories.size(); ++k) {
    const Trajectory& traj = d.trajectories[k];
    if (traj.transition_indices.empty()) {
      throw std::invalid_argument("trajectory " + std::to_string(traj.id) + " is empty");
    }
    if (k > 0 && traj.id < d.trajectories[k - 1].id) {
      throw std::invalid_argument("trajectory ids must be nondecreasing");
    }
    for (std::size_t i : traj.transition_indices) {
      if (i != covered) {
        throw std::invalid_argument("trajectories must be contiguous and partition the transitions");
      }
      if (d.transitions[i].traj_id != traj.id) {
        throw std::invalid_argument("transition " + std::to_string(i) + " has traj_id " +
                                    std::to_string(d.transitions[i].traj_id) + ", expected " +
                                    std::to_string(traj.id));
      }
      ++covered;
    }
  }
  if (covered != d.transitions.size()) {
    throw std::invalid_argument("transitions not covered by any trajectory");
  }
  for (std::size_t i = 0; i < d.transitions.size(); ++i) {
    const Transition& t = d.transitions[i];
    if (t.state.size() != d.state_dim || t.next_state.size() != d.state_dim ||
        t.action.size() != d.action_dim) {
      throw std::invalid_argument("transition " + std::to_string(i) + " has mismatched dimensions");
    }
  }
}

bool trajectories_chain(const Dataset& d) {
  for (const Trajectory& traj : d.trajectories) {
    for (std::size_t k = 1; k < traj.transition_indices.size(); ++k) {
      const auto& prev = d.transitions[traj.transition_indices[k - 1]].next_state;
      const auto& cur = d.transitions[traj.transition_indices[k]].state;
      if (prev.size() != cur.size() || !(prev.array() == cur.array()).all()) return false;
    }
  }
  return true;
}

std::vector<std::size_t> sample_uniform(const Dataset& dataset, std::size_t batch_size, Rng& rng) {
  if (dataset.empty()) throw std::invalid_argument("sample_uniform: empty dataset");
  std::vector<std::size_t> indices(batch_size);
  for (auto& i : indices) i = static_cast<std::size_t>(rng.uniform_int(dataset.size()));
  return indices;
}

}  // namespace arb
