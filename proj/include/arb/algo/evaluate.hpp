#ifndef ARB_ALGO_EVALUATE_HPP
#define ARB_ALGO_EVALUATE_HPP

#include <stdexcept>

#include "arb/algo/agent.hpp"
#include "arb/envs/env.hpp"

namespace arb {

struct EvalResult {
  double mean_return = 0.0;
  double normalized_score = 0.0;
};

/// Mean return of `episodes` rollouts with any action rule, plus its normalized score.
inline EvalResult evaluate_policy(Env& env, const ActionFn& policy, int episodes, Rng& rng) {
  if (episodes < 1) throw std::invalid_argument("evaluate: episodes must be >= 1");
  double total = 0.0;
  for (int k = 0; k < episodes; ++k) total += rollout(env, policy, rng).episode_return;
  const double mean = total / episodes;
  return {mean, normalized_score(env.spec(), mean)};
}

/// Rolls out the deterministic mean action mu(s).
template <typename Scalar>
EvalResult evaluate(const Agent<Scalar>& agent, Env& env, int episodes, Rng& rng) {
  const ActionFn act = [&agent](const Eigen::VectorXd& state, Rng&) -> Eigen::VectorXd {
    return agent.policy().mean_action(state.cast<Scalar>()).template cast<double>();
  };
  return evaluate_policy(env, act, episodes, rng);
}

}  // namespace arb

#endif  // ARB_ALGO_EVALUATE_HPP
