#include "arb/envs/env.hpp"

#include <stdexcept>

#include "arb/envs/pendulum.hpp"
#include "arb/envs/point_mass.hpp"

namespace arb {

double normalized_score(const EnvSpec& spec, double episode_return) {
  return 100.0 * (episode_return - spec.return_random) / (spec.return_expert - spec.return_random);
}

Eigen::VectorXd Env::reset(Rng& rng) {
  steps_ = 0;
  done_ = false;
  return do_reset(rng);
}

Eigen::VectorXd Env::clip_action(const Eigen::VectorXd& action) const {
  if (action.size() != spec_.action_dim) {
    throw std::invalid_argument(spec_.name + ": action has " + std::to_string(action.size()) +
                                " dims, expected " + std::to_string(spec_.action_dim));
  }
  return action.cwiseMax(spec_.action_low).cwiseMin(spec_.action_high);
}

StepResult Env::step(const Eigen::VectorXd& action) {
  if (done_) throw std::logic_error(spec_.name + ": step called on a finished episode; call reset first");
  if (!action.allFinite()) throw std::invalid_argument(spec_.name + ": non-finite action");
  Outcome out = dynamics(clip_action(action));
  ++steps_;
  StepResult r{std::move(out.next_state), out.reward, out.terminated, false};
  r.truncated = !r.terminated && steps_ >= spec_.horizon;
  done_ = r.episode_end();
  return r;
}

const std::vector<EnvSpec>& env_registry() {
  static const std::vector<EnvSpec> registry{PointMass::make_spec(), Pendulum::make_spec()};
  return registry;
}

const EnvSpec& env_spec(std::string_view name) {
  for (const EnvSpec& spec : env_registry()) {
    if (spec.name == name) return spec;
  }
  throw std::invalid_argument("unknown environment '" + std::string(name) + "'");
}

std::unique_ptr<Env> make_env(std::string_view name) {
  if (name == "point-mass") return std::make_unique<PointMass>();
  if (name == "pendulum") return std::make_unique<Pendulum>();
  throw std::invalid_argument("unknown environment '" + std::string(name) + "'");
}

ActionFn random_policy(const EnvSpec& spec) {
  return [low = spec.action_low, high = spec.action_high](const Eigen::VectorXd&, Rng& rng) {
    Eigen::VectorXd a(low.size());
    for (Index j = 0; j < a.size(); ++j) a(j) = rng.uniform(low(j), high(j));
    return a;
  };
}

ActionFn expert_policy(const EnvSpec& spec) {
  if (spec.name == "point-mass") return [](const Eigen::VectorXd& s, Rng&) { return point_mass_expert(s); };
  if (spec.name == "pendulum") return [](const Eigen::VectorXd& s, Rng&) { return pendulum_expert(s); };
  throw std::invalid_argument("no scripted expert for '" + spec.name + "'");
}

ActionFn noisy_expert_policy(const EnvSpec& spec, double noise) {
  return [expert = expert_policy(spec), half = Eigen::VectorXd(0.5 * (spec.action_high - spec.action_low)),
          noise](const Eigen::VectorXd& s, Rng& rng) {
    Eigen::VectorXd a = expert(s, rng);
    for (Index j = 0; j < a.size(); ++j) a(j) += noise * half(j) * rng.normal();
    return a;
  };
}

Episode rollout(Env& env, const ActionFn& policy, Rng& rng) {
  Episode ep;
  Eigen::VectorXd state = env.reset(rng);
  while (!env.done()) {
    Transition t;
    t.action = env.clip_action(policy(state, rng));
    StepResult r = env.step(t.action);
    t.state = std::move(state);
    t.reward = r.reward;
    t.next_state = r.next_state;
    t.done = r.terminated;
    ep.episode_return += r.reward;
    state = std::move(r.next_state);
    ep.steps.push_back(std::move(t));
  }
  return ep;
}

}  // namespace arb

namespace arb {

ReferenceReturns measure_reference_returns(const EnvSpec& spec, int episodes) {
  if (episodes < 1) throw std::invalid_argument("measure_reference_returns: episodes must be >= 1");
  auto env = make_env(spec.name);
  auto mean_return = [&](const ActionFn& policy, std::uint64_t seed) {
    Rng rng(seed);
    double total = 0.0;
    for (int k = 0; k < episodes; ++k) total += rollout(*env, policy, rng).episode_return;
    return total / episodes;
  };
  return {mean_return(random_policy(spec), spec.reference_seed),
          mean_return(expert_policy(spec), spec.reference_seed + 1)};
}

}  // namespace arb
