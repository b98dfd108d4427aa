#ifndef ARB_ENVS_ENV_HPP
#define ARB_ENVS_ENV_HPP

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "arb/core/rng.hpp"
#include "arb/core/types.hpp"

namespace arb {

/// Static description of an environment, including the reference returns
/// used for score normalization.
struct EnvSpec {
  std::string name;
  Index state_dim = 0;
  Index action_dim = 0;
  Eigen::VectorXd action_low;
  Eigen::VectorXd action_high;
  int horizon = 0;
  double return_random = 0.0;
  double return_expert = 0.0;
  /// Seed and episode count of the rollouts that produced the references.
  std::uint64_t reference_seed = 0;
  int reference_episodes = 0;
};

/// 100 * (R - R_random) / (R_expert - R_random)
double normalized_score(const EnvSpec& spec, double episode_return);

struct StepResult {
  Eigen::VectorXd next_state;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;

  bool episode_end() const { return terminated || truncated; }
};

/// Episodic environment. Actions are clipped to the box before the dynamics
/// see them; an episode ends on the terminal predicate or at the horizon.
class Env {
 public:
  explicit Env(EnvSpec spec) : spec_(std::move(spec)) {}
  virtual ~Env() = default;

  const EnvSpec& spec() const { return spec_; }

  Eigen::VectorXd reset(Rng& rng);
  StepResult step(const Eigen::VectorXd& action);

  bool done() const { return done_; }
  int steps() const { return steps_; }
  Eigen::VectorXd clip_action(const Eigen::VectorXd& action) const;

  virtual std::unique_ptr<Env> clone() const = 0;

 protected:
  struct Outcome {
    Eigen::VectorXd next_state;
    double reward;
    bool terminated;
  };
  virtual Eigen::VectorXd do_reset(Rng& rng) = 0;
  virtual Outcome dynamics(const Eigen::VectorXd& clipped_action) = 0;

 private:
  EnvSpec spec_;
  int steps_ = 0;
  bool done_ = true;
};

/// Action rule used by data generation and reference rollouts.
using ActionFn = std::function<Eigen::VectorXd(const Eigen::VectorXd& state, Rng& rng)>;

const std::vector<EnvSpec>& env_registry();
const EnvSpec& env_spec(std::string_view name);
std::unique_ptr<Env> make_env(std::string_view name);

ActionFn random_policy(const EnvSpec& spec);
ActionFn expert_policy(const EnvSpec& spec);
/// Expert action plus N(0, (noise * half-range)^2) per dimension.
ActionFn noisy_expert_policy(const EnvSpec& spec, double noise);

struct Episode {
  std::vector<Transition> steps;
  double episode_return = 0.0;
};

/// Runs one episode. Stored actions are the clipped, executed ones.
Episode rollout(Env& env, const ActionFn& policy, Rng& rng);

struct ReferenceReturns {
  double random = 0.0;
  double expert = 0.0;
};

/// Re-measures the normalization references: mean return of `episodes`
/// random-policy rollouts seeded with reference_seed, and of expert rollouts
/// seeded with reference_seed + 1.
ReferenceReturns measure_reference_returns(const EnvSpec& spec, int episodes);

}  // namespace arb

#endif  // ARB_ENVS_ENV_HPP
