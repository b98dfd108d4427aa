#include "arb/envs/datasets.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace arb {

TierBand tier_band(Tier tier) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (tier) {
    case Tier::Random: return {-inf, 20.0};
    case Tier::Medium: return {20.0, 80.0};
    case Tier::Expert: return {80.0, inf};
    case Tier::MediumReplay:
    case Tier::MediumExpert: return {20.0, inf};
    case Tier::Custom: return {-inf, inf};
  }
  return {-inf, inf};
}

namespace {

Dataset generate_once(const EnvSpec& spec, const DatasetTierSpec& tier, Rng& rng) {
  auto env = make_env(spec.name);
  Dataset d(spec.state_dim, spec.action_dim, tier.tier);
  const ActionFn random = random_policy(spec);
  const ActionFn expert = expert_policy(spec);
  const std::size_t n = tier.episodes;
  std::size_t medium_episodes = 0;
  auto medium = [&]() -> const ActionFn& { return medium_episodes++ % 2 == 0 ? expert : random; };

  auto more = [&](std::size_t k) { return tier.min_transitions > 0 ? d.size() < tier.min_transitions : k < n; };
  for (std::size_t k = 0; more(k); ++k) {
    ActionFn noisy;
    const ActionFn* policy = nullptr;
    switch (tier.tier) {
      case Tier::Random: policy = &random; break;
      case Tier::Expert: policy = &expert; break;
      case Tier::Medium: policy = &medium(); break;
      case Tier::MediumExpert: policy = k % 2 == 0 ? &medium() : &expert; break;
      case Tier::MediumReplay: {
        const double frac = n > 1 ? std::min(1.0, static_cast<double>(k) / static_cast<double>(n - 1)) : 1.0;
        noisy = noisy_expert_policy(spec, tier.replay_noise_start + frac * (tier.replay_noise_end - tier.replay_noise_start));
        policy = &noisy;
        break;
      }
      case Tier::Custom: throw std::invalid_argument("generate_dataset: custom tier has no behavior policy");
    }
    Episode ep = rollout(*env, *policy, rng);
    d.append_trajectory(ep.steps);
  }
  return d;
}

}  // namespace

Dataset generate_dataset(const EnvSpec& spec, const DatasetTierSpec& tier, Rng& rng) {
  if (tier.episodes == 0 && tier.min_transitions == 0) throw std::invalid_argument("generate_dataset: need at least one episode");
  const TierBand band = tier_band(tier.tier);
  double score = 0.0;
  for (int attempt = 0; attempt < 3; ++attempt) {
    Dataset d = generate_once(spec, tier, rng);
    score = normalized_score(spec, d.mean_trajectory_return());
    if (score >= band.lo && score <= band.hi) return d;
  }
  std::ostringstream msg;
  msg << "generate_dataset: " << to_string(tier.tier) << " data on " << spec.name << " scored " << score
      << ", outside [" << band.lo << ", " << band.hi << "] after 3 attempts";
  throw std::runtime_error(msg.str());
}

Dataset generate_dataset(std::string_view env_name, const DatasetTierSpec& tier, Rng& rng) {
  return generate_dataset(env_spec(env_name), tier, rng);
}

}  // namespace arb
