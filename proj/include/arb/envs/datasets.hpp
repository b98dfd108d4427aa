#ifndef ARB_ENVS_DATASETS_HPP
#define ARB_ENVS_DATASETS_HPP

#include <string_view>

#include "arb/core/types.hpp"
#include "arb/envs/env.hpp"

namespace arb {

/// Behavior policies per tier (episode k counts from 0):
///  Random        uniform actions over the action box
///  Medium        50/50 episode mixture: expert on even k, random on odd k
///  MediumReplay  expert + Gaussian noise whose scale (in half-ranges) falls
///                linearly from replay_noise_start to replay_noise_end
///  Expert        scripted expert
///  MediumExpert  Medium episodes on even k, expert episodes on odd k
///
/// Generation stops after `episodes` episodes, or, when min_transitions > 0,
/// at the first episode boundary with at least that many transitions.
struct DatasetTierSpec {
  Tier tier = Tier::Random;
  std::size_t episodes = 200;
  std::size_t min_transitions = 0;
  double replay_noise_start = 2.0;
  double replay_noise_end = 0.1;
};

/// Normalized-score band the mean episode return of a tier must fall in.
struct TierBand {
  double lo;
  double hi;
};
TierBand tier_band(Tier tier);

/// Rolls out the tier's behavior policy. The result is checked against
/// tier_band(); on a miss it is regenerated from the continuing rng stream,
/// and after three misses std::runtime_error is thrown.
Dataset generate_dataset(const EnvSpec& env, const DatasetTierSpec& spec, Rng& rng);
Dataset generate_dataset(std::string_view env_name, const DatasetTierSpec& spec, Rng& rng);

}  // namespace arb

#endif  // ARB_ENVS_DATASETS_HPP
