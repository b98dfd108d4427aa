#ifndef ARB_CORE_RNG_HPP
#define ARB_CORE_RNG_HPP

#include <array>
#include <cstdint>
#include <limits>

namespace arb {

/// Advances a SplitMix64 state and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic pseudo-random generator.
///
/// Stream algorithm (fixed so other implementations can reproduce it):
///  - state: xoshiro256** seeded by four consecutive SplitMix64 outputs of `seed`.
///  - uniform(): top 53 bits of the next output times 2^-53, in [0, 1).
///  - uniform_int(n): Lemire's multiply-shift with rejection, unbiased on [0, n).
///  - normal(): Box-Muller on (u1, u2) = (1 - uniform(), uniform()); the cosine
///    branch is returned first and the sine branch is cached for the next call.
///
/// Satisfies UniformRandomBitGenerator, but the member distributions should be
/// preferred over <random> ones, which are not portable across standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  double uniform();
  double uniform(double lo, double hi);
  std::uint64_t uniform_int(std::uint64_t n);
  double normal();

  std::uint64_t seed() const { return seed_; }

 private:
  std::array<std::uint64_t, 4> s_{};
  std::uint64_t seed_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Seed for an independent sub-stream of `seed`, e.g. one per consumer in a run.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace arb

#endif  // ARB_CORE_RNG_HPP
