#ifndef ARB_ONPOLICY_HPP
#define ARB_ONPOLICY_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace arb {

/// Granularity at which on-policyness becomes a sampling weight.
enum class WeightLevel { Trajectory, Transition };

/// Clip window, temperature and normalization for on-policyness weights.
///
/// Defaults: clip window [-12, 7] on the per-action-dimension log-likelihood
/// and temperature 0.5.
struct OnPolicyConfig {
  double p_lo = -12.0;
  double p_hi = 7.0;
  double lambda = 0.5;
  bool normalize_by_action_dim = true;
  WeightLevel level = WeightLevel::Trajectory;

  void validate() const {
    if (!(p_lo < p_hi)) throw std::invalid_argument("OnPolicyConfig: p_lo must be < p_hi");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw std::invalid_argument("OnPolicyConfig: lambda must be finite and > 0");
    }
  }
};

/// clip(raw_logp / d, p_lo, p_hi), with d = action_dim when normalizing and 1
/// otherwise. Division happens before clipping.
template <typename Scalar>
Scalar clipped_logp(Scalar raw_logp, const OnPolicyConfig& cfg, Eigen::Index action_dim) {
  if (action_dim < 1) throw std::invalid_argument("clipped_logp: action_dim must be >= 1");
  if (!std::isfinite(raw_logp)) throw std::domain_error("clipped_logp: non-finite log-likelihood");
  const Scalar scaled =
      cfg.normalize_by_action_dim ? raw_logp / static_cast<Scalar>(action_dim) : raw_logp;
  return std::clamp(scaled, static_cast<Scalar>(cfg.p_lo), static_cast<Scalar>(cfg.p_hi));
}

/// exp(clipped - p_max) elementwise; p_max must bound every input.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> onpolicyness(
    const Eigen::DenseBase<Derived>& clipped, typename Derived::Scalar p_max) {
  if ((clipped.derived().array() > p_max).any()) {
    throw std::invalid_argument("onpolicyness: input exceeds p_max");
  }
  return (clipped.derived().array() - p_max).exp();
}

/// Sampling weight from an already-accumulated sum of (clipped - p_max) over
/// `length` transitions: exp(shifted_sum / (length * lambda)). Floored at the
/// smallest normal value so a weight never underflows to zero.
template <typename Scalar>
Scalar weight_from_shifted_sum(Scalar shifted_sum, std::size_t length, const OnPolicyConfig& cfg) {
  if (length == 0) throw std::invalid_argument("trajectory weight of an empty trajectory");
  const Scalar w = std::exp(shifted_sum / static_cast<Scalar>(length) / static_cast<Scalar>(cfg.lambda));
  return std::max(w, std::numeric_limits<Scalar>::min());
}

/// Geometric mean of on-policyness^(1/lambda) over one trajectory, computed in
/// the log domain: exp( mean_t(clipped_t - p_max) / lambda ). In (0, 1].
template <typename Derived>
typename Derived::Scalar trajectory_weight(const Eigen::DenseBase<Derived>& clipped,
                                           typename Derived::Scalar p_max,
                                           const OnPolicyConfig& cfg) {
  using Scalar = typename Derived::Scalar;
  if (clipped.size() == 0) throw std::invalid_argument("trajectory_weight: empty trajectory");
  if ((clipped.derived().array() > p_max).any()) {
    throw std::invalid_argument("trajectory_weight: input exceeds p_max");
  }
  const Scalar shifted_sum = (clipped.derived().array() - p_max).sum();
  return weight_from_shifted_sum(shifted_sum, static_cast<std::size_t>(clipped.size()), cfg);
}

/// Singleton-trajectory weight: exp((clipped - p_max) / lambda).
template <typename Scalar>
Scalar transition_weight(Scalar clipped, Scalar p_max, const OnPolicyConfig& cfg) {
  if (clipped > p_max) throw std::invalid_argument("transition_weight: input exceeds p_max");
  return weight_from_shifted_sum(clipped - p_max, 1, cfg);
}

}  // namespace arb

#endif  // ARB_ONPOLICY_HPP
