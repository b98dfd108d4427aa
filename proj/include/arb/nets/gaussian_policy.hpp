#ifndef ARB_NETS_GAUSSIAN_POLICY_HPP
#define ARB_NETS_GAUSSIAN_POLICY_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "arb/core/rng.hpp"
#include "arb/nets/mlp.hpp"

namespace arb {

/// Diagonal Gaussian over unsquashed actions: mean from an MLP trunk, a
/// state-independent log standard deviation clamped to [log_std_lo, log_std_hi].
template <typename Scalar>
class GaussianPolicy {
 public:
  using Matrix = typename Mlp<Scalar>::Matrix;
  using Vector = typename Mlp<Scalar>::Vector;

  static constexpr Scalar kLogStdLo = Scalar(-5);
  static constexpr Scalar kLogStdHi = Scalar(2);

  struct Gradient {
    Vector trunk;
    Vector log_std;
  };

  GaussianPolicy() = default;

  GaussianPolicy(Eigen::Index state_dim, Eigen::Index action_dim, const std::vector<Eigen::Index>& hidden,
                 Activation activation = Activation::ReLU)
      : log_std_(Vector::Zero(action_dim)) {
    std::vector<Eigen::Index> dims{state_dim};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(action_dim);
    trunk_ = Mlp<Scalar>(dims, activation);
  }

  void init(Rng& rng) {
    trunk_.init_uniform(rng);
    log_std_.setZero();
  }

  Eigen::Index state_dim() const { return trunk_.input_dim(); }
  Eigen::Index action_dim() const { return trunk_.output_dim(); }

  Mlp<Scalar>& trunk() { return trunk_; }
  const Mlp<Scalar>& trunk() const { return trunk_; }
  Vector& raw_log_std() { return log_std_; }
  const Vector& raw_log_std() const { return log_std_; }

  Vector log_std() const { return log_std_.cwiseMax(kLogStdLo).cwiseMin(kLogStdHi); }

  Gradient zero_gradient() const {
    return {Vector::Zero(trunk_.parameter_count()), Vector::Zero(log_std_.size())};
  }

  Matrix mean(const Eigen::Ref<const Matrix>& states) const { return trunk_.forward(states); }

  Vector mean_action(const Vector& state) const { return trunk_.forward(state); }

  /// log pi(a|s) per column.
  Vector log_prob(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Matrix>& actions) const {
    check_actions(states, actions);
    return log_prob_from_mean(trunk_.forward(states), actions);
  }

  Scalar log_prob_one(const Vector& state, const Vector& action) const {
    return log_prob(Matrix(state), Matrix(action))(0);
  }

  /// a = mu(s) + sigma * z with z drawn from `rng`.
  Vector sample(const Vector& state, Rng& rng) const {
    Vector a = mean_action(state);
    const Vector sigma = log_std().array().exp();
    for (Eigen::Index j = 0; j < a.size(); ++j) a(j) += sigma(j) * static_cast<Scalar>(rng.normal());
    return a;
  }

  /// Loss -(1/B) sum_i w_i log pi(a_i|s_i); gradient is added into `grad`.
  Scalar weighted_nll(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Matrix>& actions,
                      const Eigen::Ref<const Vector>& weights, Gradient& grad) const {
    check_actions(states, actions);
    const Eigen::Index batch = states.cols();
    if (weights.size() != batch) throw std::invalid_argument("weighted_nll: weights size mismatch");
    typename Mlp<Scalar>::Tape tape;
    const Matrix mu = trunk_.forward(states, tape);
    const Vector ls = log_std();
    const Vector inv_var = (Scalar(-2) * ls).array().exp();
    const Matrix diff = actions - mu;
    const Vector logp = log_prob_from_mean(mu, actions);
    const Scalar inv_b = Scalar(1) / static_cast<Scalar>(batch);
    const Scalar loss = -inv_b * weights.dot(logp);

    // d logp / d mu = (a - mu) / sigma^2 ; d logp / d log_std = z^2 - 1
    Matrix grad_mu = -(inv_var.asDiagonal() * diff) * (inv_b * weights).asDiagonal();
    trunk_.backward(tape, grad_mu, grad.trunk);
    const Matrix z2 = inv_var.asDiagonal() * diff.cwiseAbs2();
    const Vector dls = -inv_b * ((z2.array() - Scalar(1)).matrix() * weights);
    for (Eigen::Index j = 0; j < ls.size(); ++j) {
      const bool active = log_std_(j) >= kLogStdLo && log_std_(j) <= kLogStdHi;
      if (active) grad.log_std(j) += dls(j);
    }
    return loss;
  }

 private:
  Vector log_prob_from_mean(const Matrix& mu, const Eigen::Ref<const Matrix>& actions) const {
    const Vector ls = log_std();
    const Vector inv_std = (-ls).array().exp();
    const Scalar half_log_2pi = Scalar(0.5) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>);
    const Scalar constant = -ls.sum() - half_log_2pi * static_cast<Scalar>(ls.size());
    const Matrix z = inv_std.asDiagonal() * (actions - mu);
    return (Scalar(-0.5) * z.colwise().squaredNorm().transpose()).array() + constant;
  }

  void check_actions(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Matrix>& actions) const {
    if (actions.rows() != action_dim() || actions.cols() != states.cols()) {
      throw std::invalid_argument("GaussianPolicy: action batch shape mismatch");
    }
  }

  Mlp<Scalar> trunk_;
  Vector log_std_;
};

}  // namespace arb

#endif  // ARB_NETS_GAUSSIAN_POLICY_HPP
