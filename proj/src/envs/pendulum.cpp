#include "arb/envs/pendulum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace arb {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

double wrap_angle(double theta) { return std::fmod(std::fmod(theta + kPi, 2.0 * kPi) + 2.0 * kPi, 2.0 * kPi) - kPi; }

EnvSpec Pendulum::make_spec() {
  EnvSpec spec;
  spec.name = "pendulum";
  spec.state_dim = 3;
  spec.action_dim = 1;
  spec.action_low = Eigen::VectorXd::Constant(1, -kMaxTorque);
  spec.action_high = Eigen::VectorXd::Constant(1, kMaxTorque);
  spec.horizon = kHorizon;
  // Mean returns of 10k reference episodes (`arb ref-returns pendulum`).
  spec.return_random = -1228.4865;
  spec.return_expert = -156.5619;
  spec.reference_seed = 20240602;
  spec.reference_episodes = 10000;
  return spec;
}

Pendulum::Pendulum() : Env(make_spec()) {}

Eigen::VectorXd Pendulum::observe() const {
  Eigen::VectorXd s(3);
  s << std::cos(theta_), std::sin(theta_), theta_dot_;
  return s;
}

Eigen::VectorXd Pendulum::do_reset(Rng& rng) {
  theta_ = rng.uniform(-kPi, kPi);
  theta_dot_ = rng.uniform(-1.0, 1.0);
  return observe();
}

Env::Outcome Pendulum::dynamics(const Eigen::VectorXd& action) {
  const double u = action(0);
  const double th = wrap_angle(theta_);
  const double cost = th * th + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u;
  const double accel = 3.0 * kGravity / 2.0 * std::sin(theta_) + 3.0 * u;
  theta_dot_ = std::clamp(theta_dot_ + accel * kDt, -kMaxSpeed, kMaxSpeed);
  theta_ += theta_dot_ * kDt;
  return {observe(), -cost, false};
}

Eigen::VectorXd pendulum_expert(const Eigen::VectorXd& state) {
  const double th = std::atan2(state(1), state(0));
  const double thdot = state(2);
  // Energy with the upright rest state at 15: E = thdot^2 / 2 + 15 cos th.
  const double energy = 0.5 * thdot * thdot + 1.5 * Pendulum::kGravity * std::cos(th);
  const double target = 1.5 * Pendulum::kGravity;
  double u;
  if (std::abs(th) < 0.35 && std::abs(thdot) < 2.5) {
    u = -(12.0 * th + 3.0 * thdot);
  } else {
    u = 0.5 * (target - energy) * thdot;
  }
  return Eigen::VectorXd::Constant(1, std::clamp(u, -Pendulum::kMaxTorque, Pendulum::kMaxTorque));
}

}  // namespace arb
