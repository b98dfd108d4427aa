#ifndef ARB_ENVS_PENDULUM_HPP
#define ARB_ENVS_PENDULUM_HPP

#include "arb/envs/env.hpp"

namespace arb {

/// Torque-limited one-link pendulum swing-up (classic gym dynamics).
///
/// state  = (cos th, sin th, thdot), th = 0 upright
/// reset  : th ~ U(-pi, pi), thdot ~ U(-1, 1)
/// step   : thdot' = clip(thdot + (3g/(2l) sin th + 3/(m l^2) u) dt, -8, 8),
///          th' = th + thdot' dt, with g = 10, m = l = 1, dt = 0.05, u in [-2, 2]
/// reward : -(angle(th)^2 + 0.1 thdot^2 + 0.001 u^2), evaluated before the update
/// ends   : never terminates; truncated after 200 steps
class Pendulum final : public Env {
 public:
  static constexpr double kMaxSpeed = 8.0;
  static constexpr double kMaxTorque = 2.0;
  static constexpr double kDt = 0.05;
  static constexpr double kGravity = 10.0;
  static constexpr int kHorizon = 200;

  Pendulum();
  static EnvSpec make_spec();

  std::unique_ptr<Env> clone() const override { return std::make_unique<Pendulum>(*this); }
  double angle() const { return theta_; }
  double velocity() const { return theta_dot_; }
  void set_state(double theta, double theta_dot) {
    theta_ = theta;
    theta_dot_ = theta_dot;
  }

 protected:
  Eigen::VectorXd do_reset(Rng& rng) override;
  Outcome dynamics(const Eigen::VectorXd& action) override;

 private:
  Eigen::VectorXd observe() const;
  double theta_ = 0.0;
  double theta_dot_ = 0.0;
};

/// Wraps an angle into [-pi, pi).
double wrap_angle(double theta);

/// Energy-pumping swing-up with a PD stabilizer near the top.
Eigen::VectorXd pendulum_expert(const Eigen::VectorXd& state);

}  // namespace arb

#endif  // ARB_ENVS_PENDULUM_HPP
