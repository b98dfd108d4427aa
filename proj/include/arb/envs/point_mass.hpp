#ifndef ARB_ENVS_POINT_MASS_HPP
#define ARB_ENVS_POINT_MASS_HPP

#include "arb/envs/env.hpp"

namespace arb {

/// 2-D point mass steered toward the origin.
///
/// state  = (x, y, goal_x, goal_y) with goal fixed at (0, 0)
/// reset  : (x, y) ~ U([-1, 1]^2)
/// step   : pos' = pos + 0.1 * clip(a, -1, 1), reward = -|pos'|
/// ends   : terminated when |pos'| < 0.05, truncated after 100 steps
class PointMass final : public Env {
 public:
  static constexpr double kStepScale = 0.1;
  static constexpr double kGoalRadius = 0.05;
  static constexpr int kHorizon = 100;

  PointMass();
  static EnvSpec make_spec();

  std::unique_ptr<Env> clone() const override { return std::make_unique<PointMass>(*this); }
  const Eigen::Vector2d& position() const { return pos_; }
  void set_position(const Eigen::Vector2d& pos) { pos_ = pos; }

 protected:
  Eigen::VectorXd do_reset(Rng& rng) override;
  Outcome dynamics(const Eigen::VectorXd& action) override;

 private:
  Eigen::VectorXd observe() const;
  Eigen::Vector2d pos_ = Eigen::Vector2d::Zero();
};

/// a = -pos / |pos| (unit step toward the goal).
Eigen::VectorXd point_mass_expert(const Eigen::VectorXd& state);

}  // namespace arb

#endif  // ARB_ENVS_POINT_MASS_HPP
