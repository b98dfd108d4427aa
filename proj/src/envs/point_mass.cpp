#include "arb/envs/point_mass.hpp"

namespace arb {

EnvSpec PointMass::make_spec() {
  EnvSpec spec;
  spec.name = "point-mass";
  spec.state_dim = 4;
  spec.action_dim = 2;
  spec.action_low = Eigen::VectorXd::Constant(2, -1.0);
  spec.action_high = Eigen::VectorXd::Constant(2, 1.0);
  spec.horizon = kHorizon;
  // Mean returns of 10k reference episodes (`arb ref-returns point-mass`).
  spec.return_random = -88.8103;
  spec.return_expert = -2.9777;
  spec.reference_seed = 20240601;
  spec.reference_episodes = 10000;
  return spec;
}

PointMass::PointMass() : Env(make_spec()) {}

Eigen::VectorXd PointMass::observe() const {
  Eigen::VectorXd s(4);
  s << pos_(0), pos_(1), 0.0, 0.0;
  return s;
}

Eigen::VectorXd PointMass::do_reset(Rng& rng) {
  pos_(0) = rng.uniform(-1.0, 1.0);
  pos_(1) = rng.uniform(-1.0, 1.0);
  return observe();
}

Env::Outcome PointMass::dynamics(const Eigen::VectorXd& action) {
  pos_ += kStepScale * action.head<2>();
  const double dist = pos_.norm();
  return {observe(), -dist, dist < kGoalRadius};
}

Eigen::VectorXd point_mass_expert(const Eigen::VectorXd& state) {
  const Eigen::Vector2d offset = state.head<2>() - state.segment<2>(2);
  const double dist = offset.norm();
  if (dist == 0.0) return Eigen::VectorXd::Zero(2);
  return -offset / dist;
}

}  // namespace arb
