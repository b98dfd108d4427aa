#ifndef ARB_ALGO_AGENT_HPP
#define ARB_ALGO_AGENT_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "arb/algo/losses.hpp"
#include "arb/core/rng.hpp"
#include "arb/core/types.hpp"
#include "arb/nets/adam.hpp"
#include "arb/nets/checkpoint.hpp"
#include "arb/nets/gaussian_policy.hpp"
#include "arb/nets/mlp.hpp"

namespace arb {

struct AgentHyper {
  double discount = 0.99;
  double expectile = 0.7;
  double temperature = 3.0;  // advantage temperature beta
  double soft_update = 0.005;
  double max_exponent = 100.0;
  double lr = 3e-4;
  std::vector<Index> hidden{64, 64};

  void validate() const {
    if (!(discount >= 0.0 && discount < 1.0)) throw std::invalid_argument("discount must be in [0, 1)");
    if (!(expectile > 0.0 && expectile < 1.0)) throw std::invalid_argument("expectile must be in (0, 1)");
    if (!(soft_update > 0.0 && soft_update <= 1.0)) throw std::invalid_argument("soft_update must be in (0, 1]");
    if (!(lr > 0.0)) throw std::invalid_argument("lr must be > 0");
    if (hidden.empty()) throw std::invalid_argument("need at least one hidden layer");
  }
};

struct LossReport {
  double v_loss = 0.0;
  double q_loss = 0.0;
  double policy_loss = 0.0;
};

/// In-sample actor-critic: expectile value regression, double-Q TD learning
/// against V(s'), and advantage-weighted Gaussian policy extraction. The
/// policy step only reads advantages of batch actions.
template <typename Scalar>
class Agent {
 public:
  using Matrix = typename Mlp<Scalar>::Matrix;
  using Vector = typename Mlp<Scalar>::Vector;
  using Batch = TransitionBatch<Scalar>;

  Agent() = default;

  Agent(Index state_dim, Index action_dim, AgentHyper hyper, Rng& init_rng) : hyper_(std::move(hyper)) {
    hyper_.validate();
    policy_ = GaussianPolicy<Scalar>(state_dim, action_dim, hyper_.hidden);
    q1_ = Mlp<Scalar>(layer_dims(state_dim + action_dim), Activation::ReLU);
    q2_ = q1_;
    v_ = Mlp<Scalar>(layer_dims(state_dim), Activation::ReLU);
    policy_.init(init_rng);
    q1_.init_uniform(init_rng);
    q2_.init_uniform(init_rng);
    v_.init_uniform(init_rng);
    target_q1_ = q1_;
    target_q2_ = q2_;
    const AdamConfig opt{.lr = hyper_.lr};
    policy_trunk_opt_ = Adam<Scalar>(policy_.trunk().parameter_count(), opt);
    policy_std_opt_ = Adam<Scalar>(action_dim, opt);
    q1_opt_ = Adam<Scalar>(q1_.parameter_count(), opt);
    q2_opt_ = Adam<Scalar>(q2_.parameter_count(), opt);
    v_opt_ = Adam<Scalar>(v_.parameter_count(), opt);
  }

  const AgentHyper& hyper() const { return hyper_; }
  AgentHyper& hyper() { return hyper_; }
  const GaussianPolicy<Scalar>& policy() const { return policy_; }
  GaussianPolicy<Scalar>& policy() { return policy_; }
  const Mlp<Scalar>& q1() const { return q1_; }
  const Mlp<Scalar>& q2() const { return q2_; }
  const Mlp<Scalar>& v() const { return v_; }
  Mlp<Scalar>& q1() { return q1_; }
  Mlp<Scalar>& q2() { return q2_; }
  Mlp<Scalar>& v() { return v_; }
  const Mlp<Scalar>& target_q1() const { return target_q1_; }
  const Mlp<Scalar>& target_q2() const { return target_q2_; }
  Index state_dim() const { return policy_.state_dim(); }
  Index action_dim() const { return policy_.action_dim(); }

  /// Number of Q-network evaluations so far (live or target).
  std::uint64_t q_evaluations() const { return q_evaluations_; }
  std::uint64_t updates() const { return updates_; }

  static Matrix state_action(const Batch& batch) {
    Matrix sa(batch.states.rows() + batch.actions.rows(), batch.size());
    sa << batch.states, batch.actions;
    return sa;
  }

  /// min(target_q1, target_q2) on the batch's own (s, a) pairs.
  Vector target_q(const Matrix& state_actions) {
    q_evaluations_ += 2;
    return target_q1_.forward(state_actions).cwiseMin(target_q2_.forward(state_actions)).transpose();
  }

  LossReport update(const Batch& batch) {
    if (batch.size() == 0) throw std::invalid_argument("Agent::update: empty batch");
    const Scalar discount = static_cast<Scalar>(hyper_.discount);
    const Matrix sa = state_action(batch);

    const Vector tq = target_q(sa);
    const Vector v_s = v_.forward(batch.states).transpose();
    const Vector next_v = v_.forward(batch.next_states).transpose();
    const Vector advantages = tq - v_s;

    LossReport report;
    report.v_loss = static_cast<double>(value_step(batch.states, tq));

    const Vector td_target =
        batch.rewards + discount * (Vector::Ones(batch.size()) - batch.dones).cwiseProduct(next_v);
    report.q_loss = static_cast<double>(q_step(sa, td_target));
    report.policy_loss = static_cast<double>(policy_step(batch.states, batch.actions, advantages));
    soft_update_targets(static_cast<Scalar>(hyper_.soft_update));
    ++updates_;

    if (!std::isfinite(report.v_loss) || !std::isfinite(report.q_loss) || !std::isfinite(report.policy_loss)) {
      throw std::runtime_error("Agent::update: non-finite loss after update " + std::to_string(updates_) +
                               " (v=" + std::to_string(report.v_loss) + ", q=" + std::to_string(report.q_loss) +
                               ", policy=" + std::to_string(report.policy_loss) + ")");
    }
    return report;
  }

  Scalar value_step(const Matrix& states, const Vector& targets) {
    Vector grad = Vector::Zero(v_.parameter_count());
    const Scalar loss = value_loss(v_, states, targets, static_cast<Scalar>(hyper_.expectile), grad);
    v_opt_.step(v_.parameters(), grad);
    return loss;
  }

  /// Average of the two critics' mean squared TD errors.
  Scalar q_step(const Matrix& state_actions, const Vector& targets) {
    q_evaluations_ += 2;
    Vector g1 = Vector::Zero(q1_.parameter_count());
    Vector g2 = Vector::Zero(q2_.parameter_count());
    const Scalar l1 = q_loss(q1_, state_actions, targets, g1);
    const Scalar l2 = q_loss(q2_, state_actions, targets, g2);
    q1_opt_.step(q1_.parameters(), g1);
    q2_opt_.step(q2_.parameters(), g2);
    return Scalar(0.5) * (l1 + l2);
  }

  Scalar policy_step(const Matrix& states, const Matrix& actions, const Vector& advantages) {
    const Vector weights = advantage_weights<Scalar>(advantages, static_cast<Scalar>(hyper_.temperature),
                                                     static_cast<Scalar>(hyper_.max_exponent));
    auto grad = policy_.zero_gradient();
    const Scalar loss = policy_.weighted_nll(states, actions, weights, grad);
    policy_trunk_opt_.step(policy_.trunk().parameters(), grad.trunk);
    policy_std_opt_.step(policy_.raw_log_std(), grad.log_std);
    return loss;
  }

  void soft_update_targets(Scalar rate) {
    target_q1_.parameters() = rate * q1_.parameters() + (Scalar(1) - rate) * target_q1_.parameters();
    target_q2_.parameters() = rate * q2_.parameters() + (Scalar(1) - rate) * target_q2_.parameters();
  }

  Checkpoint to_checkpoint() const {
    Checkpoint ckpt;
    ckpt.add("policy.trunk", policy_.trunk().parameters().template cast<double>());
    ckpt.add("policy.log_std", policy_.raw_log_std().template cast<double>());
    ckpt.add("q1", q1_.parameters().template cast<double>());
    ckpt.add("q2", q2_.parameters().template cast<double>());
    ckpt.add("v", v_.parameters().template cast<double>());
    ckpt.add("target_q1", target_q1_.parameters().template cast<double>());
    ckpt.add("target_q2", target_q2_.parameters().template cast<double>());
    return ckpt;
  }

  /// Loads parameters into an agent of identical architecture.
  void load_checkpoint(const Checkpoint& ckpt) {
    auto assign = [&](Vector& dst, const std::string& name) {
      const Eigen::MatrixXd& src = ckpt.get(name);
      if (src.size() != dst.size()) throw std::invalid_argument("checkpoint tensor '" + name + "' has wrong size");
      dst = Eigen::Map<const Eigen::VectorXd>(src.data(), src.size()).template cast<Scalar>();
    };
    assign(policy_.trunk().parameters(), "policy.trunk");
    assign(policy_.raw_log_std(), "policy.log_std");
    assign(q1_.parameters(), "q1");
    assign(q2_.parameters(), "q2");
    assign(v_.parameters(), "v");
    assign(target_q1_.parameters(), "target_q1");
    assign(target_q2_.parameters(), "target_q2");
  }

 private:
  std::vector<Index> layer_dims(Index input) const {
    std::vector<Index> dims{input};
    dims.insert(dims.end(), hyper_.hidden.begin(), hyper_.hidden.end());
    dims.push_back(1);
    return dims;
  }

  AgentHyper hyper_;
  GaussianPolicy<Scalar> policy_;
  Mlp<Scalar> q1_, q2_, v_, target_q1_, target_q2_;
  Adam<Scalar> policy_trunk_opt_, policy_std_opt_, q1_opt_, q2_opt_, v_opt_;
  std::uint64_t q_evaluations_ = 0;
  std::uint64_t updates_ = 0;
};

/// `steps` updates on uniform with-replacement minibatches of the offline data.
template <typename Scalar>
LossReport pretrain(Agent<Scalar>& agent, const Dataset& offline, std::size_t steps, std::size_t batch_size,
                    Rng& rng) {
  LossReport mean;
  for (std::size_t k = 0; k < steps; ++k) {
    const auto indices = sample_uniform(offline, batch_size, rng);
    const LossReport r = agent.update(gather<Scalar>(offline.transitions, indices));
    mean.v_loss += r.v_loss / static_cast<double>(steps);
    mean.q_loss += r.q_loss / static_cast<double>(steps);
    mean.policy_loss += r.policy_loss / static_cast<double>(steps);
  }
  return mean;
}

}  // namespace arb

#endif  // ARB_ALGO_AGENT_HPP
