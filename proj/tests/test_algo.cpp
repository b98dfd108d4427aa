#include <gtest/gtest.h>

#include <cmath>

#include "arb/algo/agent.hpp"
#include "arb/algo/evaluate.hpp"
#include "arb/algo/losses.hpp"
#include "arb/envs/datasets.hpp"
#include "support.hpp"

using namespace arb;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

namespace {

TransitionBatch<double> random_batch(Index sd, Index ad, Index n, Rng& rng) {
  TransitionBatch<double> b;
  b.states.resize(sd, n);
  b.actions.resize(ad, n);
  b.next_states.resize(sd, n);
  b.rewards.resize(n);
  b.dones.resize(n);
  for (Index i = 0; i < b.states.size(); ++i) b.states.data()[i] = rng.normal();
  for (Index i = 0; i < b.actions.size(); ++i) b.actions.data()[i] = rng.uniform(-1, 1);
  for (Index i = 0; i < b.next_states.size(); ++i) b.next_states.data()[i] = rng.normal();
  for (Index i = 0; i < n; ++i) {
    b.rewards(i) = rng.normal();
    b.dones(i) = rng.uniform() < 0.3 ? 1.0 : 0.0;
  }
  return b;
}

AgentHyper small_hyper() {
  AgentHyper h;
  h.hidden = {8, 8};
  return h;
}

}  // namespace

TEST(Expectile, Identities) {
  EXPECT_DOUBLE_EQ(expectile_loss(1.0, 0.7), 0.7);
  EXPECT_DOUBLE_EQ(expectile_loss(-1.0, 0.7), 0.3);
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double d = rng.normal() * 10;
    EXPECT_EQ(expectile_loss(d, 0.5), 0.5 * d * d);
  }
}

TEST(Expectile, ValueLossAtHalfIsHalfMse) {
  Rng rng(2);
  Mlp<double> v({3, 5, 1});
  v.init_uniform(rng);
  const Mat s = Mat::Random(3, 10);
  const Vec t = Vec::Random(10);
  Vec g = Vec::Zero(v.parameter_count());
  const double loss = value_loss(v, s, t, 0.5, g);
  const double mse = (v.forward(s).transpose() - t).squaredNorm() / 10;
  EXPECT_NEAR(loss, 0.5 * mse, 1e-15);
}

TEST(AdvantageWeights, ClipsExponent) {
  Vec adv(3);
  adv << 0.0, 1.0, 1000.0;
  const Vec w = advantage_weights<double>(adv, 3.0, 100.0);
  EXPECT_DOUBLE_EQ(w(0), 1.0);
  EXPECT_DOUBLE_EQ(w(1), std::exp(3.0));
  EXPECT_DOUBLE_EQ(w(2), std::exp(100.0));
}

TEST(GradientCheck, ValueLoss) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Mlp<double> v({3, 6, 5, 1});
    v.init_uniform(rng);
    Mat s(3, 8);
    Vec t(8);
    for (Index i = 0; i < s.size(); ++i) s.data()[i] = rng.normal();
    for (Index i = 0; i < t.size(); ++i) t(i) = rng.normal();
    const double tau = rng.uniform(0.1, 0.9);
    Vec g = Vec::Zero(v.parameter_count());
    value_loss(v, s, t, tau, g);
    auto f = [&] {
      Vec scratch = Vec::Zero(v.parameter_count());
      return value_loss(v, s, t, tau, scratch);
    };
    EXPECT_LT(test::max_rel_err(g, test::numeric_gradient(f, v.parameters())), 1e-4) << "trial " << trial;
  }
}

TEST(GradientCheck, QLoss) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    Mlp<double> q({4, 6, 5, 1});
    q.init_uniform(rng);
    Mat x(4, 8);
    Vec t(8);
    for (Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    for (Index i = 0; i < t.size(); ++i) t(i) = rng.normal();
    Vec g = Vec::Zero(q.parameter_count());
    q_loss(q, x, t, g);
    auto f = [&] {
      Vec scratch = Vec::Zero(q.parameter_count());
      return q_loss(q, x, t, scratch);
    };
    EXPECT_LT(test::max_rel_err(g, test::numeric_gradient(f, q.parameters())), 1e-4) << "trial " << trial;
  }
}

TEST(GradientCheck, PolicyLoss) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    GaussianPolicy<double> p(3, 2, {6, 5});
    p.init(rng);
    for (Index j = 0; j < 2; ++j) p.raw_log_std()(j) = rng.uniform(-1.5, 1.5);
    Mat s(3, 8), a(2, 8);
    Vec adv(8);
    for (Index i = 0; i < s.size(); ++i) s.data()[i] = rng.normal();
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = rng.uniform(-1, 1);
    for (Index i = 0; i < adv.size(); ++i) adv(i) = rng.uniform(-1, 1);
    const Vec w = advantage_weights<double>(adv, 3.0, 100.0);
    auto grad = p.zero_gradient();
    p.weighted_nll(s, a, w, grad);
    auto f = [&] {
      auto scratch = p.zero_gradient();
      return p.weighted_nll(s, a, w, scratch);
    };
    EXPECT_LT(test::max_rel_err(grad.trunk, test::numeric_gradient(f, p.trunk().parameters())), 1e-4);
    EXPECT_LT(test::max_rel_err(grad.log_std, test::numeric_gradient(f, p.raw_log_std())), 1e-4);
  }
}

TEST(Agent, HyperValidation) {
  AgentHyper h;
  EXPECT_NO_THROW(h.validate());
  h.discount = 1.0;
  EXPECT_THROW(h.validate(), std::invalid_argument);
  h = {};
  h.expectile = 1.0;
  EXPECT_THROW(h.validate(), std::invalid_argument);
  h = {};
  h.soft_update = 0.0;
  EXPECT_THROW(h.validate(), std::invalid_argument);
}

TEST(Agent, ZeroDiscountConvergesToReward) {
  Rng rng(6);
  AgentHyper h = small_hyper();
  h.discount = 0.0;
  h.lr = 3e-3;
  Agent<double> agent(2, 1, h, rng);
  auto batch = random_batch(2, 1, 32, rng);
  batch.rewards.setOnes();
  batch.dones.setZero();
  for (int k = 0; k < 3000; ++k) agent.update(batch);
  const Mat sa = Agent<double>::state_action(batch);
  EXPECT_LT((agent.q1().forward(sa).array() - 1.0).abs().maxCoeff(), 1e-2);
  EXPECT_LT((agent.q2().forward(sa).array() - 1.0).abs().maxCoeff(), 1e-2);
}

TEST(Agent, TerminalTransitionsDoNotBootstrap) {
  Rng rng(7);
  Agent<double> a(3, 2, small_hyper(), rng);
  Agent<double> b = a;
  b.v().parameters() *= 7.0;
  b.v().bias(b.v().num_layers() - 1).array() += 100.0;
  auto batch = random_batch(3, 2, 16, rng);
  batch.dones.setOnes();
  a.update(batch);
  b.update(batch);
  // V(s') differs wildly but is masked, so the critics see identical targets.
  EXPECT_EQ(a.q1().parameters(), b.q1().parameters());
  EXPECT_EQ(a.q2().parameters(), b.q2().parameters());

  batch.dones.setZero();
  Agent<double> c = a, d = a;
  d.v().bias(d.v().num_layers() - 1).array() += 100.0;
  c.update(batch);
  d.update(batch);
  EXPECT_NE(c.q1().parameters(), d.q1().parameters());
}

TEST(Agent, EqualAdvantagesGiveBehaviorCloningDirection) {
  Rng rng(8);
  Agent<double> agent(3, 2, small_hyper(), rng);
  const auto batch = random_batch(3, 2, 16, rng);
  const double c = 0.37;
  const Vec w = advantage_weights<double>(Vec::Constant(16, c), 3.0, 100.0);
  auto awr = agent.policy().zero_gradient();
  auto bc = agent.policy().zero_gradient();
  agent.policy().weighted_nll(batch.states, batch.actions, w, awr);
  agent.policy().weighted_nll(batch.states, batch.actions, Vec::Ones(16), bc);
  Vec g1(awr.trunk.size() + awr.log_std.size()), g2(g1.size());
  g1 << awr.trunk, awr.log_std;
  g2 << bc.trunk, bc.log_std;
  EXPECT_NEAR(g1.dot(g2) / (g1.norm() * g2.norm()), 1.0, 1e-12);
  EXPECT_NEAR(g1.norm() / g2.norm(), std::exp(3.0 * c), 1e-9);

  // Same through the agent's own step: the parameter change matches a BC step.
  Agent<double> x = agent, y = agent;
  x.policy_step(batch.states, batch.actions, Vec::Constant(16, c));
  y.policy_step(batch.states, batch.actions, Vec::Zero(16));
  // Adam's first step is scale-invariant up to its epsilon, so both land on
  // (nearly) the same parameters.
  const double lr = agent.hyper().lr;
  EXPECT_LT((x.policy().trunk().parameters() - y.policy().trunk().parameters()).cwiseAbs().maxCoeff(), 1e-2 * lr);
}

TEST(Agent, FullSoftUpdateCopiesLiveNets) {
  Rng rng(9);
  AgentHyper h = small_hyper();
  h.soft_update = 1.0;
  Agent<double> agent(2, 1, h, rng);
  agent.update(random_batch(2, 1, 8, rng));
  EXPECT_EQ(agent.target_q1().parameters(), agent.q1().parameters());
  EXPECT_EQ(agent.target_q2().parameters(), agent.q2().parameters());
}

TEST(Agent, PolicyStepNeverQueriesCritics) {
  Rng rng(10);
  Agent<double> agent(2, 1, small_hyper(), rng);
  const auto batch = random_batch(2, 1, 8, rng);
  const auto before = agent.q_evaluations();
  agent.policy_step(batch.states, batch.actions, Vec::Random(8));
  EXPECT_EQ(agent.q_evaluations(), before);
  agent.update(batch);
  // Two target evaluations for the advantage, two live ones for the TD step.
  EXPECT_EQ(agent.q_evaluations(), before + 4);
  EXPECT_EQ(agent.updates(), 1u);
}

TEST(Agent, NonFiniteLossThrows) {
  Rng rng(11);
  Agent<double> agent(2, 1, small_hyper(), rng);
  auto batch = random_batch(2, 1, 8, rng);
  batch.rewards(3) = std::nan("");
  EXPECT_THROW(agent.update(batch), std::runtime_error);
  EXPECT_THROW(agent.update(TransitionBatch<double>{}), std::invalid_argument);
}

TEST(Agent, CheckpointRoundTrip) {
  Rng rng(12);
  Agent<double> a(3, 2, small_hyper(), rng);
  a.update(random_batch(3, 2, 8, rng));
  Rng other(99);
  Agent<double> b(3, 2, small_hyper(), other);
  b.load_checkpoint(a.to_checkpoint());
  EXPECT_EQ(b.q1().parameters(), a.q1().parameters());
  EXPECT_EQ(b.target_q2().parameters(), a.target_q2().parameters());
  EXPECT_EQ(b.policy().raw_log_std(), a.policy().raw_log_std());
  Agent<double> wrong(4, 2, small_hyper(), other);
  EXPECT_THROW(wrong.load_checkpoint(a.to_checkpoint()), std::invalid_argument);
}

TEST(Pretrain, ZeroStepsLeavesParameters) {
  Rng rng(13);
  const Dataset d = test::random_dataset({10, 10}, 2, 1, rng);
  Agent<double> agent(2, 1, small_hyper(), rng);
  const Agent<double> before = agent;
  pretrain(agent, d, 0, 16, rng);
  EXPECT_EQ(agent.q1().parameters(), before.q1().parameters());
  EXPECT_EQ(agent.policy().trunk().parameters(), before.policy().trunk().parameters());
  EXPECT_EQ(agent.updates(), 0u);
}

TEST(Pretrain, DeterministicUnderSeed) {
  Rng data_rng(14);
  const Dataset d = test::random_dataset({30, 30}, 2, 1, data_rng);
  auto train = [&] {
    Rng init(1), rng(2);
    Agent<double> agent(2, 1, small_hyper(), init);
    pretrain(agent, d, 50, 16, rng);
    return agent;
  };
  const auto a = train(), b = train();
  EXPECT_EQ(a.q1().parameters(), b.q1().parameters());
  EXPECT_EQ(a.v().parameters(), b.v().parameters());
  EXPECT_EQ(a.policy().trunk().parameters(), b.policy().trunk().parameters());
}

TEST(Evaluate, NormalizationEndpoints) {
  const EnvSpec& spec = env_spec("point-mass");
  EXPECT_DOUBLE_EQ(normalized_score(spec, spec.return_random), 0.0);
  EXPECT_DOUBLE_EQ(normalized_score(spec, spec.return_expert), 100.0);
  EXPECT_NEAR(normalized_score(spec, 0.5 * (spec.return_random + spec.return_expert)), 50.0, 1e-12);

  auto env = make_env("point-mass");
  Rng rng(15);
  EXPECT_NEAR(evaluate_policy(*env, expert_policy(spec), 2000, rng).normalized_score, 100.0, 3.0);
  EXPECT_NEAR(evaluate_policy(*env, random_policy(spec), 2000, rng).normalized_score, 0.0, 3.0);
  EXPECT_THROW(evaluate_policy(*env, random_policy(spec), 0, rng), std::invalid_argument);
}

TEST(Pretrain, ExpertDataReachesEightyPercent) {
  Rng data_rng(16);
  DatasetTierSpec tier;
  tier.tier = Tier::Expert;
  tier.min_transitions = 20000;
  const Dataset d = generate_dataset("point-mass", tier, data_rng);
  Rng init(1), rng(2), eval_rng(3);
  Agent<double> agent(4, 2, AgentHyper{}, init);
  pretrain(agent, d, 20000, 256, rng);
  auto env = make_env("point-mass");
  const EvalResult r = evaluate(agent, *env, 100, eval_rng);
  RecordProperty("normalized_score", std::to_string(r.normalized_score));
  EXPECT_GE(r.normalized_score, 80.0);
}
