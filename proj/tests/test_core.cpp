#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "arb/core/dataset_io.hpp"
#include "arb/core/rng.hpp"
#include "arb/core/text.hpp"
#include "arb/core/types.hpp"
#include "support.hpp"

using namespace arb;

TEST(Rng, EqualSeedsGiveEqualStreams) {
  Rng a(12345), b(12345);
  for (int i = 0; i < 100000; ++i) ASSERT_EQ(a(), b()) << "draw " << i;
}

TEST(Rng, DifferentSeedsDiverge) {
  Rng a(1), b(2);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) equal += a() == b();
  EXPECT_EQ(equal, 0);
}

TEST(Rng, MixedDrawsReproduce) {
  Rng a(99), b(99);
  for (int i = 0; i < 10000; ++i) {
    ASSERT_EQ(a.uniform(), b.uniform());
    ASSERT_EQ(a.normal(), b.normal());
    ASSERT_EQ(a.uniform_int(17), b.uniform_int(17));
  }
}

TEST(Rng, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    for (std::uint64_t stream = 0; stream < 8; ++stream) seen.insert(derive_seed(seed, stream));
  }
  EXPECT_EQ(seen.size(), 64u);
  EXPECT_EQ(derive_seed(3, 4), derive_seed(3, 4));
}

TEST(Rng, UniformRangeAndMoments) {
  Rng rng(7);
  const int n = 200000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum2 += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(sum2 / n - (sum / n) * (sum / n), 1.0 / 12, 2e-3);
}

TEST(Rng, UniformIntIsUniform) {
  Rng rng(8);
  const std::size_t k = 7;
  std::vector<std::size_t> counts(k, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = rng.uniform_int(k);
    ASSERT_LT(v, k);
    ++counts[v];
  }
  EXPECT_GT(test::chi_squared_pvalue(counts, std::vector<double>(k, 1.0 / k)), 0.01);
  EXPECT_THROW(rng.uniform_int(0), std::invalid_argument);
}

TEST(Rng, NormalMoments) {
  Rng rng(9);
  const int n = 200000;
  double sum = 0, sum2 = 0, sum4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
    sum4 += z * z * z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(sum2 / n, 1.0, 0.02);
  EXPECT_NEAR(sum4 / n, 3.0, 0.1);
}

TEST(Text, FormatRoundTrips) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform(-20, 20));
    EXPECT_EQ(*text::parse_double(text::format_double(v)), v);
  }
  EXPECT_FALSE(text::parse_double("1.5x").has_value());
  EXPECT_FALSE(text::parse_int("").has_value());
  EXPECT_EQ(text::trim("  a b \t"), "a b");
  EXPECT_EQ(text::split("a,,b", ',').size(), 3u);
}

TEST(Tier, NamesRoundTrip) {
  for (Tier t : {Tier::Random, Tier::Medium, Tier::MediumReplay, Tier::Expert, Tier::MediumExpert, Tier::Custom}) {
    EXPECT_EQ(parse_tier(to_string(t)), t);
  }
  EXPECT_THROW(parse_tier("great"), std::invalid_argument);
}

TEST(Dataset, PartitionAndReturns) {
  Rng rng(3);
  const Dataset d = test::random_dataset({3, 1, 5}, 2, 1, rng);
  validate(d);
  std::size_t total = 0;
  for (const auto& traj : d.trajectories) total += traj.length();
  EXPECT_EQ(total, d.size());
  EXPECT_TRUE(trajectories_chain(d));
  const auto returns = d.trajectory_returns();
  ASSERT_EQ(returns.size(), 3u);
  double r0 = 0;
  for (std::size_t i : d.trajectories[0].transition_indices) r0 += d.transitions[i].reward;
  EXPECT_DOUBLE_EQ(returns[0], r0);
  EXPECT_EQ(d.transitions[4].traj_id, 2);
}

TEST(Dataset, ValidateRejectsBrokenPartitions) {
  Rng rng(4);
  Dataset d = test::random_dataset({2, 2}, 2, 1, rng);
  Dataset bad = d;
  bad.transitions[3].traj_id = 0;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = d;
  bad.trajectories[1].transition_indices.pop_back();
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = d;
  bad.transitions[0].action = Eigen::VectorXd::Zero(3);
  EXPECT_THROW(validate(bad), std::invalid_argument);
  EXPECT_THROW(d.append_trajectory({}), std::invalid_argument);
}

TEST(Dataset, ChainingDetectsBreaks) {
  Rng rng(5);
  Dataset d = test::random_dataset({4}, 3, 2, rng);
  EXPECT_TRUE(trajectories_chain(d));
  d.transitions[1].next_state(0) += 1e-300;
  d.transitions[1].next_state(1) += 1.0;
  EXPECT_FALSE(trajectories_chain(d));
}

TEST(Dataset, GatherAndUniformSampling) {
  Rng rng(6);
  const Dataset d = test::random_dataset({3, 3}, 2, 1, rng);
  const std::vector<std::size_t> idx{5, 0, 5};
  const auto batch = gather<double>(d.transitions, idx);
  ASSERT_EQ(batch.size(), 3);
  EXPECT_EQ(batch.states.col(0), d.transitions[5].state);
  EXPECT_EQ(batch.actions.col(1), d.transitions[0].action);
  EXPECT_EQ(batch.rewards(2), d.transitions[5].reward);
  EXPECT_EQ(batch.dones(0), d.transitions[5].done ? 1.0 : 0.0);

  std::vector<std::size_t> counts(d.size(), 0);
  for (int k = 0; k < 1000; ++k) {
    for (auto i : sample_uniform(d, 60, rng)) ++counts[i];
  }
  EXPECT_GT(test::chi_squared_pvalue(counts, std::vector<double>(d.size(), 1.0 / d.size())), 0.01);
}

namespace {

std::string to_text(const Dataset& d) {
  std::ostringstream out;
  write_dataset(d, out);
  return out.str();
}

Dataset from_text(const std::string& s) {
  std::istringstream in(s);
  return read_dataset(in);
}

}  // namespace

TEST(DatasetIo, EmptyDatasetIsHeaderOnly) {
  const Dataset d(4, 2);
  EXPECT_EQ(to_text(d), "#arb-dataset v1 state_dim=4 action_dim=2\n");
  const Dataset back = from_text(to_text(d));
  EXPECT_TRUE(back.empty());
  EXPECT_EQ(back.state_dim, 4);
  EXPECT_EQ(back.action_dim, 2);
}

TEST(DatasetIo, OneTrajectoryOfTwo) {
  Rng rng(1);
  const Dataset d = test::random_dataset({2}, 2, 1, rng);
  const std::string s = to_text(d);
  const auto lines = text::split(text::trim(s), '\n');
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(text::split(lines[1], ',')[0], "0");
  EXPECT_EQ(text::split(lines[2], ',')[0], "0");
  EXPECT_EQ(text::split(lines[1], ',').size(), 1u + 2 + 1 + 1 + 2 + 1);
}

TEST(DatasetIo, RandomizedRoundTripIsExact) {
  Rng rng(2024);
  const auto dir = test::scratch_dir("dataset_io");
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::size_t> lengths;
    const auto n = 1 + rng.uniform_int(6);
    for (std::uint64_t k = 0; k < n; ++k) lengths.push_back(1 + rng.uniform_int(10));
    const Index sd = 1 + static_cast<Index>(rng.uniform_int(5));
    const Index ad = 1 + static_cast<Index>(rng.uniform_int(3));
    const Dataset d = test::random_dataset(lengths, sd, ad, rng);

    const auto p1 = dir / "a.csv", p2 = dir / "b.csv";
    dataset_save(d, p1);
    const Dataset back = dataset_load(p1);
    dataset_save(back, p2);
    std::ifstream f1(p1), f2(p2);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    ASSERT_EQ(s1.str(), s2.str());

    ASSERT_EQ(back.size(), d.size());
    ASSERT_EQ(back.trajectories.size(), d.trajectories.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto &a = d.transitions[i], &b = back.transitions[i];
      ASSERT_EQ(a.state, b.state);
      ASSERT_EQ(a.action, b.action);
      ASSERT_EQ(a.reward, b.reward);
      ASSERT_EQ(a.next_state, b.next_state);
      ASSERT_EQ(a.done, b.done);
      ASSERT_EQ(a.traj_id, b.traj_id);
      ASSERT_EQ(b.origin, Origin::Offline);
    }
    for (std::size_t k = 0; k < d.trajectories.size(); ++k) {
      ASSERT_EQ(back.trajectories[k].transition_indices, d.trajectories[k].transition_indices);
    }
    validate(back);
  }
}

TEST(DatasetIo, NonFiniteValuesAreRejectedOnSave) {
  Rng rng(3);
  Dataset d = test::random_dataset({2}, 2, 1, rng);
  d.transitions[1].reward = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(to_text(d), std::invalid_argument);
  d.transitions[1].reward = 0;
  d.transitions[0].state(1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(to_text(d), std::invalid_argument);
}

TEST(DatasetIo, OutOfOrderTrajectoriesAreRejected) {
  const std::string s =
      "#arb-dataset v1 state_dim=1 action_dim=1\n"
      "1,0,0,0,0,0\n"
      "0,0,0,0,0,0\n";
  try {
    from_text(s);
    FAIL() << "expected an error";
  } catch (const DatasetFormatError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("out of order"), std::string::npos);
  }
}

TEST(DatasetIo, MalformedLinesReportTheirLine) {
  const std::string head = "#arb-dataset v1 state_dim=1 action_dim=1\n0,0,0,0,0,0\n";
  for (const std::string bad : {"0,0,0,0,0\n", "0,0,x,0,0,0\n", "0,0,0,0,0,2\n", "0,0,0,nan,0,0\n"}) {
    try {
      from_text(head + bad);
      FAIL() << "accepted: " << bad;
    } catch (const DatasetFormatError& e) {
      EXPECT_EQ(e.line(), 3u) << bad;
    }
  }
  EXPECT_THROW(from_text(""), DatasetFormatError);
  EXPECT_THROW(from_text("#arb-dataset v2 state_dim=1 action_dim=1\n"), DatasetFormatError);
  EXPECT_THROW(from_text("#arb-dataset v1 state_dim=0 action_dim=1\n"), DatasetFormatError);
}

TEST(DatasetIo, MissingFileIsAnError) {
  EXPECT_THROW(dataset_load("/nonexistent/nowhere.csv"), std::runtime_error);
}
