#ifndef ARB_TESTS_SUPPORT_HPP
#define ARB_TESTS_SUPPORT_HPP

#include <boost/math/distributions/chi_squared.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "arb/core/rng.hpp"
#include "arb/core/types.hpp"

namespace arb::test {

/// Upper-tail p-value of Pearson's statistic for observed counts against
/// exact probabilities (cells with zero probability must have zero counts).
inline double chi_squared_pvalue(const std::vector<std::size_t>& counts, const std::vector<double>& probs) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  double stat = 0.0;
  int cells = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (probs[i] <= 0.0) {
      if (counts[i] != 0) return 0.0;
      continue;
    }
    const double expected = probs[i] * static_cast<double>(total);
    stat += (static_cast<double>(counts[i]) - expected) * (static_cast<double>(counts[i]) - expected) / expected;
    ++cells;
  }
  if (cells < 2) return 1.0;
  boost::math::chi_squared dist(cells - 1);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

/// Central differences of f around params (params restored afterwards).
inline Eigen::VectorXd numeric_gradient(const std::function<double()>& f, Eigen::Ref<Eigen::VectorXd> params,
                                        double h = 1e-5) {
  Eigen::VectorXd g(params.size());
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double keep = params(i);
    params(i) = keep + h;
    const double up = f();
    params(i) = keep - h;
    const double down = f();
    params(i) = keep;
    g(i) = (up - down) / (2 * h);
  }
  return g;
}

inline double max_rel_err(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) worst = std::max(worst, rel_err(a(i), b(i)));
  return worst;
}

/// Chained random trajectories with the given lengths.
inline Dataset random_dataset(const std::vector<std::size_t>& lengths, Index state_dim, Index action_dim, Rng& rng,
                              Tier tier = Tier::Custom) {
  Dataset d(state_dim, action_dim, tier);
  for (std::size_t len : lengths) {
    std::vector<Transition> steps;
    Eigen::VectorXd s(state_dim);
    for (Index j = 0; j < state_dim; ++j) s(j) = rng.normal();
    for (std::size_t t = 0; t < len; ++t) {
      Transition tr;
      tr.state = s;
      tr.action.resize(action_dim);
      for (Index j = 0; j < action_dim; ++j) tr.action(j) = rng.uniform(-1, 1);
      tr.reward = rng.normal();
      tr.next_state.resize(state_dim);
      for (Index j = 0; j < state_dim; ++j) tr.next_state(j) = rng.normal();
      tr.done = t + 1 == len && rng.uniform() < 0.5;
      s = tr.next_state;
      steps.push_back(tr);
    }
    d.append_trajectory(steps);
  }
  return d;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("arb_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace arb::test

#endif  // ARB_TESTS_SUPPORT_HPP
