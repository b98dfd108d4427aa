#include "arb/buffer/alias_table.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace arb {

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw std::invalid_argument("AliasTable: no weights");
  if (n > std::numeric_limits<std::uint32_t>::max()) throw std::length_error("AliasTable: too many weights");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("AliasTable: weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("AliasTable: weights sum to zero");

  prob_.resize(n);
  alias_.resize(n);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small;
  std::vector<std::uint32_t> large;
  small.reserve(n);
  large.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (std::uint32_t i : large) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
  for (std::uint32_t i : small) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
}

std::size_t AliasTable::sample(Rng& rng) const {
  const auto column = static_cast<std::size_t>(rng.uniform_int(prob_.size()));
  return rng.uniform() < prob_[column] ? column : alias_[column];
}

double AliasTable::probability(std::size_t i) const {
  const double n = static_cast<double>(prob_.size());
  double p = prob_[i] / n;
  for (std::size_t c = 0; c < prob_.size(); ++c) {
    if (alias_[c] == i && c != i) p += (1.0 - prob_[c]) / n;
  }
  return p;
}

}  // namespace arb
