#ifndef ARB_BUFFER_ALIAS_TABLE_HPP
#define ARB_BUFFER_ALIAS_TABLE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "arb/core/rng.hpp"

namespace arb {

/// Vose alias table: O(n) build, O(1) draw of index i with probability
/// weights[i] / sum(weights).
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);

  std::size_t sample(Rng& rng) const;
  std::size_t size() const { return prob_.size(); }
  bool empty() const { return prob_.empty(); }

  /// Exact probability of drawing `i` implied by the table (for verification).
  double probability(std::size_t i) const;

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace arb

#endif  // ARB_BUFFER_ALIAS_TABLE_HPP
