#ifndef ARB_HARNESS_SWEEP_HPP
#define ARB_HARNESS_SWEEP_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "arb/harness/config.hpp"
#include "arb/harness/run.hpp"

namespace arb {

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

/// Parses "key=v1,v2,...".
SweepAxis parse_axis(std::string_view text);

struct SweepCell {
  std::string value;
  std::vector<RunMetrics> seeds;
  std::string error;  // empty on success
};

/// One run per value per seed into <out_dir>/<key>=<value>/seed_<s>.
///
/// The offline dataset is shared across values unless the key changes it, and
/// pretraining is shared too when the key only affects the online phase. A
/// failing cell is recorded and the sweep moves on. Writes sweep_summary.csv
/// (one row per value and seed), sweep_curves.csv (seed-averaged online-ratio
/// curves) and sweep_scores.csv (seed-averaged score curves) to out_dir.
std::vector<SweepCell> sweep(const RunConfig& base, const SweepAxis& axis, std::ostream* log = nullptr);

}  // namespace arb

#endif  // ARB_HARNESS_SWEEP_HPP
