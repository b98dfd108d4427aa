#ifndef ARB_CORE_DATASET_IO_HPP
#define ARB_CORE_DATASET_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "arb/core/types.hpp"

namespace arb {

/// Malformed dataset text; `line()` is 1-based, 0 when not tied to a line.
class DatasetFormatError : public std::runtime_error {
 public:
  DatasetFormatError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Text format, one transition per line after the header:
//
//   #arb-dataset v1 state_dim=<n> action_dim=<m>
//   traj_id,s_0..s_{n-1},a_0..a_{m-1},r,sn_0..sn_{n-1},done
//
// Numbers use the shortest decimal that round-trips; done is 0 or 1.
// Trajectories are contiguous row blocks with nondecreasing traj_id.

void write_dataset(const Dataset& dataset, std::ostream& out);
Dataset read_dataset(std::istream& in);

void dataset_save(const Dataset& dataset, const std::filesystem::path& path);
Dataset dataset_load(const std::filesystem::path& path);

}  // namespace arb

#endif  // ARB_CORE_DATASET_IO_HPP
