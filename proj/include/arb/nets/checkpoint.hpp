#ifndef ARB_NETS_CHECKPOINT_HPP
#define ARB_NETS_CHECKPOINT_HPP

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace arb {

/// Ordered set of named parameter tensors.
///
/// Text layout:
///   #arb-checkpoint v1 tensors=<k>
///   tensor <name> <rows> <cols>        (k manifest lines)
///   data
///   <rows*cols values, column-major>   (one line per tensor)
/// Values use the shortest round-tripping decimal, so save/load is bit-exact.
class Checkpoint {
 public:
  struct Entry {
    std::string name;
    Eigen::MatrixXd value;
  };

  void add(std::string name, Eigen::MatrixXd value);
  const Eigen::MatrixXd& get(const std::string& name) const;
  bool contains(const std::string& name) const;
  const std::vector<Entry>& entries() const { return entries_; }

  void write(std::ostream& out) const;
  static Checkpoint read(std::istream& in);

  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);

 private:
  std::vector<Entry> entries_;
};

}  // namespace arb

#endif  // ARB_NETS_CHECKPOINT_HPP
