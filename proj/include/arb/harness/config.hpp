#ifndef ARB_HARNESS_CONFIG_HPP
#define ARB_HARNESS_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arb/algo/agent.hpp"
#include "arb/buffer/replay_buffer.hpp"
#include "arb/core/types.hpp"
#include "arb/onpolicy.hpp"

namespace arb {

struct Schedule {
  std::int64_t n_pretrain = 20000;
  std::int64_t n_interaction = 50000;
  std::int64_t d_weight = 1000;
  std::int64_t d_update = 1000;
  std::int64_t n_update = 1000;
  std::int64_t batch_size = 256;
  std::int64_t eval_every = 2500;
  std::int64_t eval_episodes = 20;
};

/// Everything one experiment needs. Parsed from `key = value` text; see
/// config_keys() for the accepted keys.
struct RunConfig {
  std::string env = "point-mass";
  std::optional<std::filesystem::path> dataset_path;
  Tier tier = Tier::Random;
  std::int64_t dataset_episodes = 200;
  std::int64_t dataset_min_transitions = 0;
  std::uint64_t data_seed = 7;

  BufferStrategy strategy = BufferStrategy::arb();
  std::int64_t capacity = 0;  // 0 = unlimited

  Schedule schedule;
  AgentHyper agent;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3};
  std::filesystem::path out_dir = "runs/default";

  void validate() const;

  /// Sets one key from its text form. Throws std::invalid_argument for unknown
  /// keys or unparsable values.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;

  /// Canonical text form; parse_config(to_text()) reproduces the config.
  std::string to_text() const;
};

const std::vector<std::string>& config_keys();

/// Keys that change only the online phase; runs differing in these share
/// the offline dataset and the pretrained agent.
bool is_online_only_key(std::string_view key);
/// Keys that leave the offline dataset unchanged.
bool is_dataset_independent_key(std::string_view key);

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace arb

#endif  // ARB_HARNESS_CONFIG_HPP
