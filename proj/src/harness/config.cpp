#include "arb/harness/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "arb/core/text.hpp"
#include "arb/envs/env.hpp"

namespace arb {

namespace {

std::string fmt(double v) { return text::format_double(v); }

double to_double(std::string_view key, std::string_view value) {
  auto v = text::parse_double(value);
  if (!v || !std::isfinite(*v)) throw std::invalid_argument("config: '" + std::string(key) + "' expects a number");
  return *v;
}

std::int64_t to_int(std::string_view key, std::string_view value) {
  auto v = text::parse_int(value);
  if (!v) throw std::invalid_argument("config: '" + std::string(key) + "' expects an integer");
  return *v;
}

std::uint64_t to_uint(std::string_view key, std::string_view value) {
  const std::int64_t v = to_int(key, value);
  if (v < 0) throw std::invalid_argument("config: '" + std::string(key) + "' must be >= 0");
  return static_cast<std::uint64_t>(v);
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config: '" + std::string(key) + "' expects true or false");
}

template <typename T, typename Parse>
std::vector<T> to_list(std::string_view key, std::string_view value, Parse parse) {
  std::vector<T> out;
  for (auto field : text::split(value, ',')) out.push_back(parse(key, text::trim(field)));
  if (out.empty()) throw std::invalid_argument("config: '" + std::string(key) + "' expects a list");
  return out;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + std::to_string(values[i]);
  return out;
}

struct Field {
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define ARB_INT_FIELD(name, member)                                                         \
  {name, {[](RunConfig& c, std::string_view v) { c.member = to_int(name, v); },             \
          [](const RunConfig& c) { return std::to_string(c.member); }}}
#define ARB_REAL_FIELD(name, member)                                                        \
  {name, {[](RunConfig& c, std::string_view v) { c.member = to_double(name, v); },          \
          [](const RunConfig& c) { return fmt(c.member); }}}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table{
      {"env", {[](RunConfig& c, std::string_view v) { c.env = std::string(v); },
               [](const RunConfig& c) { return c.env; }}},
      {"dataset", {[](RunConfig& c, std::string_view v) {
                     if (v.empty() || v == "none") c.dataset_path.reset();
                     else c.dataset_path = std::filesystem::path(std::string(v));
                   },
                   [](const RunConfig& c) { return c.dataset_path ? c.dataset_path->string() : std::string("none"); }}},
      {"tier", {[](RunConfig& c, std::string_view v) { c.tier = parse_tier(v); },
                [](const RunConfig& c) { return std::string(to_string(c.tier)); }}},
      ARB_INT_FIELD("dataset_episodes", dataset_episodes),
      ARB_INT_FIELD("dataset_min_transitions", dataset_min_transitions),
      {"data_seed", {[](RunConfig& c, std::string_view v) { c.data_seed = to_uint("data_seed", v); },
                     [](const RunConfig& c) { return std::to_string(c.data_seed); }}},
      {"strategy", {[](RunConfig& c, std::string_view v) { c.strategy.kind = parse_strategy_kind(v); },
                    [](const RunConfig& c) { return std::string(to_string(c.strategy.kind)); }}},
      {"top_n", {[](RunConfig& c, std::string_view v) {
                   const auto n = to_int("top_n", v);
                   if (n < 1) throw std::invalid_argument("config: 'top_n' must be >= 1");
                   c.strategy.top_n = static_cast<std::size_t>(n);
                 },
                 [](const RunConfig& c) { return std::to_string(c.strategy.top_n); }}},
      {"sampling", {[](RunConfig& c, std::string_view v) { c.strategy.mode = parse_sampling_mode(v); },
                    [](const RunConfig& c) { return std::string(to_string(c.strategy.mode)); }}},
      ARB_REAL_FIELD("lambda", strategy.onpolicy.lambda),
      ARB_REAL_FIELD("p_lo", strategy.onpolicy.p_lo),
      ARB_REAL_FIELD("p_hi", strategy.onpolicy.p_hi),
      {"level", {[](RunConfig& c, std::string_view v) { c.strategy.onpolicy.level = parse_weight_level(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.strategy.onpolicy.level)); }}},
      {"normalize_by_action_dim",
       {[](RunConfig& c, std::string_view v) {
          c.strategy.onpolicy.normalize_by_action_dim = to_bool("normalize_by_action_dim", v);
        },
        [](const RunConfig& c) { return std::string(c.strategy.onpolicy.normalize_by_action_dim ? "true" : "false"); }}},
      ARB_INT_FIELD("capacity", capacity),
      ARB_INT_FIELD("n_pretrain", schedule.n_pretrain),
      ARB_INT_FIELD("n_interaction", schedule.n_interaction),
      ARB_INT_FIELD("d_weight", schedule.d_weight),
      ARB_INT_FIELD("d_update", schedule.d_update),
      ARB_INT_FIELD("n_update", schedule.n_update),
      ARB_INT_FIELD("batch_size", schedule.batch_size),
      ARB_INT_FIELD("eval_every", schedule.eval_every),
      ARB_INT_FIELD("eval_episodes", schedule.eval_episodes),
      ARB_REAL_FIELD("discount", agent.discount),
      ARB_REAL_FIELD("expectile", agent.expectile),
      ARB_REAL_FIELD("temperature", agent.temperature),
      ARB_REAL_FIELD("soft_update", agent.soft_update),
      ARB_REAL_FIELD("max_exponent", agent.max_exponent),
      ARB_REAL_FIELD("lr", agent.lr),
      {"hidden", {[](RunConfig& c, std::string_view v) {
                    c.agent.hidden = to_list<Index>("hidden", v, [](std::string_view k, std::string_view f) {
                      return static_cast<Index>(to_int(k, f));
                    });
                  },
                  [](const RunConfig& c) { return join(c.agent.hidden); }}},
      {"seeds", {[](RunConfig& c, std::string_view v) { c.seeds = to_list<std::uint64_t>("seeds", v, to_uint); },
                 [](const RunConfig& c) { return join(c.seeds); }}},
      {"out_dir", {[](RunConfig& c, std::string_view v) { c.out_dir = std::filesystem::path(std::string(v)); },
                   [](const RunConfig& c) { return c.out_dir.string(); }}},
  };
  return table;
}

#undef ARB_INT_FIELD
#undef ARB_REAL_FIELD

const Field& field(std::string_view key) {
  for (const auto& [name, f] : fields()) {
    if (name == key) return f;
  }
  throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& entry : fields()) out.push_back(entry.first);
    return out;
  }();
  return keys;
}

bool is_online_only_key(std::string_view key) {
  static const std::set<std::string, std::less<>> keys{
      "strategy", "top_n",  "sampling", "lambda",   "p_lo",     "p_hi",       "level",        "normalize_by_action_dim",
      "capacity", "n_interaction", "d_weight", "d_update", "n_update", "eval_every", "eval_episodes", "out_dir"};
  return keys.contains(key);
}

bool is_dataset_independent_key(std::string_view key) {
  static const std::set<std::string, std::less<>> dataset_keys{"env", "dataset", "tier", "dataset_episodes",
                                                               "dataset_min_transitions", "data_seed"};
  return !dataset_keys.contains(key);
}

void RunConfig::set(std::string_view key, std::string_view value) { field(key).set(*this, text::trim(value)); }

std::string RunConfig::get(std::string_view key) const { return field(key).get(*this); }

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& [name, f] : fields()) out += name + " = " + f.get(*this) + "\n";
  return out;
}

void RunConfig::validate() const {
  env_spec(env);
  strategy.validate();
  agent.validate();
  const Schedule& s = schedule;
  if (s.d_weight < 1 || s.d_update < 1 || s.n_update < 1) {
    throw std::invalid_argument("config: d_weight, d_update and n_update must be >= 1");
  }
  if (s.batch_size < 1 || s.eval_every < 1 || s.eval_episodes < 1) {
    throw std::invalid_argument("config: batch_size, eval_every and eval_episodes must be >= 1");
  }
  if (s.n_pretrain < 0 || s.n_interaction < 0) throw std::invalid_argument("config: step counts must be >= 0");
  if (capacity < 0) throw std::invalid_argument("config: capacity must be >= 0");
  if (!dataset_path && dataset_episodes < 1 && dataset_min_transitions < 1) {
    throw std::invalid_argument("config: dataset_episodes must be >= 1");
  }
  if (seeds.empty()) throw std::invalid_argument("config: need at least one seed");
}

RunConfig parse_config(std::string_view content) {
  RunConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  for (auto raw : text::split(content, '\n')) {
    ++line_no;
    auto line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = text::trim(line.substr(0, eq));
    if (!seen.insert(std::string(key)).second) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
    }
    try {
      cfg.set(key, line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_config(ss.str());
  if (cfg.dataset_path && cfg.dataset_path->is_relative()) {
    cfg.dataset_path = path.parent_path() / *cfg.dataset_path;
  }
  return cfg;
}

}  // namespace arb
