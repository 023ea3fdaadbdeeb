#include "d2rl/config.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "d2rl/errors.hpp"
#include "d2rl/text.hpp"

namespace d2rl {

namespace {

constexpr std::pair<EnvId, std::string_view> kEnvNames[] = {
    {EnvId::kRedPillBluePill, "rpbp"}, {EnvId::kPendulum, "pendulum"}, {EnvId::kFiniteMdp, "mdp"}};

constexpr std::pair<AlgorithmId, std::string_view> kAlgorithmNames[] = {
    {AlgorithmId::kD2Q, "d2_q"},   {AlgorithmId::kD3Q, "d3_q"},   {AlgorithmId::kDiffQ, "diff_q"},
    {AlgorithmId::kD2Td, "d2_td"}, {AlgorithmId::kD3Td, "d3_td"}, {AlgorithmId::kD2Ac, "d2_ac"},
    {AlgorithmId::kD3Ac, "d3_ac"}, {AlgorithmId::kDiffAc, "diff_ac"}};

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += text::format_double(values[i]);
  }
  return out;
}

std::vector<double> parse_list(std::string_view value) {
  std::vector<double> out;
  for (auto field : text::split(value, ',')) out.push_back(text::parse_double(field));
  return out;
}

std::size_t parse_size(std::string_view value) { return static_cast<std::size_t>(text::parse_uint(value)); }

struct Field {
  std::string_view key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view)> set;
};

#define D2RL_DOUBLE(KEY, MEMBER)                                                   \
  Field {                                                                          \
    KEY, [](const ExperimentConfig& c) { return text::format_double(c.MEMBER); }, \
        [](ExperimentConfig& c, std::string_view v) { c.MEMBER = text::parse_double(v); } \
  }
#define D2RL_SIZE(KEY, MEMBER)                                                     \
  Field {                                                                          \
    KEY, [](const ExperimentConfig& c) { return std::to_string(c.MEMBER); },      \
        [](ExperimentConfig& c, std::string_view v) { c.MEMBER = parse_size(v); } \
  }
#define D2RL_U64(KEY, MEMBER)                                                      \
  Field {                                                                          \
    KEY, [](const ExperimentConfig& c) { return std::to_string(c.MEMBER); },      \
        [](ExperimentConfig& c, std::string_view v) { c.MEMBER = text::parse_uint(v); } \
  }
#define D2RL_BOOL(KEY, MEMBER)                                                          \
  Field {                                                                               \
    KEY, [](const ExperimentConfig& c) { return std::string(c.MEMBER ? "true" : "false"); }, \
        [](ExperimentConfig& c, std::string_view v) { c.MEMBER = text::parse_bool(v); }  \
  }
#define D2RL_STRING(KEY, MEMBER)                                        \
  Field {                                                               \
    KEY, [](const ExperimentConfig& c) { return c.MEMBER; },           \
        [](ExperimentConfig& c, std::string_view v) { c.MEMBER = v; } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"env", [](const ExperimentConfig& c) { return to_string(c.env); },
            [](ExperimentConfig& c, std::string_view v) { c.env = parse_env(v); }},
      D2RL_STRING("mdp_file", mdp_file),
      Field{"algorithm", [](const ExperimentConfig& c) { return to_string(c.algorithm); },
            [](ExperimentConfig& c, std::string_view v) { c.algorithm = parse_algorithm(v); }},
      D2RL_DOUBLE("alpha", hyper.alpha),
      D2RL_STRING("alpha_schedule", alpha_schedule),
      D2RL_DOUBLE("eta_theta", hyper.eta_theta),
      D2RL_DOUBLE("eta_rbar", hyper.eta_rbar),
      D2RL_DOUBLE("eta_pi", hyper.eta_pi),
      D2RL_DOUBLE("epsilon", hyper.epsilon),
      D2RL_DOUBLE("huber_lambda", huber_lambda),
      D2RL_SIZE("m", m),
      D2RL_SIZE("n", n),
      D2RL_U64("total_steps", total_steps),
      D2RL_SIZE("n_seeds", n_seeds),
      D2RL_U64("seed", seed),
      D2RL_U64("snapshot_interval", snapshot_interval),
      D2RL_SIZE("rolling_window", rolling_window),
      D2RL_STRING("output", output),
      D2RL_BOOL("table_snapshots", table_snapshots),
      D2RL_SIZE("track_state", track_state),
      D2RL_SIZE("track_action", track_action),
      D2RL_STRING("policy", policy),
      Field{"blue_rewards", [](const ExperimentConfig& c) { return format_list(c.blue_rewards); },
            [](ExperimentConfig& c, std::string_view v) { c.blue_rewards = parse_list(v); }},
      Field{"red_rewards", [](const ExperimentConfig& c) { return format_list(c.red_rewards); },
            [](ExperimentConfig& c, std::string_view v) { c.red_rewards = parse_list(v); }},
      D2RL_BOOL("reward_on_arrival", reward_on_arrival),
      D2RL_SIZE("start_state", start_state),
      D2RL_SIZE("n_tilings", n_tilings),
      D2RL_SIZE("tiles", tiles),
      D2RL_DOUBLE("init_noise", init_noise),
  };
  return table;
}

#undef D2RL_DOUBLE
#undef D2RL_SIZE
#undef D2RL_U64
#undef D2RL_BOOL
#undef D2RL_STRING

const Field* find_field(std::string_view key) {
  for (const auto& f : fields())
    if (f.key == key) return &f;
  return nullptr;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Calls fn(line_number, key, value) for every `key = value` line.
template <class Fn>
void for_each_assignment(std::string_view text_in, Fn fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text_in.size()) {
    const auto end = text_in.find('\n', pos);
    auto line = text_in.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text_in.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
    const auto key = text::trim(line.substr(0, eq));
    const auto value = text::trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "empty key");
    fn(line_no, key, value);
  }
}

}  // namespace

std::string to_string(EnvId env) {
  for (auto [id, name] : kEnvNames)
    if (id == env) return std::string(name);
  return "?";
}

std::string to_string(AlgorithmId algorithm) {
  for (auto [id, name] : kAlgorithmNames)
    if (id == algorithm) return std::string(name);
  return "?";
}

EnvId parse_env(std::string_view text_in) {
  for (auto [id, name] : kEnvNames)
    if (name == text_in) return id;
  throw ConfigError("unknown env '" + std::string(text_in) + "'");
}

AlgorithmId parse_algorithm(std::string_view text_in) {
  for (auto [id, name] : kAlgorithmNames)
    if (name == text_in) return id;
  throw ConfigError("unknown algorithm '" + std::string(text_in) + "'");
}

bool is_linear(AlgorithmId algorithm) noexcept {
  return algorithm == AlgorithmId::kD2Ac || algorithm == AlgorithmId::kD3Ac || algorithm == AlgorithmId::kDiffAc;
}

bool is_prediction(AlgorithmId algorithm) noexcept {
  return algorithm == AlgorithmId::kD2Td || algorithm == AlgorithmId::kD3Td;
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  const Field* field = find_field(key);
  if (!field) throw ConfigError("unknown key '" + std::string(key) + "'");
  try {
    field->set(*this, value);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("bad value for '" + std::string(key) + "': " + e.what());
  }
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  try {
    hyper.validate();
    HuberParams{huber_lambda}.validate();
    (void)schedule();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (total_steps < 1) fail("total_steps must be at least 1");
  if (m < 1 || n < 1) fail("m and n must be at least 1");
  if (n_seeds < 1) fail("n_seeds must be at least 1");
  if (snapshot_interval < 1) fail("snapshot_interval must be at least 1");
  if (rolling_window < 1) fail("rolling_window must be at least 1");
  if (output.empty()) fail("output must not be empty");

  const bool linear = is_linear(algorithm);
  if (linear && env != EnvId::kPendulum) fail(to_string(algorithm) + " needs env = pendulum");
  if (!linear && env == EnvId::kPendulum) fail(to_string(algorithm) + " is tabular; pendulum needs an actor-critic");
  if (env == EnvId::kFiniteMdp && mdp_file.empty()) fail("env = mdp needs mdp_file");
  if (env == EnvId::kRedPillBluePill) {
    try {
      rpbp().validate();
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    if (track_state >= 2 || track_action >= 2) fail("track cell out of range for rpbp");
  }
  if (env == EnvId::kPendulum) {
    if (n_tilings < 1 || tiles < 1) fail("n_tilings and tiles must be at least 1");
    if (!(init_noise >= 0.0)) fail("init_noise must be nonnegative");
  }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(std::string(f.key), f.get(*this));
  return out;
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  for (const auto& [key, value] : entries()) out += key + " = " + value + "\n";
  return out;
}

std::uint64_t ExperimentConfig::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (const auto& [key, value] : entries()) {
    if (key == "output" || key == "seed") continue;
    for (char c : key + "=" + value + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
  }
  return h;
}

RedPillBluePillConfig ExperimentConfig::rpbp() const {
  RedPillBluePillConfig cfg;
  cfg.blue_reward = DiscreteDistribution::uniform(blue_rewards);
  cfg.red_reward = DiscreteDistribution::uniform(red_rewards);
  cfg.reward_on_arrival = reward_on_arrival;
  if (start_state > 1) throw ConfigError("start_state must be 0 (red) or 1 (blue)");
  cfg.start = start_state == 0 ? World::kRed : World::kBlue;
  return cfg;
}

PendulumParams ExperimentConfig::pendulum() const {
  PendulumParams params;
  params.init_noise = init_noise;
  return params;
}

ExperimentConfig ExperimentConfig::parse(std::string_view text_in) {
  ExperimentConfig cfg;
  std::set<std::string, std::less<>> seen;
  for_each_assignment(text_in, [&](std::size_t line, std::string_view key, std::string_view value) {
    if (!seen.emplace(key).second) throw ParseError(line, "duplicate key '" + std::string(key) + "'");
    try {
      cfg.set(key, value);
    } catch (const ConfigError& e) {
      throw ParseError(line, e.what());
    }
  });
  return cfg;
}

ExperimentConfig ExperimentConfig::read(const std::filesystem::path& path) { return parse(slurp(path)); }

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.emplace_back(f.key);
    return out;
  }();
  return names;
}

// ---------------------------------------------------------------------------

std::size_t SweepSpec::size() const noexcept {
  if (axes.empty()) return 0;
  std::size_t total = 1;
  for (const auto& [key, values] : axes) total *= values.size();
  return total;
}

std::vector<std::pair<std::string, std::string>> SweepSpec::cell(std::size_t index) const {
  if (index >= size()) throw std::out_of_range("SweepSpec: cell index out of range");
  std::vector<std::pair<std::string, std::string>> out(axes.size());
  for (std::size_t d = axes.size(); d-- > 0;) {
    const auto& values = axes[d].second;
    out[d] = {axes[d].first, values[index % values.size()]};
    index /= values.size();
  }
  return out;
}

void SweepSpec::validate() const {
  if (axes.empty()) throw ConfigError("sweep grid is empty");
  std::set<std::string> seen;
  for (const auto& [key, values] : axes) {
    if (!find_field(key)) throw ConfigError("unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError("repeated sweep key '" + key + "'");
    if (values.empty()) throw ConfigError("sweep key '" + key + "' has no values");
  }
}

SweepSpec SweepSpec::parse(std::string_view text_in) {
  SweepSpec spec;
  for_each_assignment(text_in, [&](std::size_t line, std::string_view key, std::string_view value) {
    std::vector<std::string> values;
    for (auto field : text::split(value, ',')) {
      if (field.empty()) throw ParseError(line, "empty value in list");
      values.emplace_back(field);
    }
    spec.axes.emplace_back(std::string(key), std::move(values));
  });
  spec.validate();
  return spec;
}

SweepSpec SweepSpec::read(const std::filesystem::path& path) { return parse(slurp(path)); }

// ---------------------------------------------------------------------------

PolicyTable parse_policy_spec(std::string_view spec, const FiniteMdp& mdp) {
  const auto parts = text::split(spec, ':');
  const auto kind = parts.front();
  const std::size_t S = mdp.n_states();
  const std::size_t A = mdp.n_actions();
  try {
    if (kind == "uniform" && parts.size() == 1) return PolicyTable::uniform(S, A);
    if (kind == "fixed" && parts.size() == 3) {
      const auto action = static_cast<std::size_t>(text::parse_uint(parts[1]));
      if (action >= A) throw ConfigError("policy action out of range");
      const std::vector<std::size_t> greedy(S, action);
      return PolicyTable::epsilon_greedy(A, greedy, text::parse_double(parts[2]));
    }
    if (kind == "optimal" && parts.size() == 2) {
      const auto rvi = relative_value_iteration(mdp);
      return PolicyTable::epsilon_greedy(A, greedy_actions(rvi.q_star), text::parse_double(parts[1]));
    }
    if (kind == "table" && parts.size() >= 2) {
      const auto path = std::string(spec.substr(spec.find(':') + 1));
      const std::string body = slurp(path);
      std::vector<double> probs;
      std::size_t line_no = 0;
      std::istringstream in(body);
      std::string line;
      while (std::getline(in, line)) {
        ++line_no;
        const auto fields_in = text::split_whitespace(line);
        if (fields_in.empty() || fields_in.front().front() == '#') continue;
        if (fields_in.size() != A) throw ParseError(line_no, "expected " + std::to_string(A) + " probabilities");
        for (auto f : fields_in) probs.push_back(text::parse_double(f));
      }
      if (probs.size() != S * A) throw ConfigError("policy table needs " + std::to_string(S) + " rows");
      return PolicyTable(S, A, std::move(probs));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("bad policy spec '" + std::string(spec) + "': " + e.what());
  }
  throw ConfigError("bad policy spec '" + std::string(spec) + "'");
}

}  // namespace d2rl
