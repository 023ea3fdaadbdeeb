#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "d2rl/envs.hpp"
#include "d2rl/oracle.hpp"
#include "d2rl/quantile.hpp"
#include "d2rl/tabular.hpp"

namespace d2rl {

enum class EnvId { kRedPillBluePill, kPendulum, kFiniteMdp };

enum class AlgorithmId { kD2Q, kD3Q, kDiffQ, kD2Td, kD3Td, kD2Ac, kD3Ac, kDiffAc };

std::string to_string(EnvId env);
std::string to_string(AlgorithmId algorithm);
EnvId parse_env(std::string_view text);
AlgorithmId parse_algorithm(std::string_view text);

/// True for the tile-coded actor-critics.
bool is_linear(AlgorithmId algorithm) noexcept;
/// True for the prediction agents that follow `policy`.
bool is_prediction(AlgorithmId algorithm) noexcept;

/// One experiment. Text form is one `key = value` per line, `#` starts a
/// comment, unknown keys are errors. Keys:
///
///   env                rpbp | pendulum | mdp
///   mdp_file           path of a FiniteMdp text file (env = mdp)
///   algorithm          d2_q | d3_q | diff_q | d2_td | d3_td | d2_ac | d3_ac | diff_ac
///   alpha              base step size
///   alpha_schedule     constant | poly:<power> | hold:<steps>:<power>
///   eta_theta, eta_rbar, eta_pi, epsilon, huber_lambda
///   m, n               reward / return quantile counts
///   total_steps, n_seeds, seed      seeds used are seed, seed + 1, ...
///   snapshot_interval  record every k-th step
///   rolling_window     trailing window of the rolling_reward column
///   output             record prefix; files are <output>_seed<N>.csv
///   table_snapshots    also write <output>_seed<N>_tables.csv
///   track_state, track_action       Omega cell recorded by the D3 agents
///   policy             behavior of the prediction agents (see parse_policy_spec)
///   blue_rewards, red_rewards       comma-separated uniform supports (rpbp)
///   reward_on_arrival, start_state  rpbp dynamics
///   n_tilings, tiles, init_noise    pendulum coder and start-state noise
struct ExperimentConfig {
  EnvId env = EnvId::kRedPillBluePill;
  std::string mdp_file;
  AlgorithmId algorithm = AlgorithmId::kD2Q;

  AgentHyper hyper;
  std::string alpha_schedule = "constant";
  double huber_lambda = 1.0;
  std::size_t m = 10;
  std::size_t n = 10;

  std::uint64_t total_steps = 100000;
  std::size_t n_seeds = 1;
  std::uint64_t seed = 0;
  std::uint64_t snapshot_interval = 1;
  std::size_t rolling_window = 1000;
  std::string output = "run";
  bool table_snapshots = false;
  std::size_t track_state = 0;
  std::size_t track_action = 0;
  std::string policy = "uniform";

  std::vector<double> blue_rewards{0.0, 1.0, 2.0};
  std::vector<double> red_rewards{-2.0, -1.0, 0.0};
  bool reward_on_arrival = true;
  std::size_t start_state = 0;

  std::size_t n_tilings = 32;
  std::size_t tiles = 8;
  double init_noise = 0.05;

  /// Sets one key from its text value. Throws ConfigError on an unknown key
  /// or a malformed value.
  void set(std::string_view key, std::string_view value);
  /// Throws ConfigError when values or the env/algorithm pairing are invalid.
  void validate() const;

  /// Every key in canonical order with its current value.
  std::vector<std::pair<std::string, std::string>> entries() const;
  std::string to_text() const;
  /// FNV-1a over to_text() with `output` and `seed` excluded.
  std::uint64_t hash() const;

  StepSchedule schedule() const { return StepSchedule::parse(alpha_schedule, hyper.alpha); }
  RedPillBluePillConfig rpbp() const;
  PendulumParams pendulum() const;

  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig read(const std::filesystem::path& path);
  static const std::vector<std::string>& keys();
};

/// Cartesian grid over config keys. Text form: `key = v1, v2, ...` per line.
/// Cells enumerate with the first key varying slowest.
struct SweepSpec {
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;

  std::size_t size() const noexcept;
  /// (key, value) assignments of cell `index`.
  std::vector<std::pair<std::string, std::string>> cell(std::size_t index) const;
  /// Throws ConfigError on an empty grid, an unknown key or a repeated key.
  void validate() const;

  static SweepSpec parse(std::string_view text);
  static SweepSpec read(const std::filesystem::path& path);
};

/// `uniform`, `fixed:<action>:<epsilon>` (one action everywhere, epsilon-greedy
/// around it), `optimal:<epsilon>` (epsilon-greedy around the RVI greedy
/// policy), `table:<path>` (whitespace rows of action probabilities).
PolicyTable parse_policy_spec(std::string_view spec, const FiniteMdp& mdp);

}  // namespace d2rl
