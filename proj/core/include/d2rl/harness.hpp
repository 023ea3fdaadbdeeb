#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "d2rl/agents.hpp"
#include "d2rl/config.hpp"
#include "d2rl/envs.hpp"
#include "d2rl/finite_mdp.hpp"
#include "d2rl/random.hpp"
#include "d2rl/record.hpp"

namespace d2rl {

/// Runs `steps` transitions of agent against env. The agent and the
/// environment draw from separate streams of `seed`. on_step(t, s, a, r, s',
/// trace) is called after each update, t = 1..steps.
template <class Obs, class OnStep>
void run_agent(Agent<Obs>& agent, Environment<Obs>& env, std::uint64_t steps, std::uint64_t seed,
               OnStep&& on_step) {
  Rng agent_rng(seed, streams::kAgent);
  Rng env_rng(seed, streams::kEnvironment);
  Obs s = env.reset(env_rng);
  for (std::uint64_t t = 1; t <= steps; ++t) {
    const std::size_t a = agent.act(s, agent_rng);
    EnvStep<Obs> out = env.step(a, env_rng);
    const StepTrace trace = agent.learn(s, a, out.reward, out.next_obs);
    on_step(t, s, a, out.reward, out.next_obs, trace);
    s = std::move(out.next_obs);
  }
}

/// The FiniteMdp behind a tabular config: the red-pill blue-pill model or
/// the file named by mdp_file.
FiniteMdp load_finite_mdp(const ExperimentConfig& cfg);

std::unique_ptr<Environment<std::size_t>> make_tabular_env(const ExperimentConfig& cfg, const FiniteMdp& mdp);
std::unique_ptr<TabularAgent> make_tabular_agent(const ExperimentConfig& cfg, const FiniteMdp& mdp);
std::unique_ptr<Environment<PendulumState>> make_pendulum_env(const ExperimentConfig& cfg);
std::unique_ptr<PendulumAgent> make_pendulum_agent(const ExperimentConfig& cfg);

struct RunSummary {
  double mean_reward = 0.0;    ///< average reward over all steps
  double final_rolling = 0.0;  ///< rolling_reward at the last step
  double final_rbar = 0.0;     ///< agent's average-reward estimate at the end
};

struct RunOutput {
  RunRecord record;
  RunSummary summary;
  /// step,table,index,value rows when cfg.table_snapshots is set.
  std::vector<std::vector<std::string>> tables;
};

/// Validates cfg (ConfigError before any stepping) and runs one seed.
/// Columns: step, reward, rolling_reward, mean_reward, rbar, theta_1..m and,
/// for the D3 agents, omega_1..n of the tracked cell (the upright state on
/// the pendulum). With keep_rows = false only the summary is produced.
RunOutput run_experiment(const ExperimentConfig& cfg, std::uint64_t seed, bool keep_rows = true);

/// `<output>_seed<N>.csv`, placed in $D2RL_OUTPUT_DIR when that is set.
std::filesystem::path record_path(const ExperimentConfig& cfg, std::uint64_t seed);
std::filesystem::path tables_path(const ExperimentConfig& cfg, std::uint64_t seed);

/// Runs seeds cfg.seed .. cfg.seed + n_seeds - 1 and writes their records.
/// Returns the written record paths in seed order.
std::vector<std::filesystem::path> run_and_write(const ExperimentConfig& cfg, std::size_t threads = 0);

struct SweepCell {
  std::vector<std::pair<std::string, std::string>> assignments;
  double mean_reward = 0.0;
  double final_rolling = 0.0;
  double final_rbar = 0.0;
  std::size_t n_ok = 0;
  std::string error;
};

/// Every grid cell applied on top of `base`, each run over `seeds`. Cell
/// values are means over seeds. A failing cell records its error and the
/// sweep continues. Results are in grid order whatever the completion order.
std::vector<SweepCell> run_sweep(const SweepSpec& spec, const ExperimentConfig& base,
                                 const std::vector<std::uint64_t>& seeds, std::size_t threads = 0);

/// Header: the swept keys, mean_reward, final_rolling, final_rbar, n_ok, error.
void write_sweep_summary(const std::filesystem::path& path, const SweepSpec& spec,
                         const std::vector<SweepCell>& cells);

/// Index of the cell with the highest mean_reward among cells without errors.
std::size_t best_cell(const std::vector<SweepCell>& cells);

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware).
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Oracle and plot reductions, as quantity,key1,key2,value / figure-ready CSV rows.

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(const std::filesystem::path& path) const;
  std::string to_string() const;
};

/// mu, reward_mass, cdf, quantile_lo/quantile_hi (key1 = i, key2 = tau),
/// rbar, rbar_star and q_star (key1 = s, key2 = a).
CsvTable oracle_table(const FiniteMdp& mdp, const PolicyTable& policy, std::size_t m);

/// step, mean, lo, hi, half_width of `column` across seed records.
CsvTable rolling_band(const std::vector<RunRecord>& records, const std::string& column = "rolling_reward");
/// step and the across-seed mean of every theta_i (and omega_j) column.
CsvTable quantile_curves(const std::vector<RunRecord>& records);
/// value, count, frequency of the reward column. With bins > 0 rewards are
/// grouped into equal-width bins and value is the bin centre.
CsvTable reward_histogram(const std::vector<RunRecord>& records, std::size_t bins = 0);

}  // namespace d2rl
