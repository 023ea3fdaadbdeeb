// d2rl: run, sweep, oracle, plotdata and mdp subcommands.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "d2rl/config.hpp"
#include "d2rl/envs.hpp"
#include "d2rl/errors.hpp"
#include "d2rl/harness.hpp"
#include "d2rl/oracle.hpp"
#include "d2rl/text.hpp"

namespace fs = std::filesystem;
using namespace d2rl;

namespace {

void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& overrides) {
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + item + "'");
    cfg.set(text::trim(std::string_view(item).substr(0, eq)), text::trim(std::string_view(item).substr(eq + 1)));
  }
}

void emit(const CsvTable& table, const std::string& out) {
  if (out.empty() || out == "-")
    std::cout << table.to_string();
  else
    table.write(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributional average-reward RL experiments"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run one config over its seeds and write run records");
  std::string run_config;
  std::vector<std::string> run_sets;
  std::size_t run_threads = 0;
  run->add_option("config", run_config, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--set", run_sets, "Override a config key (key=value)");
  run->add_option("--threads", run_threads, "Worker threads (0 = all cores)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a hyperparameter grid and write a summary table");
  std::string sweep_config, sweep_grid, sweep_out = "sweep_summary.csv";
  std::vector<std::string> sweep_sets;
  std::size_t sweep_threads = 0;
  sweep->add_option("config", sweep_config, "Base config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("grid", sweep_grid, "Grid file (key = v1, v2, ...)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--set", sweep_sets, "Override a base config key (key=value)");
  sweep->add_option("-o,--out", sweep_out, "Summary CSV");
  sweep->add_option("--threads", sweep_threads, "Worker threads (0 = all cores)");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exact quantities of a finite MDP under a policy");
  std::string oracle_mdp, oracle_policy = "optimal:0.1", oracle_out;
  std::size_t oracle_m = 10;
  oracle->add_option("--mdp", oracle_mdp, "MDP file (default: red-pill blue-pill)");
  oracle->add_option("--policy", oracle_policy,
                     "uniform | fixed:<a>:<eps> | optimal:<eps> | table:<path>");
  oracle->add_option("-m", oracle_m, "Number of quantile levels");
  oracle->add_option("-o,--out", oracle_out, "Output CSV (default stdout)");

  // plotdata
  auto* plot = app.add_subcommand("plotdata", "Reduce run records to figure-ready CSV");
  std::string plot_kind = "rolling", plot_column = "rolling_reward", plot_out;
  std::size_t plot_bins = 0;
  std::vector<std::string> plot_inputs;
  plot->add_option("--kind", plot_kind, "rolling | quantiles | histogram")
      ->check(CLI::IsMember({"rolling", "quantiles", "histogram"}));
  plot->add_option("--column", plot_column, "Column for --kind rolling");
  plot->add_option("--bins", plot_bins, "Histogram bins (0 = one row per distinct reward)");
  plot->add_option("-o,--out", plot_out, "Output CSV (default stdout)");
  plot->add_option("records", plot_inputs, "Run record CSVs")->required()->check(CLI::ExistingFile);

  // mdp
  auto* mdp_cmd = app.add_subcommand("mdp", "Write an MDP file");
  std::string mdp_kind = "rpbp", mdp_out, mdp_support = "-1,0,1";
  std::size_t mdp_states = 4, mdp_actions = 2;
  std::uint64_t mdp_seed = 0;
  mdp_cmd->add_option("--kind", mdp_kind, "rpbp | random")->check(CLI::IsMember({"rpbp", "random"}));
  mdp_cmd->add_option("--states", mdp_states, "States of a random MDP");
  mdp_cmd->add_option("--actions", mdp_actions, "Actions of a random MDP");
  mdp_cmd->add_option("--support", mdp_support, "Comma-separated reward support of a random MDP");
  mdp_cmd->add_option("--seed", mdp_seed, "Generator seed");
  mdp_cmd->add_option("-o,--out", mdp_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      auto cfg = ExperimentConfig::read(run_config);
      apply_overrides(cfg, run_sets);
      for (const auto& path : run_and_write(cfg, run_threads)) std::cout << path.string() << '\n';
    } else if (sweep->parsed()) {
      auto cfg = ExperimentConfig::read(sweep_config);
      apply_overrides(cfg, sweep_sets);
      cfg.validate();
      const auto spec = SweepSpec::read(sweep_grid);
      std::vector<std::uint64_t> seeds;
      for (std::size_t i = 0; i < cfg.n_seeds; ++i) seeds.push_back(cfg.seed + i);
      const auto cells = run_sweep(spec, cfg, seeds, sweep_threads);
      write_sweep_summary(sweep_out, spec, cells);
      std::size_t failed = 0;
      for (const auto& c : cells) failed += c.error.empty() ? 0 : 1;
      std::cout << sweep_out << ": " << cells.size() << " cells, " << failed << " failed\n";
      if (failed < cells.size()) {
        const auto& best = cells[best_cell(cells)];
        std::cout << "best:";
        for (const auto& [k, v] : best.assignments) std::cout << ' ' << k << '=' << v;
        std::cout << " mean_reward=" << text::format_double(best.mean_reward) << '\n';
      }
    } else if (oracle->parsed()) {
      const FiniteMdp mdp = oracle_mdp.empty() ? rpbp_as_finite_mdp({}) : FiniteMdp::read(oracle_mdp);
      emit(oracle_table(mdp, parse_policy_spec(oracle_policy, mdp), oracle_m), oracle_out);
    } else if (plot->parsed()) {
      std::vector<RunRecord> records;
      for (const auto& path : plot_inputs) records.push_back(RunRecord::read(path));
      if (plot_kind == "rolling")
        emit(rolling_band(records, plot_column), plot_out);
      else if (plot_kind == "quantiles")
        emit(quantile_curves(records), plot_out);
      else
        emit(reward_histogram(records, plot_bins), plot_out);
    } else if (mdp_cmd->parsed()) {
      FiniteMdp mdp = rpbp_as_finite_mdp({});
      if (mdp_kind == "random") {
        std::vector<double> support;
        for (auto f : text::split(mdp_support, ',')) support.push_back(text::parse_double(f));
        Rng rng(mdp_seed, streams::kGenerator);
        mdp = random_unichain_mdp(mdp_states, mdp_actions, support, rng);
      }
      if (mdp_out.empty())
        std::cout << mdp.to_text();
      else
        mdp.write(mdp_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "d2rl: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
