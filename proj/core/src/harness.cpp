#include "d2rl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <thread>

#include "d2rl/errors.hpp"
#include "d2rl/oracle.hpp"
#include "d2rl/stats.hpp"
#include "d2rl/text.hpp"

namespace d2rl {

using text::format_double;

// ---------------------------------------------------------------------------
// Construction

FiniteMdp load_finite_mdp(const ExperimentConfig& cfg) {
  switch (cfg.env) {
    case EnvId::kRedPillBluePill:
      return rpbp_as_finite_mdp(cfg.rpbp());
    case EnvId::kFiniteMdp:
      return FiniteMdp::read(cfg.mdp_file);
    case EnvId::kPendulum:
      break;
  }
  throw ConfigError("pendulum has no finite model");
}

std::unique_ptr<Environment<std::size_t>> make_tabular_env(const ExperimentConfig& cfg, const FiniteMdp& mdp) {
  if (cfg.env == EnvId::kRedPillBluePill) return std::make_unique<RedPillBluePill>(cfg.rpbp());
  if (cfg.env == EnvId::kFiniteMdp) {
    if (cfg.start_state >= mdp.n_states()) throw ConfigError("start_state out of range");
    return std::make_unique<FiniteMdpEnvironment>(mdp, cfg.start_state);
  }
  throw ConfigError("env " + to_string(cfg.env) + " is not tabular");
}

std::unique_ptr<TabularAgent> make_tabular_agent(const ExperimentConfig& cfg, const FiniteMdp& mdp) {
  const std::size_t S = mdp.n_states();
  const std::size_t A = mdp.n_actions();
  const auto schedule = cfg.schedule();
  switch (cfg.algorithm) {
    case AlgorithmId::kD2Q:
      return std::make_unique<D2QAgent>(S, A, cfg.m, cfg.hyper, schedule);
    case AlgorithmId::kD3Q:
      return std::make_unique<D3QAgent>(S, A, cfg.m, cfg.n, cfg.hyper, schedule);
    case AlgorithmId::kDiffQ:
      return std::make_unique<DifferentialQAgent>(S, A, cfg.hyper, schedule);
    case AlgorithmId::kD2Td:
      return std::make_unique<D2TdAgent>(parse_policy_spec(cfg.policy, mdp), cfg.m, cfg.hyper, schedule);
    case AlgorithmId::kD3Td:
      return std::make_unique<D3TdAgent>(parse_policy_spec(cfg.policy, mdp), cfg.m, cfg.n, cfg.hyper, schedule);
    default:
      break;
  }
  throw ConfigError(to_string(cfg.algorithm) + " is not a tabular agent");
}

std::unique_ptr<Environment<PendulumState>> make_pendulum_env(const ExperimentConfig& cfg) {
  return std::make_unique<Pendulum>(cfg.pendulum());
}

std::unique_ptr<PendulumAgent> make_pendulum_agent(const ExperimentConfig& cfg) {
  const auto coder = TileCoder::pendulum(cfg.n_tilings, cfg.tiles);
  const std::size_t A = kPendulumTorques.size();
  const auto schedule = cfg.schedule();
  switch (cfg.algorithm) {
    case AlgorithmId::kD2Ac:
      return std::make_unique<D2ActorCriticAgent>(coder, A, cfg.m, cfg.hyper, schedule);
    case AlgorithmId::kD3Ac:
      return std::make_unique<D3ActorCriticAgent>(coder, A, cfg.m, cfg.n, cfg.hyper, schedule,
                                                  HuberParams{cfg.huber_lambda});
    case AlgorithmId::kDiffAc:
      return std::make_unique<DifferentialActorCriticAgent>(coder, A, cfg.hyper, schedule);
    default:
      break;
  }
  throw ConfigError(to_string(cfg.algorithm) + " is not a pendulum agent");
}

// ---------------------------------------------------------------------------
// Single runs

namespace {

template <class Obs>
RunOutput record_run(const ExperimentConfig& cfg, std::uint64_t seed, Agent<Obs>& agent, Environment<Obs>& env,
                     const Obs& tracked_state, std::size_t tracked_action, bool keep_rows) {
  RunOutput out;
  auto& record = out.record;
  record.metadata = {{"config_hash", std::to_string(cfg.hash())},
                     {"seed", std::to_string(seed)},
                     {"env", to_string(cfg.env)},
                     {"algorithm", to_string(cfg.algorithm)},
                     {"m", std::to_string(cfg.m)},
                     {"n", std::to_string(cfg.n)},
                     {"total_steps", std::to_string(cfg.total_steps)},
                     {"rolling_window", std::to_string(cfg.rolling_window)}};
  record.columns = {"step", "reward", "rolling_reward", "mean_reward", "rbar"};
  const std::size_t n_theta = agent.reward_quantiles().size();
  const std::size_t n_omega = agent.return_quantiles(tracked_state, tracked_action).size();
  for (std::size_t i = 1; i <= n_theta; ++i) record.columns.push_back("theta_" + std::to_string(i));
  for (std::size_t j = 1; j <= n_omega; ++j) record.columns.push_back("omega_" + std::to_string(j));

  RollingMean rolling(cfg.rolling_window);
  double reward_sum = 0.0;
  double last_rolling = 0.0;
  run_agent(agent, env, cfg.total_steps, seed,
            [&](std::uint64_t t, const Obs&, std::size_t, double r, const Obs&, const StepTrace&) {
              reward_sum += r;
              last_rolling = rolling.push(r);
              const bool snapshot = t % cfg.snapshot_interval == 0 || t == cfg.total_steps;
              if (!snapshot) return;
              if (keep_rows) {
                std::vector<double> row{static_cast<double>(t), r, last_rolling,
                                        reward_sum / static_cast<double>(t), agent.average_reward_estimate()};
                for (double v : agent.reward_quantiles()) row.push_back(v);
                for (double v : agent.return_quantiles(tracked_state, tracked_action)) row.push_back(v);
                record.rows.push_back(std::move(row));
              }
              if (cfg.table_snapshots) {
                for (const auto& table : agent.tables())
                  for (std::size_t i = 0; i < table.values.size(); ++i)
                    out.tables.push_back({std::to_string(t), table.name, std::to_string(i),
                                          format_double(table.values[i])});
              }
            });
  out.summary.mean_reward = reward_sum / static_cast<double>(cfg.total_steps);
  out.summary.final_rolling = last_rolling;
  out.summary.final_rbar = agent.average_reward_estimate();
  return out;
}

}  // namespace

RunOutput run_experiment(const ExperimentConfig& cfg, std::uint64_t seed, bool keep_rows) {
  cfg.validate();
  if (cfg.env == EnvId::kPendulum) {
    auto env = make_pendulum_env(cfg);
    auto agent = make_pendulum_agent(cfg);
    return record_run<PendulumState>(cfg, seed, *agent, *env, PendulumState{}, 0, keep_rows);
  }
  const FiniteMdp mdp = load_finite_mdp(cfg);
  if (cfg.track_state >= mdp.n_states() || cfg.track_action >= mdp.n_actions())
    throw ConfigError("track cell out of range");
  auto env = make_tabular_env(cfg, mdp);
  auto agent = make_tabular_agent(cfg, mdp);
  return record_run<std::size_t>(cfg, seed, *agent, *env, cfg.track_state, cfg.track_action, keep_rows);
}

namespace {

std::filesystem::path with_output_dir(const std::filesystem::path& path) {
  if (const char* dir = std::getenv("D2RL_OUTPUT_DIR"); dir && *dir)
    return std::filesystem::path(dir) / path.filename();
  return path;
}

}  // namespace

std::filesystem::path record_path(const ExperimentConfig& cfg, std::uint64_t seed) {
  return with_output_dir(cfg.output + "_seed" + std::to_string(seed) + ".csv");
}

std::filesystem::path tables_path(const ExperimentConfig& cfg, std::uint64_t seed) {
  return with_output_dir(cfg.output + "_seed" + std::to_string(seed) + "_tables.csv");
}

std::vector<std::filesystem::path> run_and_write(const ExperimentConfig& cfg, std::size_t threads) {
  cfg.validate();
  std::vector<std::filesystem::path> paths(cfg.n_seeds);
  std::vector<std::exception_ptr> errors(cfg.n_seeds);
  parallel_for(cfg.n_seeds, threads, [&](std::size_t i) {
    try {
      const std::uint64_t seed = cfg.seed + i;
      const auto out = run_experiment(cfg, seed);
      paths[i] = record_path(cfg, seed);
      out.record.write(paths[i]);
      if (cfg.table_snapshots) {
        const std::vector<std::string> header{"step", "table", "index", "value"};
        write_csv(tables_path(cfg, seed), header, out.tables);
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return paths;
}

// ---------------------------------------------------------------------------
// Sweeps

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w)
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
}

std::vector<SweepCell> run_sweep(const SweepSpec& spec, const ExperimentConfig& base,
                                 const std::vector<std::uint64_t>& seeds, std::size_t threads) {
  spec.validate();
  if (seeds.empty()) throw ConfigError("sweep needs at least one seed");
  std::vector<SweepCell> cells(spec.size());
  parallel_for(cells.size(), threads, [&](std::size_t index) {
    SweepCell& cell = cells[index];
    cell.assignments = spec.cell(index);
    try {
      ExperimentConfig cfg = base;
      for (const auto& [key, value] : cell.assignments) cfg.set(key, value);
      cfg.validate();
      double mean_reward = 0.0, final_rolling = 0.0, final_rbar = 0.0;
      for (std::uint64_t seed : seeds) {
        const auto summary = run_experiment(cfg, seed, false).summary;
        mean_reward += summary.mean_reward;
        final_rolling += summary.final_rolling;
        final_rbar += summary.final_rbar;
        ++cell.n_ok;
      }
      const double k = static_cast<double>(seeds.size());
      cell.mean_reward = mean_reward / k;
      cell.final_rolling = final_rolling / k;
      cell.final_rbar = final_rbar / k;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  });
  return cells;
}

namespace {

std::string csv_safe(std::string value) {
  std::replace_if(value.begin(), value.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; }, ';');
  return value;
}

}  // namespace

void write_sweep_summary(const std::filesystem::path& path, const SweepSpec& spec,
                         const std::vector<SweepCell>& cells) {
  CsvTable table;
  for (const auto& [key, values] : spec.axes) table.header.push_back(key);
  for (const char* name : {"mean_reward", "final_rolling", "final_rbar", "n_ok", "error"})
    table.header.emplace_back(name);
  for (const auto& cell : cells) {
    std::vector<std::string> row;
    for (const auto& [key, value] : cell.assignments) row.push_back(value);
    const bool ok = cell.error.empty();
    row.push_back(ok ? format_double(cell.mean_reward) : "nan");
    row.push_back(ok ? format_double(cell.final_rolling) : "nan");
    row.push_back(ok ? format_double(cell.final_rbar) : "nan");
    row.push_back(std::to_string(cell.n_ok));
    row.push_back(csv_safe(cell.error));
    table.rows.push_back(std::move(row));
  }
  table.write(path);
}

std::size_t best_cell(const std::vector<SweepCell>& cells) {
  std::size_t best = cells.size();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i].error.empty()) continue;
    if (best == cells.size() || cells[i].mean_reward > cells[best].mean_reward) best = i;
  }
  if (best == cells.size()) throw std::runtime_error("every sweep cell failed");
  return best;
}

// ---------------------------------------------------------------------------
// Reductions

void CsvTable::write(const std::filesystem::path& path) const { write_csv(path, header, rows); }

std::string CsvTable::to_string() const {
  std::string out;
  auto emit = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + fields[i];
    out += '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return out;
}

CsvTable oracle_table(const FiniteMdp& mdp, const PolicyTable& policy, std::size_t m) {
  CsvTable table;
  table.header = {"quantity", "key1", "key2", "value"};
  auto add = [&table](std::string quantity, std::string k1, std::string k2, double value) {
    table.rows.push_back({std::move(quantity), std::move(k1), std::move(k2), format_double(value)});
  };
  const auto mu = stationary_distribution(mdp, policy);
  for (std::size_t s = 0; s < mu.size(); ++s) add("mu", std::to_string(s), "", mu[s]);
  const auto cdf = limiting_reward_distribution(mdp, policy);
  for (std::size_t k = 0; k < cdf.support.size(); ++k) {
    add("reward_mass", format_double(cdf.support[k]), "", cdf.mass(k));
    add("cdf", format_double(cdf.support[k]), "", cdf.cum[k]);
  }
  const TauGrid grid(m);
  const auto intervals = true_quantiles(cdf, grid);
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    add("quantile_lo", std::to_string(i + 1), format_double(grid[i]), intervals[i].lo);
    add("quantile_hi", std::to_string(i + 1), format_double(grid[i]), intervals[i].hi);
  }
  add("rbar", "", "", cdf.mean());
  if (check_communicating(mdp)) {
    const auto rvi = relative_value_iteration(mdp);
    add("rbar_star", "", "", rvi.rbar_star);
    for (std::size_t s = 0; s < mdp.n_states(); ++s)
      for (std::size_t a = 0; a < mdp.n_actions(); ++a)
        add("q_star", std::to_string(s), std::to_string(a), rvi.q_star(s, a));
  }
  return table;
}

namespace {

void require_records(const std::vector<RunRecord>& records) {
  if (records.empty()) throw std::invalid_argument("no records given");
  const auto steps = records.front().column_values("step");
  for (const auto& r : records)
    if (r.column_values("step") != steps) throw std::invalid_argument("records have different step columns");
}

}  // namespace

CsvTable rolling_band(const std::vector<RunRecord>& records, const std::string& column) {
  require_records(records);
  std::vector<std::vector<double>> curves;
  for (const auto& r : records) curves.push_back(r.column_values(column));
  const auto steps = records.front().column_values("step");
  CsvTable table;
  table.header = {"step", "mean", "lo", "hi", "half_width"};
  if (curves.size() == 1) {
    for (std::size_t t = 0; t < steps.size(); ++t) {
      const auto v = format_double(curves[0][t]);
      table.rows.push_back({format_double(steps[t]), v, v, v, "0"});
    }
    return table;
  }
  const auto band = confidence_band(curves);
  for (std::size_t t = 0; t < steps.size(); ++t)
    table.rows.push_back({format_double(steps[t]), format_double(band.mean[t]), format_double(band.lo[t]),
                          format_double(band.hi[t]), format_double(band.half_width[t])});
  return table;
}

CsvTable quantile_curves(const std::vector<RunRecord>& records) {
  require_records(records);
  const auto& first = records.front();
  CsvTable table;
  table.header = {"step"};
  std::vector<std::size_t> picked;
  for (std::size_t c = 0; c < first.columns.size(); ++c) {
    const auto& name = first.columns[c];
    if (name.starts_with("theta_") || name.starts_with("omega_")) {
      picked.push_back(c);
      table.header.push_back(name);
    }
  }
  for (const auto& r : records)
    if (r.columns != first.columns) throw std::invalid_argument("records have different columns");
  const double k = static_cast<double>(records.size());
  for (std::size_t t = 0; t < first.rows.size(); ++t) {
    std::vector<std::string> row{format_double(first.rows[t][0])};
    for (std::size_t c : picked) {
      double total = 0.0;
      for (const auto& r : records) total += r.rows[t][c];
      row.push_back(format_double(total / k));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable reward_histogram(const std::vector<RunRecord>& records, std::size_t bins) {
  if (records.empty()) throw std::invalid_argument("no records given");
  std::vector<double> rewards;
  for (const auto& r : records) {
    const auto column = r.column_values("reward");
    rewards.insert(rewards.end(), column.begin(), column.end());
  }
  if (rewards.empty()) throw std::invalid_argument("records have no rows");
  std::map<double, std::size_t> counts;
  if (bins == 0) {
    for (double v : rewards) ++counts[v];
  } else {
    const auto [lo_it, hi_it] = std::minmax_element(rewards.begin(), rewards.end());
    const double lo = *lo_it;
    const double width = (*hi_it - lo) / static_cast<double>(bins);
    for (std::size_t b = 0; b < bins; ++b) counts[lo + (static_cast<double>(b) + 0.5) * width] = 0;
    for (double v : rewards) {
      std::size_t b = width > 0.0 ? static_cast<std::size_t>((v - lo) / width) : 0;
      b = std::min(b, bins - 1);
      ++counts[lo + (static_cast<double>(b) + 0.5) * width];
    }
  }
  CsvTable table;
  table.header = {"value", "count", "frequency"};
  const double total = static_cast<double>(rewards.size());
  for (const auto& [value, count] : counts)
    table.rows.push_back(
        {format_double(value), std::to_string(count), format_double(static_cast<double>(count) / total)});
  return table;
}

}  // namespace d2rl
