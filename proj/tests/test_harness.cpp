#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "d2rl/config.hpp"
#include "d2rl/errors.hpp"
#include "d2rl/harness.hpp"
#include "d2rl/record.hpp"
#include "d2rl/stats.hpp"

using namespace d2rl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("d2rl_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig short_run(AlgorithmId algorithm, std::uint64_t steps = 2000) {
  ExperimentConfig cfg;
  cfg.algorithm = algorithm;
  cfg.total_steps = steps;
  cfg.rolling_window = 100;
  cfg.snapshot_interval = 10;
  return cfg;
}

}  // namespace

TEST(Rolling, ConstantAndRamp) {
  const std::vector<double> constant(50, 3.0);
  for (double v : rolling_average(constant, 7)) EXPECT_DOUBLE_EQ(v, 3.0);
  const std::vector<double> ramp{0, 1, 2, 3, 4};
  EXPECT_EQ(rolling_average(ramp, 2), (std::vector<double>{0, 0.5, 1.5, 2.5, 3.5}));
  EXPECT_THROW(rolling_average(ramp, 0), std::invalid_argument);
  EXPECT_THROW(RollingMean(0), std::invalid_argument);
}

TEST(Rolling, StreamingMatchesBatch) {
  Rng rng(91);
  std::vector<double> xs(5000);
  for (auto& x : xs) x = rng.uniform(-2, 2);
  const auto batch = rolling_average(xs, 333);
  RollingMean rm(333);
  for (std::size_t i = 0; i < xs.size(); ++i) ASSERT_NEAR(rm.push(xs[i]), batch[i], 1e-12);
}

TEST(Band, KnownHalfWidths) {
  const std::vector<std::vector<double>> three{{0, 0}, {1, 1}, {2, 2}};
  const auto band = confidence_band(three);
  EXPECT_NEAR(band.half_width[0], 1.96 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(band.half_width[0], 1.1316, 1e-4);
  EXPECT_DOUBLE_EQ(band.mean[1], 1.0);
  EXPECT_NEAR(band.hi[0] - band.lo[0], 2 * band.half_width[0], 1e-12);
  const std::vector<std::vector<double>> same{{1, 2}, {1, 2}};
  EXPECT_EQ(confidence_band(same).half_width, (std::vector<double>{0, 0}));
  EXPECT_THROW(confidence_band(std::vector<std::vector<double>>{{1.0}}), std::invalid_argument);
  EXPECT_THROW(confidence_band(std::vector<std::vector<double>>{{1.0}, {1.0, 2.0}}), std::invalid_argument);
}

TEST(Band, ShrinksLikeInverseRootN) {
  // Repeating the same set of curves k times keeps sd (nearly) fixed and shrinks the width.
  Rng rng(92);
  std::vector<std::vector<double>> base;
  for (int i = 0; i < 10; ++i) base.push_back({rng.uniform(0, 1)});
  auto widen = [&](int k) {
    std::vector<std::vector<double>> curves;
    for (int r = 0; r < k; ++r) curves.insert(curves.end(), base.begin(), base.end());
    return confidence_band(curves).half_width[0];
  };
  const double w1 = widen(1), w4 = widen(4);
  // sd ratio sqrt(4 * 9 / 39) from the n - 1 denominator, times 1 / sqrt(4).
  EXPECT_NEAR(w4 / w1, std::sqrt(36.0 / 39.0) * 0.5, 1e-9);
}

TEST(Record, CsvRoundTrip) {
  RunRecord rec;
  rec.metadata = {{"seed", "3"}, {"env", "rpbp"}};
  rec.columns = {"step", "reward", "theta_1"};
  rec.rows = {{1, 0.1, -1e-300}, {2, 1.0 / 3, 5e10}};
  EXPECT_NO_THROW(rec.validate());
  const auto back = RunRecord::from_csv(rec.to_csv());
  EXPECT_EQ(back, rec);
  EXPECT_EQ(back.meta("env"), "rpbp");
  EXPECT_EQ(back.column_values("reward")[1], 1.0 / 3);
  EXPECT_THROW(back.column("missing"), std::out_of_range);
  const auto dir = scratch("record");
  rec.write(dir / "nested" / "r.csv");
  EXPECT_EQ(RunRecord::read(dir / "nested" / "r.csv"), rec);
}

TEST(Record, Validation) {
  RunRecord rec;
  rec.columns = {"step", "x"};
  rec.rows = {{2, 0}, {2, 1}};
  EXPECT_THROW(rec.validate(), std::invalid_argument);
  rec.rows = {{1, NAN}};
  EXPECT_THROW(rec.validate(), std::invalid_argument);
  rec.rows = {{1, 0, 3}};
  EXPECT_THROW(rec.validate(), std::invalid_argument);
  rec.columns = {"x", "step"};
  rec.rows = {{1, 2}};
  EXPECT_THROW(rec.validate(), std::invalid_argument);
  try {
    RunRecord::from_csv("# a=b\nstep,x\n1,2\n2,oops\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(Experiment, RecordShapeAndMetadata) {
  auto cfg = short_run(AlgorithmId::kD3Q);
  cfg.n = 4;
  cfg.m = 3;
  const auto out = run_experiment(cfg, 5);
  const auto& rec = out.record;
  EXPECT_NO_THROW(rec.validate());
  EXPECT_EQ(rec.rows.size(), 200u);
  EXPECT_EQ(rec.rows.front()[0], 10.0);
  EXPECT_EQ(rec.rows.back()[0], 2000.0);
  for (const char* col : {"reward", "rolling_reward", "mean_reward", "rbar", "theta_1", "theta_3", "omega_1", "omega_4"})
    EXPECT_TRUE(rec.has_column(col)) << col;
  EXPECT_FALSE(rec.has_column("theta_4"));
  EXPECT_EQ(rec.meta("seed"), "5");
  EXPECT_EQ(rec.meta("algorithm"), "d3_q");
  EXPECT_EQ(rec.meta("config_hash"), std::to_string(cfg.hash()));
  EXPECT_DOUBLE_EQ(out.summary.mean_reward, rec.column_values("mean_reward").back());
  EXPECT_DOUBLE_EQ(out.summary.final_rolling, rec.column_values("rolling_reward").back());
}

TEST(Experiment, Deterministic) {
  for (auto algorithm : {AlgorithmId::kD2Q, AlgorithmId::kD3Q, AlgorithmId::kDiffQ, AlgorithmId::kD2Td}) {
    const auto cfg = short_run(algorithm);
    EXPECT_EQ(run_experiment(cfg, 7).record.to_csv(), run_experiment(cfg, 7).record.to_csv());
    EXPECT_NE(run_experiment(cfg, 7).record.to_csv(), run_experiment(cfg, 8).record.to_csv());
  }
  auto pend = short_run(AlgorithmId::kD2Ac, 300);
  pend.env = EnvId::kPendulum;
  EXPECT_EQ(run_experiment(pend, 1).record.to_csv(), run_experiment(pend, 1).record.to_csv());
}

TEST(Experiment, SummaryWithoutRows) {
  const auto cfg = short_run(AlgorithmId::kD2Q);
  const auto full = run_experiment(cfg, 2);
  const auto lean = run_experiment(cfg, 2, false);
  EXPECT_TRUE(lean.record.rows.empty());
  EXPECT_EQ(lean.summary.mean_reward, full.summary.mean_reward);
  EXPECT_EQ(lean.summary.final_rbar, full.summary.final_rbar);
}

TEST(Experiment, InvalidConfigThrowsBeforeRunning) {
  auto cfg = short_run(AlgorithmId::kD2Ac);
  EXPECT_THROW(run_experiment(cfg, 0), ConfigError);
}

TEST(Experiment, RunAndWriteHonoursOutputDir) {
  const auto dir = scratch("outdir");
  auto cfg = short_run(AlgorithmId::kD2Q, 500);
  cfg.output = "ignored_dir/run";
  cfg.n_seeds = 3;
  cfg.seed = 10;
  cfg.table_snapshots = true;
  ::setenv("D2RL_OUTPUT_DIR", dir.c_str(), 1);
  const auto paths = run_and_write(cfg, 2);
  ::unsetenv("D2RL_OUTPUT_DIR");
  ASSERT_EQ(paths.size(), 3u);
  EXPECT_EQ(paths[0], dir / "run_seed10.csv");
  EXPECT_EQ(paths[2], dir / "run_seed12.csv");
  for (const auto& p : paths) EXPECT_TRUE(fs::exists(p));
  EXPECT_TRUE(fs::exists(dir / "run_seed11_tables.csv"));
  EXPECT_EQ(RunRecord::read(paths[1]).to_csv(), run_experiment(cfg, 11).record.to_csv());
}

TEST(Sweep, GridRowsAndAgreementWithSingleRuns) {
  const auto spec = SweepSpec::parse(
      "alpha = 1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1\neta_theta = 0.1, 0.5, 1, 2, 4\n");
  auto base = short_run(AlgorithmId::kD2Q, 300);
  const std::vector<std::uint64_t> seeds{0, 1};
  const auto cells = run_sweep(spec, base, seeds, 2);
  ASSERT_EQ(cells.size(), 35u);
  for (const auto& c : cells) EXPECT_EQ(c.n_ok, 2u);
  auto one = base;
  for (const auto& [k, v] : cells[13].assignments) one.set(k, v);
  const double expected = (run_experiment(one, 0, false).summary.mean_reward +
                           run_experiment(one, 1, false).summary.mean_reward) / 2;
  EXPECT_DOUBLE_EQ(cells[13].mean_reward, expected);
  const auto dir = scratch("sweep");
  write_sweep_summary(dir / "summary.csv", spec, cells);
  const auto text = slurp(dir / "summary.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), "alpha,eta_theta,mean_reward,final_rolling,final_rbar,n_ok,error");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 36);
}

TEST(Sweep, FailingCellIsRecorded) {
  const auto spec = SweepSpec::parse("epsilon = 0.1, 7\n");
  const auto cells = run_sweep(spec, short_run(AlgorithmId::kD2Q, 100), {0}, 1);
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_TRUE(cells[0].error.empty());
  EXPECT_EQ(cells[1].n_ok, 0u);
  EXPECT_FALSE(cells[1].error.empty());
  EXPECT_EQ(best_cell(cells), 0u);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  EXPECT_EQ(std::accumulate(hits.begin(), hits.end(), 0), 1000);
  EXPECT_EQ(*std::min_element(hits.begin(), hits.end()), 1);
}

TEST(Reductions, OracleTable) {
  const auto mdp = rpbp_as_finite_mdp({});
  const std::vector<std::size_t> blue{1, 1};
  const auto table = oracle_table(mdp, PolicyTable::epsilon_greedy(2, blue, 0.1), 10);
  EXPECT_EQ(table.header, (std::vector<std::string>{"quantity", "key1", "key2", "value"}));
  auto find = [&](const std::string& q, const std::string& k1) {
    for (const auto& row : table.rows)
      if (row[0] == q && row[1] == k1) return std::stod(row[3]);
    throw std::out_of_range(q);
  };
  EXPECT_NEAR(find("mu", "0"), 0.05, 1e-9);
  EXPECT_NEAR(find("mu", "1"), 0.95, 1e-9);
  EXPECT_NEAR(find("rbar", ""), 0.9, 1e-9);
  EXPECT_NEAR(find("rbar_star", ""), 1.0, 1e-6);
  EXPECT_NEAR(find("quantile_lo", "10"), 2.0, 1e-12);
}

TEST(Reductions, PlotData) {
  auto cfg = short_run(AlgorithmId::kD2Q, 400);
  std::vector<RunRecord> recs{run_experiment(cfg, 0).record, run_experiment(cfg, 1).record};
  const auto band = rolling_band(recs);
  EXPECT_EQ(band.rows.size(), recs[0].rows.size());
  EXPECT_EQ(band.header.front(), "step");
  const auto curves = quantile_curves(recs);
  EXPECT_EQ(curves.header.size(), 1u + cfg.m);
  const auto hist = reward_histogram(recs);
  double freq = 0;
  for (const auto& row : hist.rows) freq += std::stod(row[2]);
  EXPECT_NEAR(freq, 1.0, 1e-9);
  EXPECT_THROW(rolling_band({}), std::invalid_argument);
}
