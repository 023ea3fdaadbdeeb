#include <gtest/gtest.h>

#include <set>
#include <string>

#include "d2rl/config.hpp"
#include "d2rl/envs.hpp"
#include "d2rl/errors.hpp"
#include "d2rl/oracle.hpp"

using namespace d2rl;

TEST(Config, DefaultsValidate) {
  ExperimentConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.m, 10u);
  EXPECT_EQ(cfg.total_steps, 100000u);
}

TEST(Config, ParseFile) {
  const auto cfg = ExperimentConfig::parse(
      "# comment\n"
      "env = rpbp\n"
      "algorithm = d3_q   # trailing\n"
      "alpha = 2e-2\n"
      "eta_theta = 1\n"
      "n = 4\n"
      "\n"
      "blue_rewards = 0, 1, 2\n"
      "reward_on_arrival = false\n");
  EXPECT_EQ(cfg.algorithm, AlgorithmId::kD3Q);
  EXPECT_EQ(cfg.hyper.alpha, 0.02);
  EXPECT_EQ(cfg.n, 4u);
  EXPECT_FALSE(cfg.reward_on_arrival);
  EXPECT_EQ(cfg.blue_rewards, (std::vector<double>{0, 1, 2}));
}

TEST(Config, UnknownKeyAndBadValues) {
  ExperimentConfig cfg;
  EXPECT_THROW(cfg.set("alhpa", "0.1"), ConfigError);
  EXPECT_THROW(cfg.set("alpha", "fast"), ConfigError);
  EXPECT_THROW(cfg.set("m", "-3"), ConfigError);
  EXPECT_THROW(cfg.set("algorithm", "sarsa"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("alpha 0.1\n"), ParseError);
}

TEST(Config, DuplicateKeyReportsLine) {
  try {
    ExperimentConfig::parse("alpha = 0.1\nm = 3\nalpha = 0.2\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Config, ValidateRejectsBadCombinations) {
  ExperimentConfig cfg;
  cfg.total_steps = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.algorithm = AlgorithmId::kD2Ac;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.env = EnvId::kPendulum;
  EXPECT_NO_THROW(cfg.validate());
  cfg.algorithm = AlgorithmId::kD2Q;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.env = EnvId::kFiniteMdp;
  EXPECT_THROW(cfg.validate(), ConfigError);  // no mdp_file
  cfg = {};
  cfg.hyper.epsilon = 2.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.rolling_window = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.alpha_schedule = "wobbly";
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Config, TextRoundTripAndHash) {
  ExperimentConfig cfg;
  cfg.set("algorithm", "diff_q");
  cfg.set("alpha", "0.123");
  cfg.set("red_rewards", "-1, 0.5");
  const auto back = ExperimentConfig::parse(cfg.to_text());
  EXPECT_EQ(back.to_text(), cfg.to_text());
  EXPECT_EQ(back.hash(), cfg.hash());
  auto other = cfg;
  other.output = "elsewhere";
  other.seed = 99;
  EXPECT_EQ(other.hash(), cfg.hash());
  other.hyper.alpha = 0.124;
  EXPECT_NE(other.hash(), cfg.hash());
  EXPECT_EQ(cfg.entries().size(), ExperimentConfig::keys().size());
}

TEST(Config, EnumNamesRoundTrip) {
  for (auto id : {AlgorithmId::kD2Q, AlgorithmId::kD3Q, AlgorithmId::kDiffQ, AlgorithmId::kD2Td, AlgorithmId::kD3Td,
                  AlgorithmId::kD2Ac, AlgorithmId::kD3Ac, AlgorithmId::kDiffAc})
    EXPECT_EQ(parse_algorithm(to_string(id)), id);
  for (auto id : {EnvId::kRedPillBluePill, EnvId::kPendulum, EnvId::kFiniteMdp}) EXPECT_EQ(parse_env(to_string(id)), id);
  EXPECT_TRUE(is_linear(AlgorithmId::kD3Ac));
  EXPECT_FALSE(is_linear(AlgorithmId::kD3Q));
  EXPECT_TRUE(is_prediction(AlgorithmId::kD2Td));
}

TEST(Config, RpbpAndPendulumViews) {
  ExperimentConfig cfg;
  cfg.set("blue_rewards", "1, 3");
  cfg.set("start_state", "1");
  const auto rp = cfg.rpbp();
  EXPECT_DOUBLE_EQ(rp.blue_reward.mean(), 2.0);
  EXPECT_EQ(rp.start, World::kBlue);
  cfg.set("init_noise", "0.2");
  EXPECT_EQ(cfg.pendulum().init_noise, 0.2);
}

TEST(Sweep, ParseAndEnumerate) {
  const auto spec = SweepSpec::parse("alpha = 0.1, 0.2, 0.3\neta_theta = 1, 2\n");
  EXPECT_EQ(spec.size(), 6u);
  EXPECT_NO_THROW(spec.validate());
  // First key varies slowest.
  EXPECT_EQ(spec.cell(0), (std::vector<std::pair<std::string, std::string>>{{"alpha", "0.1"}, {"eta_theta", "1"}}));
  EXPECT_EQ(spec.cell(1)[1].second, "2");
  EXPECT_EQ(spec.cell(2)[0].second, "0.2");
  std::set<std::vector<std::pair<std::string, std::string>>> seen;
  for (std::size_t i = 0; i < spec.size(); ++i) seen.insert(spec.cell(i));
  EXPECT_EQ(seen.size(), 6u);
}

TEST(Sweep, Validation) {
  EXPECT_THROW(SweepSpec::parse("bogus = 1, 2\n").validate(), ConfigError);
  EXPECT_THROW(SweepSpec::parse("alpha = 1\nalpha = 2\n").validate(), ConfigError);
  EXPECT_THROW(SweepSpec{}.validate(), ConfigError);
}

TEST(PolicySpec, Forms) {
  const auto mdp = rpbp_as_finite_mdp({});
  const auto uniform = parse_policy_spec("uniform", mdp);
  EXPECT_DOUBLE_EQ(uniform(0, 1), 0.5);
  const auto fixed = parse_policy_spec("fixed:1:0.1", mdp);
  EXPECT_DOUBLE_EQ(fixed(0, 1), 0.95);
  EXPECT_DOUBLE_EQ(fixed(1, 0), 0.05);
  const auto optimal = parse_policy_spec("optimal:0", mdp);
  EXPECT_DOUBLE_EQ(optimal(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(optimal(1, 1), 1.0);
  EXPECT_THROW(parse_policy_spec("greedy", mdp), ConfigError);
  EXPECT_THROW(parse_policy_spec("fixed:5:0.1", mdp), ConfigError);
}
