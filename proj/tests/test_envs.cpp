#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>
#include <vector>

#include "d2rl/envs.hpp"
#include "d2rl/oracle.hpp"
#include "d2rl/random.hpp"

using namespace d2rl;

TEST(RedPillBluePill, TransitionIsDeterminedByPill) {
  Rng rng(41);
  const RedPillBluePillConfig cfg;
  for (World s : {World::kRed, World::kBlue}) {
    EXPECT_EQ(rpbp_step(s, Pill::kBlue, cfg, rng).next_obs, World::kBlue);
    EXPECT_EQ(rpbp_step(s, Pill::kRed, cfg, rng).next_obs, World::kRed);
  }
}

TEST(RedPillBluePill, RewardsComeFromArrivalWorld) {
  Rng rng(42);
  const RedPillBluePillConfig cfg;
  const std::set<double> blue{0, 1, 2}, red{-2, -1, 0};
  for (int i = 0; i < 1000; ++i) {
    EXPECT_TRUE(blue.count(rpbp_step(World::kBlue, Pill::kBlue, cfg, rng).reward));
    EXPECT_TRUE(blue.count(rpbp_step(World::kRed, Pill::kBlue, cfg, rng).reward));
    EXPECT_TRUE(red.count(rpbp_step(World::kBlue, Pill::kRed, cfg, rng).reward));
  }
}

TEST(RedPillBluePill, DepartureConventionUsesCurrentWorld) {
  Rng rng(43);
  RedPillBluePillConfig cfg;
  cfg.reward_on_arrival = false;
  for (int i = 0; i < 200; ++i) EXPECT_LE(rpbp_step(World::kRed, Pill::kBlue, cfg, rng).reward, 0.0);
}

TEST(RedPillBluePill, ConfigValidation) {
  RedPillBluePillConfig cfg;
  cfg.blue_reward = DiscreteDistribution::uniform({-5.0});
  EXPECT_THROW(cfg.validate(), std::invalid_argument);  // blue mean must exceed red mean
  cfg.blue_reward = DiscreteDistribution{{1.0, 2.0}, {0.5, 0.6}};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(RedPillBluePill, BluePolicyHistogramWithinTv) {
  Rng rng(44);
  RedPillBluePill env;
  env.reset(rng);
  std::map<double, int> counts;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[env.step(static_cast<std::size_t>(Pill::kBlue), rng).reward];
  double tv = 0.0;
  for (double r : {0.0, 1.0, 2.0}) tv += std::abs(counts[r] / double(n) - 1.0 / 3.0);
  EXPECT_LT(tv / 2, 0.02);
  EXPECT_EQ(counts.size(), 3u);
}

TEST(RedPillBluePill, FiniteModel) {
  const auto mdp = rpbp_as_finite_mdp({});
  EXPECT_EQ(mdp.n_states(), 2u);
  EXPECT_EQ(mdp.n_actions(), 2u);
  const std::vector<double> support(mdp.reward_support().begin(), mdp.reward_support().end());
  EXPECT_EQ(support, (std::vector<double>{-2, -1, 0, 1, 2}));
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t k = 2; k < 5; ++k) EXPECT_DOUBLE_EQ(mdp.probability(s, 1, 1, k), 1.0 / 3.0);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(mdp.probability(s, 0, 0, k), 1.0 / 3.0);
    for (std::size_t a = 0; a < 2; ++a) {
      double total = 0.0;
      for (double p : mdp.row(s, a)) total += p;
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

// Sampled (s, a) -> (s', r) frequencies of the simulator against the model tensor.
TEST(RedPillBluePill, SimulatorMatchesFiniteModel) {
  const auto mdp = rpbp_as_finite_mdp({});
  Rng rng(45);
  const int n = 100000;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t, double>, int> counts;
  std::map<std::pair<std::size_t, std::size_t>, int> visits;
  World s = World::kRed;
  for (int i = 0; i < n; ++i) {
    const auto a = static_cast<Pill>(rng.uniform_index(2));
    const auto out = rpbp_step(s, a, {}, rng);
    ++counts[{static_cast<std::size_t>(s), static_cast<std::size_t>(a), static_cast<std::size_t>(out.next_obs),
              out.reward}];
    ++visits[{static_cast<std::size_t>(s), static_cast<std::size_t>(a)}];
    s = out.next_obs;
  }
  for (std::size_t st = 0; st < 2; ++st)
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t next = 0; next < 2; ++next)
        for (std::size_t k = 0; k < mdp.n_rewards(); ++k) {
          const double freq = counts[{st, a, next, mdp.reward_support()[k]}] / double(visits[{st, a}]);
          EXPECT_NEAR(freq, mdp.probability(st, a, next, k), 0.02);
        }
}

TEST(Pendulum, UprightRestIsAFixedPoint) {
  const auto out = pendulum_step({0.0, 0.0}, 1);
  EXPECT_EQ(out.next_obs.angle, 0.0);
  EXPECT_EQ(out.next_obs.ang_vel, 0.0);
  EXPECT_EQ(out.reward, 0.0);
}

TEST(Pendulum, PushFromRest) {
  const auto out = pendulum_step({0.0, 0.0}, 2);
  EXPECT_NEAR(out.next_obs.ang_vel, 0.3, 1e-15);
  EXPECT_NEAR(out.next_obs.angle, 0.015, 1e-15);
  // Cost of the state the torque was applied in: only the torque term is nonzero.
  EXPECT_NEAR(out.reward, -0.004, 1e-15);
}

TEST(Pendulum, AngleWrapsAndSpeedClips) {
  const double eps = 1e-3;
  const auto out = pendulum_step({std::numbers::pi - eps, 7.9}, 2);
  EXPECT_GE(out.next_obs.angle, -std::numbers::pi);
  EXPECT_LT(out.next_obs.angle, std::numbers::pi);
  EXPECT_LT(out.next_obs.angle, 0.0);
  EXPECT_EQ(out.next_obs.ang_vel, 8.0);
  EXPECT_EQ(wrap_angle(std::numbers::pi), -std::numbers::pi);
}

TEST(Pendulum, RandomTrajectoriesStayInRangeWithNonPositiveReward) {
  Rng rng(46);
  Pendulum env;
  env.reset(rng);
  for (int i = 0; i < 100000; ++i) {
    const auto out = env.step(rng.uniform_index(3), rng);
    ASSERT_LE(out.reward, 0.0);
    ASSERT_GE(out.next_obs.angle, -std::numbers::pi);
    ASSERT_LT(out.next_obs.angle, std::numbers::pi);
    ASSERT_LE(std::abs(out.next_obs.ang_vel), 8.0);
  }
}

TEST(Pendulum, ResetNoiseIsBounded) {
  Rng rng(47);
  Pendulum env;
  for (int i = 0; i < 1000; ++i) {
    const auto s = env.reset(rng);
    ASSERT_LE(std::abs(s.angle), 0.05);
    ASSERT_LE(std::abs(s.ang_vel), 0.05);
  }
}

TEST(FiniteMdpEnvironment, FrequenciesMatchKernel) {
  Rng gen(48, streams::kGenerator);
  const std::vector<double> support{-1, 0, 1};
  const auto mdp = random_unichain_mdp(3, 2, support, gen);
  FiniteMdpEnvironment env(mdp);
  Rng rng(49);
  std::size_t s = env.reset(rng);
  const int n = 200000;
  std::vector<double> counts(3 * 2 * 3, 0.0), visits(3 * 2, 0.0);
  for (int i = 0; i < n; ++i) {
    const std::size_t a = rng.uniform_index(2);
    const auto out = env.step(a, rng);
    counts[(s * 2 + a) * 3 + out.next_obs] += 1;
    visits[s * 2 + a] += 1;
    s = out.next_obs;
  }
  for (std::size_t st = 0; st < 3; ++st)
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t next = 0; next < 3; ++next)
        EXPECT_NEAR(counts[(st * 2 + a) * 3 + next] / visits[st * 2 + a], mdp.transition(st, a, next), 0.02);
}

TEST(RandomUnichainMdp, StructuralGuarantees) {
  Rng rng(50, streams::kGenerator);
  const std::vector<double> support{-1, 0, 2};
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t S = 1 + rng.uniform_index(5), A = 1 + rng.uniform_index(3);
    const auto mdp = random_unichain_mdp(S, A, support, rng);
    EXPECT_NO_THROW(mdp.validate());
    EXPECT_TRUE(check_communicating(mdp));
    // Every deterministic policy is unichain.
    std::vector<std::size_t> actions(S, 0);
    while (true) {
      EXPECT_TRUE(check_unichain(mdp, PolicyTable::deterministic(A, actions)));
      std::size_t i = 0;
      while (i < S && ++actions[i] == A) actions[i++] = 0;
      if (i == S) break;
    }
  }
}

TEST(RandomUnichainMdp, SingleStateAndBadSizes) {
  Rng rng(51, streams::kGenerator);
  const std::vector<double> support{1.0};
  EXPECT_TRUE(check_unichain(random_unichain_mdp(1, 2, support, rng), PolicyTable::uniform(1, 2)));
  EXPECT_THROW(random_unichain_mdp(0, 2, support, rng), std::invalid_argument);
  EXPECT_THROW(random_unichain_mdp(2, 0, support, rng), std::invalid_argument);
  EXPECT_THROW(random_unichain_mdp(2, 2, std::vector<double>{}, rng), std::invalid_argument);
}
