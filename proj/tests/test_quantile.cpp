#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "d2rl/oracle.hpp"
#include "d2rl/quantile.hpp"
#include "d2rl/random.hpp"

using namespace d2rl;

TEST(TauGrid, SmallGrids) {
  const TauGrid one(1);
  EXPECT_EQ(std::vector<double>(one.taus().begin(), one.taus().end()), std::vector<double>{0.5});
  const TauGrid two(2);
  EXPECT_DOUBLE_EQ(two[0], 0.25);
  EXPECT_DOUBLE_EQ(two[1], 0.75);
  const TauGrid ten = tau_locations(10);
  ASSERT_EQ(ten.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(ten[i], 0.05 + 0.1 * i, 1e-15);
}

TEST(TauGrid, ZeroIsRejected) { EXPECT_THROW(TauGrid(0), std::invalid_argument); }

TEST(TauGrid, InvariantsForRandomSizes) {
  Rng rng(21, streams::kGenerator);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + rng.uniform_index(2000);
    const TauGrid grid(m);
    ASSERT_EQ(grid.size(), m);
    for (std::size_t i = 0; i < m; ++i) {
      ASSERT_GT(grid[i], 0.0);
      ASSERT_LT(grid[i], 1.0);
      if (i) {
        ASSERT_GT(grid[i], grid[i - 1]);
      }
      ASSERT_NEAR(grid[i] + grid[m - 1 - i], 1.0, 1e-12);
      ASSERT_DOUBLE_EQ(grid[i], (2.0 * (i + 1) - 1.0) / (2.0 * m));
    }
  }
}

TEST(QrUpdate, Examples) {
  EXPECT_DOUBLE_EQ(qr_update(0.0, 0.25, 1.0, 0.1), 0.025);
  EXPECT_DOUBLE_EQ(qr_update(0.0, 0.25, -1.0, 0.1), -0.075);
  // A tie is "not less": theta moves up by step * tau.
  EXPECT_DOUBLE_EQ(qr_update(1.0, 0.25, 1.0, 0.1), 1.025);
}

TEST(QrUpdate, MagnitudeNeverExceedsStep) {
  Rng rng(22, streams::kGenerator);
  for (int i = 0; i < 100000; ++i) {
    const double theta = rng.uniform(-10, 10);
    const double tau = rng.uniform(1e-6, 1 - 1e-6);
    const double r = rng.uniform(-10, 10);
    const double step = rng.uniform(0, 2);
    ASSERT_LE(std::abs(qr_update(theta, tau, r, step) - theta), step * (1 + 1e-15));
  }
}

TEST(QrUpdate, DecayingStepsFindBernoulliMedian) {
  Rng rng(23, streams::kGenerator);
  const auto schedule = StepSchedule::polynomial(0.5, 0.7);
  double theta = 0.0;
  for (std::uint64_t t = 0; t < 1000000; ++t) theta = qr_update(theta, 0.5, rng.bernoulli(0.7) ? 1.0 : 0.0, schedule(t));
  EXPECT_NEAR(theta, 1.0, 0.05);
}

// E[increment] = step * (tau - P(R < theta)), checked by Monte Carlo against
// the CDF evaluated analytically.
TEST(QrUpdate, ExpectedIncrementMatchesCdf) {
  Rng rng(24, streams::kGenerator);
  const std::vector<double> support{-2, -1, 0, 1, 2};
  const std::vector<double> probs{0.1, 0.2, 0.3, 0.15, 0.25};
  const int n = 200000;
  for (int trial = 0; trial < 20; ++trial) {
    const double theta = rng.uniform(-2.5, 2.5);
    const double tau = rng.uniform(0.01, 0.99);
    const double step = 0.1;
    double below = 0.0;
    for (std::size_t k = 0; k < support.size(); ++k)
      if (support[k] < theta) below += probs[k];
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double inc = qr_update(theta, tau, support[rng.discrete(probs)], step) - theta;
      sum += inc;
      sum_sq += inc * inc;
    }
    const double mean = sum / n;
    const double se = std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / n);
    EXPECT_NEAR(mean, step * (tau - below), 3 * se + 1e-12) << "theta=" << theta << " tau=" << tau;
  }
}

TEST(QrUpdate, ExpectedIncrementContinuous) {
  // Uniform(0, 1) rewards: P(R < theta) = theta on [0, 1].
  Rng rng(25, streams::kGenerator);
  const int n = 200000;
  for (double theta : {0.1, 0.35, 0.8}) {
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double inc = qr_update(theta, 0.6, rng.uniform01(), 1.0) - theta;
      sum += inc;
      sum_sq += inc * inc;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    EXPECT_NEAR(mean, 0.6 - theta, 3 * se);
  }
}

TEST(QuantileSet, IteratesStayInRewardRangePlusStep) {
  Rng rng(26, streams::kGenerator);
  for (int trial = 0; trial < 50; ++trial) {
    const double lo = rng.uniform(-5, 0), hi = rng.uniform(0, 5);
    const double step_max = rng.uniform(0.001, 1.0);
    const auto schedule = trial % 2 ? StepSchedule::constant(step_max) : StepSchedule::polynomial(step_max, 0.8);
    QuantileSet qs(TauGrid(1 + rng.uniform_index(20)), rng.uniform(lo, hi));
    for (std::uint64_t t = 0; t < 20000; ++t) {
      // Alternate between adversarial extremes and random draws.
      const double r = t % 3 == 0 ? hi : (t % 3 == 1 ? lo : rng.uniform(lo, hi));
      qs.update(r, schedule(t));
      for (double th : qs.thetas()) {
        ASSERT_GE(th, lo - step_max);
        ASSERT_LE(th, hi + step_max);
      }
    }
  }
}

TEST(QuantileSet, UpdateMovesEachThetaByAtMostStep) {
  QuantileSet qs(TauGrid(4), std::vector<double>{-1, 0, 1, 2});
  const auto before = std::vector<double>(qs.thetas().begin(), qs.thetas().end());
  qs.update(0.5, 0.2);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_LE(std::abs(qs[i] - before[i]), 0.2);
  EXPECT_DOUBLE_EQ(qs[0], -1 + 0.2 * 0.125);
  EXPECT_DOUBLE_EQ(qs[2], 1 - 0.2 * (1 - 0.625));
}

TEST(QuantileSet, SizeMismatchThrows) {
  EXPECT_THROW(QuantileSet(TauGrid(3), std::vector<double>{1, 2}), std::invalid_argument);
}

TEST(MeanOfQuantiles, Examples) {
  EXPECT_DOUBLE_EQ(mean_of_quantiles(QuantileSet(TauGrid(5), 3.5)), 3.5);
  const std::vector<double> rpbp{0, 0, 0, 0, 1, 1, 1, 2, 2, 2};
  EXPECT_DOUBLE_EQ(mean_of_quantiles(QuantileSet(TauGrid(10), rpbp)), 0.9);
  const std::vector<double> sym{-1, 1};
  EXPECT_DOUBLE_EQ(mean_of_quantiles(sym), 0.0);
}

// The mean of the exact quantiles approaches the distribution mean as m grows.
TEST(MeanOfQuantiles, ErrorShrinksWithGridSize) {
  struct Dist {
    std::function<double(double)> quantile;
    double mean;
  };
  const std::vector<Dist> dists{
      {[](double u) { return u; }, 0.5},
      {[](double u) { return std::sqrt(u); }, 2.0 / 3.0},                 // F(x) = x^2
      {[](double u) { return -std::log1p(-u); }, 1.0},                    // Exp(1)
      {[](double u) { return u < 0.3 ? 0.0 : (u < 0.8 ? 1.0 : 5.0); }, 1.5},  // discrete
  };
  for (const auto& d : dists) {
    const double e10 = std::abs(mean_of_quantiles(point_quantiles(d.quantile, TauGrid(10))) - d.mean);
    const double e1000 = std::abs(mean_of_quantiles(point_quantiles(d.quantile, TauGrid(1000))) - d.mean);
    EXPECT_LE(e1000, e10 + 1e-12);
  }
}

TEST(QuantileHuber, Examples) {
  const HuberParams unit{1.0};
  EXPECT_EQ(quantile_huber(0.0, 0.3, unit).loss, 0.0);
  EXPECT_DOUBLE_EQ(quantile_huber(1.0, 0.5, unit).loss, 0.25);
  EXPECT_DOUBLE_EQ(quantile_huber(-2.0, 0.25, unit).loss, 1.125);
}

TEST(QuantileHuber, DerivativeMatchesFiniteDifferences) {
  Rng rng(27, streams::kGenerator);
  const double h = 1e-6;
  for (int i = 0; i < 5000; ++i) {
    const HuberParams p{rng.uniform(0.1, 3.0)};
    const double tau = rng.uniform(0.01, 0.99);
    const double x = rng.uniform(-6, 6);
    if (std::abs(x) < 10 * h) continue;
    const double fd = (quantile_huber(x + h, tau, p).loss - quantile_huber(x - h, tau, p).loss) / (2 * h);
    ASSERT_NEAR(quantile_huber(x, tau, p).derivative, fd, 1e-4) << "x=" << x << " tau=" << tau;
    ASSERT_GE(quantile_huber(x, tau, p).loss, 0.0);
  }
}

TEST(QuantileHuber, ContinuousAtThreshold) {
  const HuberParams p{1.5};
  for (double tau : {0.1, 0.5, 0.9})
    for (double sign : {-1.0, 1.0}) {
      const double x = sign * p.lambda;
      const double eps = 1e-9;
      EXPECT_NEAR(quantile_huber(x - eps, tau, p).loss, quantile_huber(x + eps, tau, p).loss, 1e-8);
      EXPECT_NEAR(quantile_huber(x - eps, tau, p).derivative, quantile_huber(x + eps, tau, p).derivative, 1e-8);
    }
}

TEST(QuantileHuber, LambdaMustBePositive) {
  EXPECT_THROW(HuberParams{0.0}.validate(), std::invalid_argument);
  EXPECT_NO_THROW(HuberParams{}.validate());
}

TEST(StepSchedule, Shapes) {
  const auto c = StepSchedule::constant(0.2);
  EXPECT_EQ(c(0), 0.2);
  EXPECT_EQ(c(1000000), 0.2);
  const auto p = StepSchedule::polynomial(1.0, 1.0);
  EXPECT_DOUBLE_EQ(p(0), 1.0);
  EXPECT_DOUBLE_EQ(p(3), 0.25);
  const auto h = StepSchedule::constant_then_decay(0.5, 10, 1.0);
  EXPECT_EQ(h(9), 0.5);
  EXPECT_DOUBLE_EQ(h(10), 0.5);
  EXPECT_DOUBLE_EQ(h(11), 0.25);
  EXPECT_EQ(h.supremum(), 0.5);
}

TEST(StepSchedule, PowerOutsideRobbinsMonroRangeThrows) {
  EXPECT_THROW(StepSchedule::polynomial(1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(StepSchedule::polynomial(1.0, 1.5), std::invalid_argument);
  EXPECT_THROW(StepSchedule::constant(0.0), std::invalid_argument);
}

TEST(StepSchedule, Parse) {
  EXPECT_EQ(StepSchedule::parse("constant", 0.3).kind(), StepSchedule::Kind::kConstant);
  EXPECT_DOUBLE_EQ(StepSchedule::parse("poly:0.7", 1.0)(1), std::pow(2.0, -0.7));
  EXPECT_DOUBLE_EQ(StepSchedule::parse("hold:5:1", 1.0)(6), 0.5);
  EXPECT_THROW(StepSchedule::parse("poly:", 1.0), std::invalid_argument);
  EXPECT_THROW(StepSchedule::parse("cosine", 1.0), std::invalid_argument);
}
