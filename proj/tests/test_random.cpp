#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "d2rl/random.hpp"

using namespace d2rl;

// Known-answer vectors for Philox4x32-10.
TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto out = Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                        {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, SameSeedSameStream) {
  Rng a(42, 3), b(42, 3);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Philox, StreamsAndSeedsDiffer) {
  Rng agent(7, streams::kAgent), env(7, streams::kEnvironment), other(8, streams::kAgent);
  int same_stream = 0, same_seed = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = agent.next_u32();
    same_stream += x == env.next_u32();
    same_seed += x == other.next_u32();
  }
  EXPECT_LT(same_stream, 3);
  EXPECT_LT(same_seed, 3);
}

TEST(Rng, Uniform01InRangeWithRightMoments) {
  Rng rng(1);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum_sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sum_sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 0.002);
}

TEST(Rng, UniformIndexChiSquare) {
  Rng rng(2);
  const std::size_t k = 7;
  const int n = 70000;
  std::vector<int> counts(k, 0);
  for (int i = 0; i < n; ++i) {
    const auto idx = rng.uniform_index(k);
    ASSERT_LT(idx, k);
    ++counts[idx];
  }
  double chi2 = 0.0;
  const double expected = static_cast<double>(n) / k;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 6 degrees of freedom; 99.9th percentile is 22.46.
  EXPECT_LT(chi2, 22.46);
}

TEST(Rng, DiscreteMatchesWeights) {
  Rng rng(3);
  const std::vector<double> weights{0.1, 0.0, 0.6, 0.3};
  std::vector<int> counts(weights.size(), 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[rng.discrete(weights)];
  EXPECT_EQ(counts[1], 0);
  for (std::size_t i = 0; i < weights.size(); ++i) EXPECT_NEAR(counts[i] / double(n), weights[i], 0.005);
}

TEST(Rng, BernoulliFrequency) {
  Rng rng(4);
  int hits = 0;
  for (int i = 0; i < 100000; ++i) hits += rng.bernoulli(0.7);
  EXPECT_NEAR(hits / 100000.0, 0.7, 0.005);
}

TEST(Rng, DiscardMatchesDrawing) {
  Philox4x32 a(9, 1), b(9, 1);
  for (int i = 0; i < 40; ++i) a();
  b.discard_blocks(10);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(a(), b());
}
