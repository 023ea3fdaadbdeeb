#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "d2rl/random.hpp"
#include "d2rl/text.hpp"

using namespace d2rl;

TEST(Text, FormatRoundTripsRandomBitPatterns) {
  Rng rng(11, streams::kGenerator);
  for (int i = 0; i < 20000; ++i) {
    const double x = std::bit_cast<double>(rng.next_u64());
    if (!std::isfinite(x)) continue;
    const double back = text::parse_double(text::format_double(x));
    ASSERT_EQ(std::bit_cast<std::uint64_t>(back), std::bit_cast<std::uint64_t>(x)) << text::format_double(x);
  }
}

TEST(Text, FormatIsShortest) {
  EXPECT_EQ(text::format_double(0.1), "0.1");
  EXPECT_EQ(text::format_double(2.0), "2");
  EXPECT_EQ(text::format_double(-0.25), "-0.25");
}

TEST(Text, StrictParsing) {
  EXPECT_DOUBLE_EQ(text::parse_double(" 1.5 "), 1.5);
  EXPECT_DOUBLE_EQ(text::parse_double("+2e-3"), 2e-3);
  EXPECT_THROW(text::parse_double("1.5x"), std::invalid_argument);
  EXPECT_THROW(text::parse_double(""), std::invalid_argument);
  EXPECT_EQ(text::parse_uint("42"), 42u);
  EXPECT_THROW(text::parse_uint("-1"), std::invalid_argument);
  EXPECT_EQ(text::parse_int("-7"), -7);
  EXPECT_TRUE(text::parse_bool("true"));
  EXPECT_FALSE(text::parse_bool("0"));
  EXPECT_THROW(text::parse_bool("maybe"), std::invalid_argument);
}

TEST(Text, Split) {
  const auto parts = text::split(" a, b ,c ", ',');
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[0], "a");
  EXPECT_EQ(parts[1], "b");
  EXPECT_EQ(parts[2], "c");
  EXPECT_EQ(text::split("", ',').size(), 1u);
  EXPECT_EQ(text::split_whitespace("  1 \t 2  3").size(), 3u);
}
