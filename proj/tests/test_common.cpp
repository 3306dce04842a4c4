#include <cmath>
#include <limits>
#include <set>

#include <gtest/gtest.h>

#include "alsim/common.hpp"
#include "alsim/format.hpp"

namespace alsim {
namespace {

TEST(Format, DoubleRoundTrip) {
  Rng rng(7);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 10000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(0.0), "0");
}

TEST(Format, NanAndInfinity) {
  EXPECT_TRUE(std::isnan(parse_double(format_double(std::numeric_limits<double>::quiet_NaN()))));
  EXPECT_EQ(parse_double(format_double(INFINITY)), INFINITY);
}

TEST(Format, RejectsTrailingJunk) {
  EXPECT_THROW(parse_double("1.5x"), InvalidArgument);
  EXPECT_THROW(parse_double(""), InvalidArgument);
  EXPECT_THROW(parse_integer("12 "), InvalidArgument);
  EXPECT_EQ(parse_integer("-42"), -42);
}

TEST(Seeds, DeriveIsPureAndSpreads) {
  EXPECT_EQ(derive_seed(5, SeedRole::kFit, 3), derive_seed(5, SeedRole::kFit, 3));
  std::set<Seed> seen;
  for (std::uint64_t role = 1; role <= 11; ++role)
    for (std::uint64_t i = 0; i < 100; ++i) seen.insert(derive_seed(1, static_cast<SeedRole>(role), i));
  EXPECT_EQ(seen.size(), 1100u);
}

TEST(Seeds, StableHashIsFnv1a) {
  // Offset basis for the empty string, and the published test vector for "a".
  EXPECT_EQ(stable_hash(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(stable_hash("a"), 0xaf63dc4c8601ec8cULL);
}

}  // namespace
}  // namespace alsim
