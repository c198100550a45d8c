#include <gtest/gtest.h>

#include <cmath>

#include "support/design_gen.hpp"
#include "support/oracle.hpp"

using namespace ministra;

namespace {

::testing::AssertionResult same_slack(double a, double b) {
  if (a == b || std::fabs(a - b) <= 1e-6) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << a << " vs " << b;
}

}  // namespace

TEST(BruteRelationship, SameClock) {
  auto [s, h] = test::brute_relationship(10, 0, 10, 0);
  EXPECT_EQ(s, 10);
  EXPECT_EQ(h, 0);
  auto [s2, h2] = test::brute_relationship(10, 0, 10, 5);
  EXPECT_EQ(s2, 5);
  EXPECT_EQ(h2, -5);
  auto [s3, h3] = test::brute_relationship(4, 0, 6, 0);
  EXPECT_EQ(s3, 2);
  EXPECT_EQ(h3, 2);
}

TEST(BruteRelationship, MatchesEngine) {
  for (double lp : {4.0, 6.0, 10.0, 12.5})
    for (double cp : {4.0, 6.0, 10.0, 12.5})
      for (double le : {0.0, 1.5})
        for (double ce : {0.0, 2.0, 3.5}) {
          auto a = test::brute_relationship(lp, le, cp, ce);
          auto b = clock_relationship(lp, le, cp, ce);
          EXPECT_EQ(a, b) << lp << " " << le << " " << cp << " " << ce;
        }
}

TEST(Oracle, RandomDesignsAgree) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    auto gen = test::generate_design(seed);
    Design d = test::build_design(gen);
    auto o = test::exhaustive_oracle(d);
    for (std::size_t i = 0; i < d.state.endpoints.size(); ++i) {
      PinId p = d.state.endpoints[i].pin;
      ASSERT_TRUE(same_slack(d.state.setup_slack[i], o.setup_slack[p]))
          << "seed " << seed << " setup " << d.netlist.pin_names[p] << "\n" << gen.sdc;
      ASSERT_TRUE(same_slack(d.state.hold_slack[i], o.hold_slack[p]))
          << "seed " << seed << " hold " << d.netlist.pin_names[p] << "\n" << gen.sdc;
    }
  }
}
