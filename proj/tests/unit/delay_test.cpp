#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ministra/delay.hpp"
#include "support/rc_util.hpp"

using namespace ministra;

TEST(Lut, GridPointsAndMidpoint) {
  Lut2D t{{1, 2}, {10, 20}, {0, 2, 4, 6}};
  EXPECT_DOUBLE_EQ(lut_eval(t, 2, 10), 4);
  EXPECT_DOUBLE_EQ(lut_eval(t, 1.5, 15), 3);
}

TEST(Lut, PlaneExtension) {
  Lut2D t{{1, 2, 4}, {1, 3}, {}};
  auto f = [](double s, double c) { return 3 * s - 2 * c + 7; };
  for (double s : t.index_1)
    for (double c : t.index_2) t.values.push_back(f(s, c));
  EXPECT_NEAR(lut_eval(t, -5, -3), f(-5, -3), 1e-12);
  EXPECT_NEAR(lut_eval(t, 10, 9), f(10, 9), 1e-12);
}

TEST(Lut, OneDimensionalAndScalar) {
  Lut2D one{{0, 10}, {}, {1, 3}};
  EXPECT_DOUBLE_EQ(lut_eval(one, 5, 123), 2);
  Lut2D col{{}, {0, 10}, {1, 3}};
  EXPECT_DOUBLE_EQ(lut_eval(col, 123, 5), 2);
  Lut2D scalar{{}, {}, {42}};
  EXPECT_DOUBLE_EQ(lut_eval(scalar, 1, 1), 42);
}

TEST(Lut, ContinuousAcrossCells) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0, 10);
  Lut2D t{{0, 1, 3, 7}, {0, 2, 5}, {}};
  for (int i = 0; i < 12; ++i) t.values.push_back(u(rng));
  for (double b : {1.0, 3.0})
    for (double c : {0.5, 3.3}) EXPECT_NEAR(lut_eval(t, b - 1e-9, c), lut_eval(t, b + 1e-9, c), 1e-7);
}

TEST(CellArc, UnatenessMapping) {
  TimingArc arc;
  arc.sense = TimingSense::negative_unate;
  arc.cell_rise = Lut2D{{0, 100}, {}, {10, 110}};
  arc.cell_fall = Lut2D{{0, 100}, {}, {20, 220}};
  arc.rise_transition = Lut2D{{}, {}, {5}};
  arc.fall_transition = Lut2D{{}, {}, {6}};
  ModeEdge<double> in{{{0, 100}, {0, 100}}};
  auto r = cell_arc(arc, in, 1);
  EXPECT_DOUBLE_EQ(r.delay[kLate][kRise], 110);  // from falling input, slew 100
  EXPECT_DOUBLE_EQ(r.delay[kLate][kFall], 20);
  arc.sense = TimingSense::non_unate;
  r = cell_arc(arc, in, 1);
  EXPECT_DOUBLE_EQ(r.delay[kLate][kRise], 110);
  EXPECT_DOUBLE_EQ(r.delay[kEarly][kRise], 10);
  EXPECT_DOUBLE_EQ(r.delay[kLate][kFall], 220);
}

TEST(Elmore, Examples) {
  RcNet seg = test::chain({1.0}, {0, 1});
  EXPECT_NEAR(elmore(seg).delay[1], 1.0, 1e-12);
  RcNet ch = test::chain({1, 1}, {0, 1, 1});
  EXPECT_NEAR(elmore(ch).delay[2], 3.0, 1e-12);
  RcNet star;
  star.cap = {0, 0, 1, 1};
  star.node_pin = {0, kInvalidId, 1, 2};
  star.res_a = {0, 1, 1};
  star.res_b = {1, 2, 3};
  star.res = {1, 1e-6, 1e-6};
  EXPECT_NEAR(elmore(star).delay[2], 2.0, 1e-5);
}

TEST(Elmore, MatchesBruteForce) {
  std::mt19937 rng(11);
  for (int i = 0; i < 200; ++i) {
    RcNet rc = test::random_tree(rng, 3 + i % 18);
    auto el = elmore(rc);
    auto bf = test::brute_elmore(rc);
    for (std::size_t k = 0; k < bf.size(); ++k) EXPECT_NEAR(el.delay[k], bf[k], 1e-9 * std::max(1.0, bf[k]));
  }
}

TEST(Elmore, MonotoneInCap) {
  std::mt19937 rng(5);
  RcNet rc = test::random_tree(rng, 12);
  auto base = elmore(rc).delay;
  for (std::size_t k = 0; k < rc.num_nodes(); ++k) {
    RcNet more = rc;
    more.cap[k] += 0.7;
    auto d = elmore(more).delay;
    for (std::size_t j = 0; j < d.size(); ++j) EXPECT_GE(d[j], base[j] - 1e-12);
  }
}

TEST(Arnoldi, SingleSegmentIsExact) {
  RcNet seg = test::chain({2.0}, {0, 3.0});
  auto m = arnoldi_reduce(seg, 1);
  ASSERT_EQ(m.sinks.size(), 1u);
  ASSERT_EQ(m.sinks[0].tau.size(), 1u);
  EXPECT_NEAR(m.sinks[0].tau[0], 6.0, 1e-12);
  auto r = sink_response(m.sinks[0], 0.0);
  EXPECT_NEAR(r.delay, 6.0 * std::log(2.0), 1e-5);
}

TEST(Arnoldi, MomentsMatch) {
  std::mt19937 rng(17);
  for (int i = 0; i < 50; ++i) {
    RcNet rc = test::random_tree(rng, 4 + i % 16);
    for (std::size_t q : {2u, 3u, 4u}) {
      auto m = arnoldi_reduce(rc, q);
      auto ex = rc_moments(rc, 2 * q);
      for (std::size_t s = 0; s < m.nodes.size(); ++s)
        for (std::size_t k = 0; k + 1 < 2 * q; ++k) {
          double e = ex[m.nodes[s]][k];
          EXPECT_NEAR(m.sinks[s].moment(k), e, 1e-9 * std::fabs(e)) << "q=" << q << " k=" << k;
        }
    }
  }
}

TEST(Arnoldi, FullOrderMatchesTransient) {
  std::mt19937 rng(23);
  for (int i = 0; i < 20; ++i) {
    RcNet rc = test::random_tree(rng, 3 + i % 8);
    auto m = arnoldi_reduce(rc, rc.num_nodes());
    auto oracle = test::transient_delay(rc, 0.0);
    for (std::size_t s = 0; s < m.nodes.size(); ++s) {
      auto r = sink_response(m.sinks[s], 0.0);
      ASSERT_FALSE(r.fallback);
      EXPECT_NEAR(r.delay, oracle[m.nodes[s]], 5e-3 * oracle[m.nodes[s]]);
    }
  }
}

TEST(Arnoldi, UnstableFallsBackToElmore) {
  RcNet seg = test::chain({2.0}, {0, 3.0});
  auto m = arnoldi_reduce(seg, 1);
  m.sinks[0].stable = false;
  auto r = arnoldi_delay(m, 10.0, elmore(seg));
  EXPECT_TRUE(r[0].fallback);
  EXPECT_DOUBLE_EQ(r[0].delay, 6.0);
}

TEST(NetSlew, RootSumSquare) {
  EXPECT_DOUBLE_EQ(net_slew(30, 40), 50);
  EXPECT_DOUBLE_EQ(net_slew(30, 0), 30);
}
