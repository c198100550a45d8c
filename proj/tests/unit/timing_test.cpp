#include <gtest/gtest.h>

#include <cmath>

#include "ministra/timing.hpp"
#include "support/design_gen.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace ministra;

namespace {

double setup_at(const Design& d, const std::string& pin) {
  auto i = d.state.endpoint_of[d.netlist.find_pin(pin)];
  return i == kInvalidId ? kInf : d.state.setup_slack[i];
}
double hold_at(const Design& d, const std::string& pin) {
  auto i = d.state.endpoint_of[d.netlist.find_pin(pin)];
  return i == kInvalidId ? kInf : d.state.hold_slack[i];
}

const char* kTwoClocks = R"(
module t(c1, c2);
  input c1, c2;
  wire q1, q2;
  DFFZ r1(.CK(c1), .D(q2), .Q(q1));
  DFFZ r2(.CK(c2), .D(q1), .Q(q2));
endmodule
)";

const char* kGated = R"(
module t(clk, a, en);
  input clk, a, en;
  wire q, n;
  DFFZ r1(.CK(clk), .D(a), .Q(q));
  AND2 g(.A(q), .B(en), .Y(n));
  DFFZ r2(.CK(clk), .D(n), .Q());
endmodule
)";

}  // namespace

TEST(Timing, CrossClockRelationship) {
  auto d = test::toy_design(kTwoClocks,
                            "create_clock -name a -period 10 [get_ports c1]\ncreate_clock -name b -period 15 [get_ports c2]\n");
  auto [s, h] = test::brute_relationship(10, 0, 15, 0);
  EXPECT_DOUBLE_EQ(s, 5);
  EXPECT_DOUBLE_EQ(setup_at(d, "r2/D"), s - 1);
  EXPECT_DOUBLE_EQ(hold_at(d, "r2/D"), 1 - h);
  auto [s2, h2] = test::brute_relationship(15, 0, 10, 0);
  EXPECT_DOUBLE_EQ(setup_at(d, "r1/D"), s2 - 1);
  EXPECT_DOUBLE_EQ(hold_at(d, "r1/D"), 1 - h2);
}

TEST(Timing, ClockRelationshipMatchesEdgeListing) {
  for (double lp : {4.0, 6.0, 10.0})
    for (double cp : {4.0, 5.0, 12.0})
      for (double le : {0.0, lp / 2})
        for (double ce : {0.0, cp / 2}) {
          auto [s, h] = clock_relationship(lp, le, cp, ce);
          auto [bs, bh] = test::brute_relationship(lp, le, cp, ce);
          EXPECT_DOUBLE_EQ(s, bs) << lp << " " << le << " " << cp << " " << ce;
          EXPECT_DOUBLE_EQ(h, bh) << lp << " " << le << " " << cp << " " << ce;
        }
}

TEST(Timing, CaseAnalysisBlocksPath) {
  const std::string clk = "create_clock -name clk -period 10 [get_ports clk]\nset_input_delay 0 -clock clk [get_ports {a en}]\n";
  auto open = test::toy_design(kGated, clk);
  EXPECT_DOUBLE_EQ(setup_at(open, "r2/D"), 10 - 3);
  auto tied = test::toy_design(kGated, clk + "set_case_analysis 0 [get_ports en]\n");
  EXPECT_FALSE(std::isfinite(setup_at(tied, "r2/D")));
}

TEST(Timing, FalsePathNeverTightens) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto gen = test::generate_design(seed);
    auto base = test::build_design(gen);
    auto relaxed_gen = gen;
    relaxed_gen.sdc += "set_false_path -through [get_pins g1*]\n";
    Design relaxed = [&] {
      try {
        return test::build_design(relaxed_gen);
      } catch (const Error&) {
        return test::build_design(gen);  // no g1* pins in this design
      }
    }();
    ASSERT_EQ(base.state.endpoints.size(), relaxed.state.endpoints.size());
    for (std::size_t i = 0; i < base.state.endpoints.size(); ++i) {
      EXPECT_GE(relaxed.state.setup_slack[i], base.state.setup_slack[i]) << seed;
      EXPECT_GE(relaxed.state.hold_slack[i], base.state.hold_slack[i]) << seed;
    }
  }
}

TEST(Timing, ExceptionStateOnlyGrows) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto d = test::build_design(test::generate_design(seed));
    const TimingState& st = d.state;
    if (st.exceptions.empty()) continue;
    for (EdgeId e = 0; e < d.graph.num_edges(); ++e) {
      if (!d.graph.propagates(e)) continue;
      const PinId v = d.graph.edge_to[e];
      for (const TagEntry& ent : st.entries[d.graph.edge_from[e]]) {
        TagKey k = st.tag(ent.tag);
        const TagKey before = k;
        st.exceptions.advance(k, v);
        ASSERT_EQ(k.bits.size(), before.bits.size());
        for (std::size_t w = 0; w < k.bits.size(); ++w) EXPECT_EQ(k.bits[w] & before.bits[w], before.bits[w]) << seed;
      }
    }
  }
}

TEST(Timing, LateArrivalIsLongestPath) {
  test::GenOptions opt;
  opt.max_exceptions = 0;
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    auto d = test::build_design(test::generate_design(seed, opt));
    auto oracle = test::exhaustive_oracle(d);
    for (std::size_t i = 0; i < d.state.endpoints.size(); ++i) {
      PinId p = d.state.endpoints[i].pin;
      double a = d.state.setup_slack[i], b = oracle.setup_slack[p];
      if (std::isinf(a) || std::isinf(b))
        EXPECT_EQ(a, b);
      else
        EXPECT_NEAR(a, b, 1e-6) << seed;
    }
  }
}

TEST(Timing, TagCapDoesNotChangeSmallDesigns) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto gen = test::generate_design(seed);
    auto a = test::build_design(gen);
    if (a.state.tag_overflows) continue;
    auto lib = parse_liberty(gen.liberty);
    auto nl = elaborate(parse_verilog(gen.verilog), lib, "top");
    auto rc = annotate_spef(parse_spef(gen.spef), nl);
    Design b = make_design(std::move(lib), std::move(nl), gen.sdc, std::move(rc));
    TimingOptions wide;
    wide.tag_cap = 4096;
    analyze_design(b, {}, wide);
    EXPECT_EQ(a.state.setup_slack, b.state.setup_slack) << seed;
    EXPECT_EQ(a.state.hold_slack, b.state.hold_slack) << seed;
  }
}

TEST(Timing, WnsTnsSummary) {
  auto d = test::toy_design(kTwoClocks,
                            "create_clock -name a -period 10 [get_ports c1]\ncreate_clock -name b -period 15 [get_ports c2]\n");
  WnsTns all = wns_tns(d.state, CheckMode::setup);
  EXPECT_EQ(all.endpoints, 2u);
  EXPECT_DOUBLE_EQ(all.wns, std::min(setup_at(d, "r1/D"), setup_at(d, "r2/D")));
  WnsTns only_b = wns_tns(d.state, CheckMode::setup, d.constraints.find_clock("b"));
  EXPECT_EQ(only_b.endpoints, 1u);
  EXPECT_DOUBLE_EQ(only_b.wns, setup_at(d, "r2/D"));
}
