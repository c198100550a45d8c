#include <gtest/gtest.h>

#include <cmath>

#include "ministra/sdc.hpp"
#include "ministra/tcl.hpp"
#include "support/design_gen.hpp"
#include "support/fixtures.hpp"

using namespace ministra;

namespace {

const char* kNet = R"(
module top(clk, a, b, y);
  input clk, a, b;
  output y;
  wire q1, q2, n1;
  DFF r1(.CK(clk), .D(a), .Q(q1));
  DFF r2(.CK(clk), .D(b), .Q(q2));
  AND2 g(.A(q1), .B(q2), .Y(n1));
  DFF r3(.CK(clk), .D(n1), .Q(y));
endmodule
)";

struct Fixture {
  LibertyLibrary lib = test::toy_lib();
  FlatNetlist nl = elaborate(parse_verilog(kNet), lib);
  Constraints eval(const std::string& s) { return eval_sdc(s, nl, lib); }
};

template <typename F>
std::size_t parse_error_line(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.line();
  } catch (const Error&) {
    return 0;
  }
  return 0;
}

}  // namespace

TEST(Sdc, ClocksAndUnits) {
  Fixture f;
  auto c = f.eval("create_clock -name clk -period 10 -waveform {2 7} [get_ports clk]\ncreate_clock -name v -period 4\n");
  ASSERT_EQ(c.clocks.size(), 2u);
  EXPECT_EQ(c.clocks[0].name, "clk");
  EXPECT_DOUBLE_EQ(c.clocks[0].period, 10);  // the toy library declares 1ps
  EXPECT_DOUBLE_EQ(c.clocks[0].rise, 2);
  EXPECT_DOUBLE_EQ(c.clocks[0].fall, 7);
  EXPECT_EQ(c.clocks[0].sources, std::vector<PinId>{f.nl.find_pin("clk")});
  EXPECT_TRUE(c.clocks[1].sources.empty());
  EXPECT_DOUBLE_EQ(c.clocks[1].fall, 2);
  auto ns = f.eval("set_units -time ns\ncreate_clock -name clk -period 1.5 [get_ports clk]\n");
  EXPECT_DOUBLE_EQ(ns.clocks[0].period, 1500);
}

TEST(Sdc, ClockOptionPrefersClockOverSameNamedPort) {
  Fixture f;
  auto c = f.eval("create_clock -name clk -period 10 [get_ports clk]\nset_input_delay 3 -clock clk [get_ports a]\n");
  ASSERT_EQ(c.io_delays.size(), 1u);
  EXPECT_EQ(c.io_delays[0].clock, 0u);
  EXPECT_DOUBLE_EQ(c.io_delays[0].value[kLate][kRise], 3);
}

TEST(Sdc, IoDelayMinMaxAndEdges) {
  Fixture f;
  auto c = f.eval(
      "create_clock -name clk -period 10 [get_ports clk]\n"
      "set_input_delay 2 -clock clk -max [get_ports a]\n"
      "set_input_delay 1 -clock clk -min [get_ports a]\n"
      "set_output_delay 4 -clock clk -rise [get_ports y]\n");
  ASSERT_EQ(c.io_delays.size(), 2u);
  const IoDelay& in = c.io_delays[0];
  EXPECT_DOUBLE_EQ(in.value[kLate][kFall], 2);
  EXPECT_DOUBLE_EQ(in.value[kEarly][kRise], 1);
  const IoDelay& out = c.io_delays[1];
  EXPECT_FALSE(out.is_input);
  EXPECT_DOUBLE_EQ(out.value[kLate][kRise], 4);
  EXPECT_TRUE(std::isnan(out.value[kLate][kFall]));
}

TEST(Sdc, ExceptionPriorityFollowsDeclarationOrder) {
  Fixture f;
  auto c = f.eval(
      "create_clock -name clk -period 10 [get_ports clk]\n"
      "set_false_path -from [get_pins r1/CK]\n"
      "set_multicycle_path 3 -setup -to [get_pins r3/D]\n"
      "set_max_delay 7 -through [get_pins g/Y]\n"
      "set_false_path -hold -from [get_cells r2] -through [list [get_pins g/A] [get_pins g/B]] -to [get_clocks clk]\n");
  ASSERT_EQ(c.exceptions.size(), 4u);
  for (std::size_t i = 0; i < c.exceptions.size(); ++i) EXPECT_EQ(c.exceptions[i].priority, i);
  EXPECT_EQ(c.exceptions[1].kind, ExceptionKind::multicycle);
  EXPECT_EQ(c.exceptions[1].multiplier, 3);
  EXPECT_FALSE(c.exceptions[1].hold);
  EXPECT_DOUBLE_EQ(c.exceptions[2].value, 7);
  const PathException& last = c.exceptions[3];
  EXPECT_FALSE(last.setup);
  EXPECT_EQ(last.from.cells.size(), 1u);
  ASSERT_EQ(last.through.size(), 1u);
  EXPECT_EQ(last.through[0].pins.size(), 2u);
  EXPECT_EQ(last.to.clocks, std::vector<ClockId>{0});
}

TEST(Sdc, MulticycleMultiplierMustBePositive) {
  Fixture f;
  EXPECT_THROW(f.eval("set_multicycle_path 0 -setup -to [get_pins r3/D]\n"), Error);
}

TEST(Sdc, UnrolledScriptIsEquivalent) {
  Fixture f;
  std::string scripted =
      "set p 10\n"
      "create_clock -name clk -period [expr {$p * 2}] [get_ports clk]\n"
      "foreach port {a b} { set_input_delay [expr {$p / 5}] -clock clk [get_ports $port] }\n"
      "if {$p > 5} { set_false_path -to [get_pins r3/D] } else { set_max_delay 1 -to [get_pins r3/D] }\n"
      "set v 3\n"
      "while {$v > 3} { incr v -1 }\n"
      "set_output_delay $v -clock clk [get_ports y]\n";
  std::string flat =
      "create_clock -name clk -period 20 [get_ports clk]\n"
      "set_input_delay 2 -clock clk [get_ports a]\n"
      "set_input_delay 2 -clock clk [get_ports b]\n"
      "set_false_path -to [get_pins r3/D]\n"
      "set_output_delay 3 -clock clk [get_ports y]\n";
  auto a = f.eval(scripted), b = f.eval(flat);
  a.exceptions[0].line = b.exceptions[0].line = 0;
  EXPECT_EQ(a, b);
}

TEST(Sdc, EvaluationIsDeterministic) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto gen = test::generate_design(seed);
    auto lib = parse_liberty(gen.liberty);
    auto nl = elaborate(parse_verilog(gen.verilog), lib, "top");
    EXPECT_EQ(eval_sdc(gen.sdc, nl, lib), eval_sdc(gen.sdc, nl, lib)) << seed;
  }
}

TEST(Sdc, GlobsAndQueries) {
  Fixture f;
  EXPECT_TRUE(glob_match("r*", "r12"));
  EXPECT_TRUE(glob_match("r?/D", "r1/D"));
  EXPECT_FALSE(glob_match("r?/D", "r12/D"));
  EXPECT_TRUE(glob_match("a\\*", "a*"));
  EXPECT_FALSE(glob_match("a\\*", "ab"));
  Constraints none;
  auto pins = query_objects(ObjectKind::pins, "r*/CK", f.nl, none);
  EXPECT_EQ(pins.size(), 3u);
  EXPECT_TRUE(std::is_sorted(pins.begin(), pins.end()));
  EXPECT_EQ(query_objects(ObjectKind::cells, "g", f.nl, none).size(), 1u);
}

TEST(Sdc, UnknownObjectsFailAndUnknownCommandsAreSkipped) {
  Fixture f;
  EXPECT_THROW(f.eval("set_input_delay 1 -clock nosuch [get_ports a]\n"), Error);
  auto c = f.eval("frobnicate 1\ncreate_clock -name clk -period 10 [get_ports clk]\n");
  EXPECT_EQ(c.clocks.size(), 1u);
  EXPECT_EQ(parse_error_line([&] { f.eval("create_clock -name clk -period 10 [get_ports clk]\n\nset x {unbalanced\n"); }), 3u);
}

TEST(Tcl, CoreCommands) {
  TclInterp in;
  EXPECT_EQ(in.eval("set x 4; expr {$x * 2 + 1}"), "9");
  EXPECT_EQ(in.eval("set l {}; foreach {a b} {1 2 3 4} { lappend l [expr {$a + $b}] }; set l"), "3 7");
  EXPECT_EQ(in.eval("if {1 > 2} {set r a} elseif {2 > 1} {set r b} else {set r c}"), "b");
  EXPECT_EQ(in.eval("lindex [lrange {a b c d} 1 2] end"), "c");
  EXPECT_EQ(in.eval("set s 0; for {set i 0} {$i < 5} {incr i} { incr s $i }; set s"), "10");
  EXPECT_EQ(in.eval("llength [list a {b c} d]"), "3");
  EXPECT_EQ(in.eval("set a \"x[expr 1+1]y\""), "x2y");
}
