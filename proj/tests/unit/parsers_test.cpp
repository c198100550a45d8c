#include <gtest/gtest.h>

#include <string>

#include "ministra/io.hpp"
#include "ministra/liberty.hpp"
#include "ministra/sdf.hpp"
#include "ministra/spef.hpp"
#include "ministra/verilog.hpp"
#include "support/fixtures.hpp"

using namespace ministra;

namespace {

const char* kSpef = R"(*SPEF "IEEE 1481-1998"
*DESIGN "top"
*DIVIDER /
*DELIMITER :
*BUS_DELIMITER [ ]
*T_UNIT 1 PS
*C_UNIT 1 PF
*R_UNIT 1 KOHM
*L_UNIT 1 HENRY

*NAME_MAP
*1 n1
*2 u/b1

*PORTS
in I

*D_NET *1 0.003
*CONN
*P in I
*I *2:A I
*CAP
1 *1:1 0.001
2 *2:A 0.002
*RES
1 in *1:1 0.5
2 *1:1 *2:A 0.25
*END
)";

const char* kSdf = R"((DELAYFILE
  (SDFVERSION "3.0")
  (DESIGN "top")
  (TIMESCALE 1ns)
  (CELL (CELLTYPE "BUF1") (INSTANCE b1)
    (DELAY (ABSOLUTE (IOPATH A Y (0.001:0.002:0.003) (0.004::0.006)))))
  (CELL (CELLTYPE "top") (INSTANCE)
    (DELAY (ABSOLUTE (INTERCONNECT b1/Y b2/A (0.5) (0.25)))))
)
)";

std::string lib_with_units(const std::string& time_unit, const std::string& cap_unit) {
  return "library(u) {\n  time_unit : \"" + time_unit + "\";\n  capacitive_load_unit (" + cap_unit +
         ");\n  cell(B) {\n    pin(A) { direction : input; capacitance : 2.0; }\n"
         "    pin(Y) { direction : output; function : \"A\";\n"
         "      timing() { related_pin : \"A\";\n"
         "        cell_rise(scalar) { values(\"3.0\"); }\n        cell_fall(scalar) { values(\"3.0\"); }\n"
         "        rise_transition(scalar) { values(\"1.0\"); }\n        fall_transition(scalar) { values(\"1.0\"); }\n"
         "      }\n    }\n  }\n}\n";
}

template <typename F>
ParseError expect_parse_error(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no ParseError";
  return ParseError("", 0, 0, "");
}

}  // namespace

TEST(Lines, CounterMatchesScan) {
  std::string text = "a\nbb\n\nccc\nd";
  LineCounter lines(text);
  for (std::size_t off : {0u, 3u, 5u, 9u, 1u, 11u, 6u, 100u}) EXPECT_EQ(lines(off), line_of(text, off)) << off;
}

TEST(Gzip, RoundTripAndPassThrough) {
  std::string text = "hello\nworld\n";
  std::string z = gzip_compress(text);
  EXPECT_TRUE(is_gzip(z));
  EXPECT_FALSE(is_gzip(text));
  EXPECT_EQ(maybe_gunzip(z), text);
  EXPECT_EQ(maybe_gunzip(text), text);
}

TEST(Gzip, TransparentForEveryFormat) {
  auto unz = [](const std::string& s) { return maybe_gunzip(gzip_compress(s)); };
  EXPECT_EQ(parse_spef(unz(kSpef)), parse_spef(kSpef));
  EXPECT_EQ(parse_sdf(unz(kSdf)), parse_sdf(kSdf));
  std::string v = "module m(a, y); input a; output y; BUF1 b(.A(a), .Y(y)); endmodule\n";
  EXPECT_EQ(parse_verilog(unz(v)), parse_verilog(v));
  std::string lib = lib_with_units("1ps", "1,ff");
  EXPECT_EQ(parse_liberty(unz(lib)), parse_liberty(lib));
}

TEST(Verilog, BusesAssignsAndConstants) {
  auto d = parse_verilog(R"(
module top(a, y, z);
  input [1:0] a;
  output [1:0] y;
  output z;
  wire w;
  assign w = a[0];
  BUF1 b0(.A(w), .Y(y[0]));
  AND2 g(.A(a[1]), .B(1'b1), .Y(y[1]));
  BUF1 b1(.A(1'b0), .Y(z));
endmodule
)");
  ASSERT_EQ(d.modules.size(), 1u);
  const VModule& m = d.modules[0];
  EXPECT_EQ(m.port_order, (std::vector<std::string>{"a", "y", "z"}));
  EXPECT_EQ(m.instances.size(), 3u);
  EXPECT_EQ(m.assigns.size(), 1u);
  auto nl = elaborate(d, test::toy_lib(), "top");
  EXPECT_NE(nl.find_pin("a[1]"), kInvalidId);
  EXPECT_NE(nl.find_pin("y[0]"), kInvalidId);
  EXPECT_EQ(nl.pin_net[nl.find_pin("a[0]")], nl.pin_net[nl.find_pin("b0/A")]);
  EXPECT_EQ(nl.const_pins.size(), 2u);
}

TEST(Verilog, RepeatedDeclarationsMerge) {
  auto d = parse_verilog("module m(y); output y; wire y; output [3:0] q; wire [3:0] q; endmodule\n");
  const VModule& m = d.modules[0];
  ASSERT_EQ(m.decls.size(), 2u);
  EXPECT_EQ(m.find_decl("y")->kind, NetKind::output);
  EXPECT_EQ(m.find_decl("q")->kind, NetKind::output);
  ASSERT_TRUE(m.find_decl("q")->range);
  EXPECT_THROW(parse_verilog("module m(q); output [3:0] q; output [1:0] q; endmodule\n"), ParseError);
}

TEST(Verilog, ChunkedEqualsSerial) {
  std::string text;
  for (int i = 0; i < 9; ++i)
    text += "module m" + std::to_string(i) + "(a, y); input a; output y; wire n;\n  BUF1 b(.A(a), .Y(n));\n  INV i(.A(n), .Y(y));\nendmodule\n\n";
  auto serial = parse_verilog(text);
  for (std::size_t n : {1u, 2u, 4u, 16u}) EXPECT_EQ(parse_verilog_chunked(text, n), serial) << n;
}

TEST(Verilog, ErrorsCarryLine) {
  std::string text = "module m(a);\n  input a;\n\n  BUF1 b(.A(a) .Y());\nendmodule\n";
  auto e = expect_parse_error([&] { parse_verilog(text, "x.v"); });
  EXPECT_EQ(e.line(), 4u);
  EXPECT_EQ(e.file(), "x.v");
}

TEST(Verilog, InstanceLinesAreCounted) {
  auto d = parse_verilog("module m(a, y);\ninput a;\noutput y;\nwire n;\nBUF1 b1(.A(a), .Y(n));\n\nBUF1 b2(.A(n), .Y(y));\nendmodule\n");
  ASSERT_EQ(d.modules[0].instances.size(), 2u);
  EXPECT_EQ(d.modules[0].line, 1u);
  EXPECT_EQ(d.modules[0].instances[0].line, 5u);
  EXPECT_EQ(d.modules[0].instances[1].line, 7u);
}

TEST(Spef, NameMapUnitsAndDivider) {
  auto s = parse_spef(kSpef);
  EXPECT_EQ(s.design, "top");
  ASSERT_EQ(s.nets.size(), 1u);
  const SpefNet& n = s.nets[0];
  EXPECT_EQ(n.name, "n1");
  EXPECT_NEAR(n.total_cap, 3.0, 1e-12);
  ASSERT_EQ(n.conns.size(), 2u);
  EXPECT_TRUE(n.conns[0].is_port);
  EXPECT_EQ(n.conns[1].name, "u/b1:A");
  ASSERT_EQ(n.caps.size(), 2u);
  EXPECT_NEAR(n.caps[0].value + n.caps[1].value, n.total_cap, 1e-9);
  EXPECT_NEAR(n.res[1].value, 0.25, 1e-12);
  EXPECT_EQ(n.line, 18u);
}

TEST(Spef, ChunkedEqualsSerial) {
  std::string text = kSpef;
  for (int i = 3; i < 20; ++i)
    text += "\n*D_NET n" + std::to_string(i) + " 1\n*CONN\n*P in I\n*CAP\n1 in 1\n*RES\n*END\n";
  auto serial = parse_spef(text);
  for (std::size_t n : {2u, 5u, 32u}) EXPECT_EQ(parse_spef_chunked(text, n), serial) << n;
}

TEST(Spef, ErrorsCarryLine) {
  std::string text = kSpef;
  text += "\n*D_NET n9 1\n*CONN\n*P in I\n*CAP\n1 in notanumber\n*END\n";
  auto e = expect_parse_error([&] { parse_spef(text); });
  EXPECT_EQ(e.line(), line_of(text, text.find("notanumber")));
}

TEST(Sdf, TimescaleAndTriples) {
  auto s = parse_sdf(kSdf);
  ASSERT_EQ(s.iopaths.size(), 1u);
  const SdfIopath& p = s.iopaths[0];
  EXPECT_EQ(p.instance, "b1");
  EXPECT_EQ(p.from_pin, "A");
  EXPECT_NEAR(*p.rise.min, 1.0, 1e-9);
  EXPECT_NEAR(*p.rise.max, 3.0, 1e-9);
  EXPECT_FALSE(p.fall.typ);
  EXPECT_NEAR(*p.fall.early(), 4.0, 1e-9);
  EXPECT_NEAR(*p.fall.late(), 6.0, 1e-9);
  ASSERT_EQ(s.interconnects.size(), 1u);
  EXPECT_EQ(s.interconnects[0].from, "b1/Y");
  EXPECT_NEAR(*s.interconnects[0].rise.late(), 500.0, 1e-9);
}

TEST(Sdf, FormatRoundTripIsIdempotent) {
  auto a = parse_sdf(kSdf);
  std::string once = format_sdf(a);
  auto b = parse_sdf(once);
  EXPECT_EQ(a, b);
  EXPECT_EQ(format_sdf(b), once);
}

TEST(Sdf, ChunkedEqualsSerial) {
  std::string text = "(DELAYFILE (SDFVERSION \"3.0\") (TIMESCALE 1ps)\n";
  for (int i = 0; i < 30; ++i)
    text += "  (CELL (CELLTYPE \"BUF1\") (INSTANCE b" + std::to_string(i) +
            ") (DELAY (ABSOLUTE (IOPATH A Y (" + std::to_string(i) + ") (1:2:3)))))\n";
  text += ")\n";
  auto serial = parse_sdf(text);
  ASSERT_EQ(serial.iopaths.size(), 30u);
  for (std::size_t n : {2u, 7u, 64u}) EXPECT_EQ(parse_sdf_chunked(text, n), serial) << n;
}

TEST(Sdf, MalformedFails) {
  EXPECT_THROW(parse_sdf("(DELAYFILE (CELL (CELLTYPE \"X\") (INSTANCE a) (DELAY (ABSOLUTE (IOPATH A Y (1:2"), ParseError);
}

TEST(Liberty, UnitScaling) {
  struct Case {
    const char* time;
    const char* cap;
    double ps, ff;
  };
  for (const Case& c : {Case{"1ps", "1,ff", 1, 1}, Case{"1ns", "1,pf", 1000, 1000}, Case{"10ps", "10,ff", 10, 10},
                        Case{"100ps", "1,ff", 100, 1}}) {
    auto lib = parse_liberty(lib_with_units(c.time, c.cap));
    const LibertyCell* b = lib.find_cell("B");
    ASSERT_NE(b, nullptr);
    EXPECT_NEAR(b->arcs[0].cell_rise->values[0], 3.0 * c.ps, 1e-9) << c.time;
    EXPECT_NEAR(b->pins[*b->find_pin("A")].capacitance, 2.0 * c.ff, 1e-9) << c.cap;
  }
  EXPECT_DOUBLE_EQ(liberty_time_unit_ps("1us"), 1e6);
  EXPECT_DOUBLE_EQ(liberty_cap_unit_ff(1, "pf"), 1000);
}

TEST(Liberty, ToyLibraryContents) {
  auto lib = test::toy_lib();
  const LibertyCell* dff = lib.find_cell("DFF");
  ASSERT_NE(dff, nullptr);
  int checks = 0, cq = 0;
  for (const auto& a : dff->arcs) {
    checks += is_check(a.kind);
    cq += is_clock_to_q(a.kind);
  }
  EXPECT_EQ(checks, 2);
  EXPECT_EQ(cq, 1);
  const LibertyCell* inv = lib.find_cell("INV");
  EXPECT_EQ(inv->arcs[0].sense, TimingSense::negative_unate);
}

TEST(Liberty, ErrorsCarryLine) {
  std::string text = "library(x) {\n  time_unit : \"1ps\";\n  cell(A) {\n    pin(Y) { direction : output \n  }\n}\n";
  EXPECT_THROW(parse_liberty(text), ParseError);
}
