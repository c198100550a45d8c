#include <gtest/gtest.h>

#include <algorithm>

#include "ministra/graph.hpp"
#include "ministra/netlist.hpp"
#include "support/design_gen.hpp"
#include "support/fixtures.hpp"

using namespace ministra;

namespace {

const char* kFlat = R"(
module top(a, b, y);
  input a, b;
  output y;
  wire n1, n2;
  BUF1 u1(.A(a), .Y(n1));
  INV u2(.A(b), .Y(n2));
  AND2 u3(.A(n1), .B(n2), .Y(y));
endmodule
)";

const char* kWrapped = R"(
module pair(i, j, o1, o2);
  input i, j;
  output o1, o2;
  BUF1 u1(.A(i), .Y(o1));
  INV u2(.A(j), .Y(o2));
endmodule
module top(a, b, y);
  input a, b;
  output y;
  wire n1, n2;
  pair w(.i(a), .j(b), .o1(n1), .o2(n2));
  AND2 u3(.A(n1), .B(n2), .Y(y));
endmodule
)";

std::string strip(std::string name) {
  auto p = name.find("w/");
  if (p == 0) name.erase(0, 2);
  return name;
}

}  // namespace

TEST(Netlist, ArraysRoundTrip) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto gen = test::generate_design(seed);
    auto lib = parse_liberty(gen.liberty);
    auto nl = elaborate(parse_verilog(gen.verilog), lib, "top");
    EXPECT_EQ(ingest_flat(export_netlist_arrays(nl), lib), nl) << seed;
  }
}

TEST(Netlist, BundleRoundTrip) {
  auto lib = test::toy_lib();
  auto nl = elaborate(parse_verilog(kFlat), lib);
  auto dir = test::scratch_dir("bundle");
  write_netlist_bundle(dir.string(), nl);
  EXPECT_EQ(ingest_flat(read_netlist_bundle(dir.string()), lib), nl);
}

TEST(Netlist, HierarchyFlatteningIsInvariant) {
  auto lib = test::toy_lib();
  auto flat = elaborate(parse_verilog(kFlat), lib);
  auto wrapped = elaborate(parse_verilog(kWrapped), lib, "top");
  ASSERT_EQ(flat.num_cells(), wrapped.num_cells());
  ASSERT_EQ(flat.num_pins(), wrapped.num_pins());
  ASSERT_EQ(flat.num_nets(), wrapped.num_nets());
  // Same cells and connectivity once the wrapper prefix is dropped.
  for (PinId p = 0; p < flat.num_pins(); ++p) {
    PinId q = wrapped.find_pin(flat.pin_names[p]);
    if (q == kInvalidId) q = wrapped.find_pin("w/" + flat.pin_names[p]);
    ASSERT_NE(q, kInvalidId) << flat.pin_names[p];
    EXPECT_EQ(flat.pin_dir[p], wrapped.pin_dir[q]);
    std::vector<std::string> a, b;
    for (auto k = flat.net_pin_offsets[flat.pin_net[p]]; k < flat.net_pin_offsets[flat.pin_net[p] + 1]; ++k)
      a.push_back(flat.pin_names[flat.net_pins[k]]);
    for (auto k = wrapped.net_pin_offsets[wrapped.pin_net[q]]; k < wrapped.net_pin_offsets[wrapped.pin_net[q] + 1]; ++k)
      b.push_back(strip(wrapped.pin_names[wrapped.net_pins[k]]));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b) << flat.pin_names[p];
  }
  EXPECT_NE(wrapped.find_pin("w/u1/A"), kInvalidId);
}

TEST(Netlist, ElaborationIsDeterministic) {
  auto gen = test::generate_design(42);
  auto lib = parse_liberty(gen.liberty);
  auto v = parse_verilog(gen.verilog);
  EXPECT_EQ(export_netlist_arrays(elaborate(v, lib, "top")).pin_net, export_netlist_arrays(elaborate(v, lib, "top")).pin_net);
  EXPECT_EQ(elaborate(v, lib, "top"), elaborate(v, lib, "top"));
}

TEST(Netlist, SemanticErrors) {
  auto lib = test::toy_lib();
  auto elab = [&](const std::string& v, const std::string& top = "") { return elaborate(parse_verilog(v), lib, top); };
  EXPECT_THROW(elab("module t(a); input a; NOPE u(.A(a)); endmodule\n"), SemanticError);
  EXPECT_THROW(elab("module t(a, y); input a; output y; BUF1 u(.A(a), .Q(y)); endmodule\n"), SemanticError);
  EXPECT_THROW(elab("module t(a, y); input a; output y; BUF1 u1(.A(a), .Y(y)); BUF1 u2(.A(a), .Y(y)); endmodule\n"),
               SemanticError);
  EXPECT_THROW(elab("module t(a); input a; endmodule\nmodule u(b); input b; endmodule\n"), SemanticError);
  EXPECT_NO_THROW(elab("module t(a); input a; endmodule\nmodule u(b); input b; endmodule\n", "u"));
  EXPECT_THROW(elab("module t(a); input a; t x(.a(a)); endmodule\n", "t"), SemanticError);
}

TEST(Netlist, AssignMergesNets) {
  auto lib = test::toy_lib();
  auto nl = elaborate(parse_verilog("module t(a, y); input a; output y; wire w; assign w = a; BUF1 u(.A(w), .Y(y)); endmodule\n"),
                      lib);
  EXPECT_EQ(nl.pin_net[nl.find_pin("a")], nl.pin_net[nl.find_pin("u/A")]);
  EXPECT_EQ(nl.net_driver[nl.pin_net[nl.find_pin("u/A")]], nl.find_pin("a"));
}

TEST(Graph, LevelsIncreaseAlongEdges) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto gen = test::generate_design(seed);
    auto d = test::build_design(gen);
    const TimingGraph& g = d.graph;
    EXPECT_LE(g.num_levels(), g.num_nodes);
    for (EdgeId e = 0; e < g.num_edges(); ++e)
      if (g.propagates(e)) EXPECT_LT(g.level[g.edge_from[e]], g.level[g.edge_to[e]]) << seed << " edge " << e;
  }
}

TEST(Graph, CombinationalLoopIsBrokenAtSmallestEdge) {
  auto lib = test::toy_lib();
  auto nl = elaborate(
      parse_verilog("module t(a, y); input a; output y; wire n1, n2; AND2 g(.A(a), .B(n2), .Y(n1)); BUF1 b(.A(n1), .Y(n2));\n"
                    "BUF1 o(.A(n1), .Y(y)); endmodule\n"),
      lib);
  Constraints none;
  auto g = build_graph(nl, lib, none);
  EXPECT_EQ(levelize(g, &nl), 1u);
  std::size_t disabled = 0;
  EdgeId first = kInvalidId;
  for (EdgeId e = 0; e < g.num_edges(); ++e)
    if (g.disabled[e]) {
      ++disabled;
      if (first == kInvalidId) first = e;
    }
  EXPECT_EQ(disabled, 1u);
  for (EdgeId e = 0; e < g.num_edges(); ++e)
    if (g.propagates(e)) EXPECT_LT(g.level[g.edge_from[e]], g.level[g.edge_to[e]]);
}
