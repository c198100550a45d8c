#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ministra/report.hpp"
#include "support/design_gen.hpp"
#include "support/fixtures.hpp"

using namespace ministra;

namespace {

PathQuery worst(std::size_t k) {
  PathQuery q;
  q.k = k;
  q.nworst = 1;
  return q;
}

}  // namespace

TEST(Report, FormatPs) {
  EXPECT_EQ(format_ps(1.23456), "1.235");
  EXPECT_EQ(format_ps(-0.0001), "0.000");
  EXPECT_EQ(format_ps(kInf), "inf");
  EXPECT_EQ(format_ps(-kInf), "-inf");
}

TEST(Report, ArraysRoundTrip) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto d = test::build_design(test::generate_design(seed));
    PathSet ps = report_paths(d.state, d.graph, d.netlist, d.lib, d.arcs, worst(10));
    TimingArrays a = collect_arrays(d.state, &ps);
    ASSERT_EQ(a.pin_slack_setup.size(), d.netlist.num_pins());
    auto dir = test::scratch_dir("arrays" + std::to_string(seed));
    write_arrays(dir.string(), a);
    EXPECT_EQ(read_arrays(dir.string()), a) << seed;
  }
}

TEST(Report, ArraysVersionMismatchFails) {
  auto d = test::build_design(test::generate_design(1));
  auto dir = test::scratch_dir("arrays_version");
  write_arrays(dir.string(), collect_arrays(d.state));
  std::ifstream in(dir / "manifest.json");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string m = buf.str();
  auto at = m.find("\"version\": ");
  ASSERT_NE(at, std::string::npos);
  m.insert(at + 11, "9");
  std::ofstream(dir / "manifest.json") << m;
  EXPECT_THROW(read_arrays(dir.string()), Error);
}

TEST(Report, SlackCsvHasOneRowPerEndpoint) {
  auto d = test::build_design(test::generate_design(4));
  std::string csv = slack_csv(d.state, d.netlist);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "endpoint,setup_slack,hold_slack");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto& ep = d.state.endpoints[rows];
    EXPECT_EQ(line, d.netlist.pin_names[ep.pin] + "," + format_ps(d.state.setup_slack[rows]) + "," +
                        format_ps(d.state.hold_slack[rows]));
    ++rows;
  }
  EXPECT_EQ(rows, d.state.endpoints.size());
}

TEST(Report, SummaryTotals) {
  auto d = test::build_design(test::generate_design(7));
  std::string s = timing_summary(d.state);
  WnsTns w = wns_tns(d.state, CheckMode::setup);
  EXPECT_NE(s.find("(all)"), std::string::npos);
  EXPECT_NE(s.find(format_ps(w.wns)), std::string::npos);
  EXPECT_NE(s.find("endpoints " + std::to_string(d.state.endpoints.size())), std::string::npos) << s;
}

TEST(Report, SdfOverrideMakesDelayModelIrrelevant) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    auto gen = test::generate_design(seed);
    auto base = test::build_design(gen);
    SdfData sdf = parse_sdf(write_sdf(base.arcs, base.graph, base.netlist, base.lib));
    DelayConfig elmore, arnoldi;
    arnoldi.model = DelayModel::arnoldi;
    auto a = test::build_design(gen, elmore, &sdf);
    auto b = test::build_design(gen, arnoldi, &sdf);
    EXPECT_EQ(a.state.setup_slack, b.state.setup_slack) << seed;
    EXPECT_EQ(a.state.hold_slack, b.state.hold_slack) << seed;
    EXPECT_EQ(a.state.setup_slack, base.state.setup_slack) << seed;
  }
}
