#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "support/design_gen.hpp"
#include "support/fixtures.hpp"

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

CliRun cli(const std::filesystem::path& dir, const std::string& args) {
  auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  std::string cmd = std::string(MINISTRA_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  int st = std::system(cmd.c_str());
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, slurp(out), slurp(err)};
}

std::filesystem::path write_design(const test::GenDesign& g, const std::string& name) {
  auto dir = test::scratch_dir(name);
  std::ofstream(dir / "d.lib") << g.liberty;
  std::ofstream(dir / "d.v") << g.verilog;
  std::ofstream(dir / "d.sdc") << g.sdc;
  std::ofstream(dir / "d.spef") << g.spef;
  return dir;
}

std::string inputs(const std::filesystem::path& d) {
  return "--lib " + (d / "d.lib").string() + " --verilog " + (d / "d.v").string() + " --top top --sdc " +
         (d / "d.sdc").string() + " --spef " + (d / "d.spef").string();
}

}  // namespace

TEST(Cli, ExitCodes) {
  auto d = write_design(test::generate_design(2), "cli_codes");
  EXPECT_EQ(cli(d, inputs(d) + " --report-timing -k 3").code, 0);
  EXPECT_EQ(cli(d, inputs(d) + " --no-such-flag").code, 1);
  EXPECT_EQ(cli(d, inputs(d) + " --report-timing -k 0").code, 1);
  std::ofstream(d / "bad.v") << "module top(a; endmodule\n";
  CliRun parse = cli(d, "--lib " + (d / "d.lib").string() + " --verilog " + (d / "bad.v").string() + " --sdc " +
                         (d / "d.sdc").string());
  EXPECT_EQ(parse.code, 2);
  EXPECT_NE(parse.err.find("ERROR 2"), std::string::npos) << parse.err;
  std::ofstream(d / "two.v") << "module a(x); input x; endmodule\nmodule b(y); input y; endmodule\n";
  CliRun sem = cli(d, "--lib " + (d / "d.lib").string() + " --verilog " + (d / "two.v").string());
  EXPECT_EQ(sem.code, 3);
  EXPECT_NE(sem.err.find("ERROR 3"), std::string::npos) << sem.err;
  EXPECT_EQ(cli(d, inputs(d) + " --sdf-in " + (d / "missing.sdf").string()).code, 2);
}

TEST(Cli, OutputsAreDeterministicAcrossThreadCounts) {
  auto d = write_design(test::generate_design(11), "cli_det");
  std::string first;
  for (int t : {1, 2, 4}) {
    auto sdf = d / ("out" + std::to_string(t) + ".sdf"), csv = d / ("out" + std::to_string(t) + ".csv");
    CliRun r = cli(d, inputs(d) + " --threads " + std::to_string(t) + " --report-timing -k 20 --write-sdf " +
                       sdf.string() + " --slack-csv " + csv.string());
    ASSERT_EQ(r.code, 0) << r.err;
    std::string all = r.out + slurp(sdf) + slurp(csv);
    if (first.empty())
      first = all;
    else
      EXPECT_EQ(all, first) << t;
  }
}

TEST(Cli, SdfRoundTripReproducesSlacks) {
  auto d = write_design(test::generate_design(5), "cli_sdf");
  auto sdf = d / "d.sdf";
  CliRun a = cli(d, inputs(d) + " --write-sdf " + sdf.string() + " --slack-csv " + (d / "a.csv").string());
  ASSERT_EQ(a.code, 0) << a.err;
  CliRun b = cli(d, inputs(d) + " --model arnoldi --sdf-in " + sdf.string() + " --slack-csv " + (d / "b.csv").string());
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(slurp(d / "a.csv"), slurp(d / "b.csv"));
}
