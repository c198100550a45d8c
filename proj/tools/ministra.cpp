#include <CLI11.hpp>
#include <iostream>

#include "ministra/pipeline.hpp"

using namespace ministra;

namespace {

DelayConfig parse_model(const std::string& s) {
  DelayConfig d;
  if (s == "elmore") return d;
  if (s.rfind("arnoldi", 0) != 0) throw std::invalid_argument("--model must be elmore or arnoldi[:q]");
  d.model = DelayModel::arnoldi;
  if (s.size() > 7) {
    if (s[7] != ':') throw std::invalid_argument("--model must be elmore or arnoldi[:q]");
    int q = std::stoi(s.substr(8));
    if (q < 1) throw std::invalid_argument("arnoldi order must be at least 1");
    d.order = static_cast<std::size_t>(q);
  }
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ministra: static timing analysis"};
  RunConfig cfg;
  std::string model = "elmore";
  double slack_lt = 0;
  bool want_min = false, want_max = false;
  std::size_t k = 1, nworst = 1;

  app.add_option("--lib", cfg.liberty, "Liberty file(s), optionally gzipped")->expected(1, -1);
  app.add_option("--verilog", cfg.verilog, "gate-level Verilog netlist");
  app.add_option("--top", cfg.top, "top module");
  app.add_option("--netlist-bundle", cfg.netlist_bundle, "flat netlist bundle directory");
  app.add_option("--spef", cfg.spef, "SPEF parasitics");
  app.add_option("--rc-bundle", cfg.rc_bundle, "flat RC bundle directory");
  app.add_option("--steiner", cfg.steiner_positions, "pin position file for Steiner RC estimation");
  app.add_option("--unit-res-x", cfg.steiner.unit_res_x, "kOhm per unit length, horizontal");
  app.add_option("--unit-res-y", cfg.steiner.unit_res_y, "kOhm per unit length, vertical");
  app.add_option("--unit-cap-x", cfg.steiner.unit_cap_x, "fF per unit length, horizontal");
  app.add_option("--unit-cap-y", cfg.steiner.unit_cap_y, "fF per unit length, vertical");
  app.add_option("--sdc", cfg.sdc, "SDC constraints");
  app.add_option("--sdf-in", cfg.sdf_in, "SDF delays replacing computed ones");
  app.add_option("--model", model, "elmore or arnoldi[:q]");
  app.add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
  app.add_option("--write-sdf", cfg.write_sdf, "write computed delays as SDF");
  app.add_flag("--report-timing", cfg.report_timing, "report worst paths");
  app.add_option("-k", k, "paths to report");
  app.add_option("--nworst", nworst, "paths per endpoint");
  auto* lt_opt = app.add_option("--slack-lt", slack_lt, "only paths with slack below this (ps)");
  app.add_flag("--min", want_min, "hold paths");
  app.add_flag("--max", want_max, "setup paths (default)");
  app.add_option("--slack-csv", cfg.slack_csv, "write endpoint slacks as CSV");
  app.add_option("--export-arrays", cfg.export_arrays, "write flat result arrays to a directory");

  try {
    app.parse(argc, argv);
    cfg.delay = parse_model(model);
    if (want_min && want_max) throw std::invalid_argument("give --min or --max, not both");
    if (k < 1 || nworst < 1) throw std::invalid_argument("-k and --nworst must be at least 1");
    cfg.query.k = k;
    cfg.query.nworst = nworst;
    if (lt_opt->count()) cfg.query.slack_lt = slack_lt;
    cfg.query.mode = want_min ? CheckMode::hold : CheckMode::setup;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "ERROR 1: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "ERROR 1: " << e.what() << "\n";
    return 1;
  }
  return run(cfg, std::cout, std::cerr);
}
