#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ministra/case_analysis.hpp"
#include "ministra/paths.hpp"
#include "ministra/report.hpp"

namespace ministra {

struct RunConfig {
  std::vector<std::string> liberty;
  std::string verilog;
  std::string top;
  std::string netlist_bundle;
  std::string spef;
  std::string rc_bundle;
  std::string steiner_positions;
  SteinerConfig steiner;
  std::string sdc;
  std::string sdf_in;
  DelayConfig delay;
  std::size_t threads = 0;
  std::string write_sdf;
  bool report_timing = false;
  PathQuery query;
  std::string slack_csv;
  std::string export_arrays;
};

struct PhaseTimes {
  double parse = 0, graph = 0, delay = 0, propagate = 0, report = 0;  // seconds
};

/// Everything one analysis produces, kept together so callers can query any stage.
struct Design {
  LibertyLibrary lib;
  FlatNetlist netlist;
  Constraints constraints;
  TimingGraph graph;
  CaseResult case_result;
  RcStore rc;
  std::optional<SdfData> sdf_in;
  ArcTiming arcs;
  TimingState state;
  PhaseTimes times;
  // Names of the verilog/bundle input, for messages.
  std::string source;
};

/// Graph, case analysis, levels, delays and timing for an already loaded design.
void analyze_design(Design& d, const DelayConfig& delay, const TimingOptions& options = {});

/// Builds a design from in-memory parts (used by tests and embedders).
Design make_design(LibertyLibrary lib, FlatNetlist netlist, std::string_view sdc, RcStore rc,
                   const DelayConfig& delay = {}, const SdfData* sdf_in = nullptr);

Design load_design(const RunConfig& config);

/// Runs the CLI pipeline. Returns the process exit code; errors print `ERROR <code>: ...` to err.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace ministra
