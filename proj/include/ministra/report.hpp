#pragma once

#include <string>
#include <vector>

#include "ministra/paths.hpp"
#include "ministra/sdf.hpp"
#include "ministra/timing.hpp"

namespace ministra {

/// IOPATHs per enabled cell delay arc in edge order and INTERCONNECTs per enabled net arc, each
/// written as (early::late).
SdfData make_sdf(const ArcTiming& arcs, const TimingGraph& graph, const FlatNetlist& netlist,
                 const LibertyLibrary& lib);
std::string write_sdf(const ArcTiming& arcs, const TimingGraph& graph, const FlatNetlist& netlist,
                      const LibertyLibrary& lib);

/// Flat result arrays, indexed by pin or endpoint; +inf marks unconstrained entries.
struct TimingArrays {
  std::vector<double> pin_slack_setup;
  std::vector<double> pin_slack_hold;
  std::vector<double> pin_arrival_late;  // worst over tags and edges; -inf when unreached
  std::vector<double> pin_arrival_early;
  std::vector<std::uint32_t> endpoint_pin;
  std::vector<double> endpoint_setup_slack;
  std::vector<double> endpoint_hold_slack;
  PathSet paths;
  friend bool operator==(const TimingArrays&, const TimingArrays&) = default;
};

TimingArrays collect_arrays(const TimingState& state, const PathSet* paths = nullptr);
void write_arrays(const std::string& dir, const TimingArrays& arrays);
TimingArrays read_arrays(const std::string& dir);

/// `endpoint,setup_slack,hold_slack` with one row per endpoint.
std::string slack_csv(const TimingState& state, const FlatNetlist& netlist);

/// WNS/TNS per capture clock and overall, setup and hold.
std::string timing_summary(const TimingState& state);

std::string format_ps(double v);

}  // namespace ministra
