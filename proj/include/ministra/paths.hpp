#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ministra/timing.hpp"

namespace ministra {

struct PathQuery {
  std::size_t k = 1;  // 0 = unlimited
  std::size_t nworst = 1;  // 0 = unlimited
  std::optional<double> slack_lt;
  CheckMode mode = CheckMode::setup;
  std::optional<NodeSet> from;  // startpoint pins, cells (their clock pins) or launch clocks
  std::optional<NodeSet> to;    // endpoint pins, cells (their data pins) or capture clocks
};

/// Paths in CSR form: path i owns pin slots [offsets[i], offsets[i + 1]).
struct PathSet {
  std::vector<std::uint32_t> offsets{0};
  std::vector<PinId> pins;
  std::vector<double> arrival;
  std::vector<double> incr;
  std::vector<std::uint8_t> edge;  // 0 rise, 1 fall

  std::vector<double> slack;
  std::vector<double> required;
  std::vector<PinId> endpoint;
  std::vector<ClockEvent> launch;
  std::vector<ClockEvent> capture;
  CheckMode mode = CheckMode::setup;

  std::size_t size() const { return slack.size(); }
  std::size_t length(std::size_t i) const { return offsets[i + 1] - offsets[i]; }
  friend bool operator==(const PathSet&, const PathSet&) = default;
};

/// k worst paths, ascending slack; ties by endpoint pin, pin sequence, launch, capture. Each path
/// is a distinct (launch event, pin sequence, capture event); its slack takes the worst edge
/// combination along the sequence.
PathSet report_paths(const TimingState& state, const TimingGraph& graph, const FlatNetlist& netlist,
                     const LibertyLibrary& lib, const ArcTiming& arcs, const PathQuery& query);

std::string format_path_text(const PathSet& paths, std::size_t i, const FlatNetlist& netlist,
                             const TimingState& state);
std::string format_paths_text(const PathSet& paths, const FlatNetlist& netlist, const TimingState& state);

}  // namespace ministra
