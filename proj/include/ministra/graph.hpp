#pragma once

#include <vector>

#include "ministra/liberty.hpp"
#include "ministra/netlist.hpp"
#include "ministra/sdc.hpp"

namespace ministra {

enum class EdgeKind : std::uint8_t { net_arc, cell_delay_arc, cell_check_arc };

/// Nodes are pins. Net arcs come first (net order, then sink order), then cell arcs (cell order,
/// then Liberty arc order). Fanin/fanout lists are sorted by edge id.
struct TimingGraph {
  std::size_t num_nodes = 0;
  std::vector<PinId> edge_from;
  std::vector<PinId> edge_to;
  std::vector<EdgeKind> edge_kind;
  std::vector<std::uint32_t> edge_arc;  // index into LibertyCell::arcs; kInvalidId for net arcs
  std::vector<std::uint8_t> disabled;

  std::vector<std::uint32_t> fanout_offsets;
  std::vector<EdgeId> fanout_edges;
  std::vector<std::uint32_t> fanin_offsets;
  std::vector<EdgeId> fanin_edges;

  std::vector<std::uint32_t> level;  // per node
  std::vector<std::uint32_t> level_offsets;
  std::vector<PinId> level_nodes;  // nodes grouped by level, ascending id within a level

  std::size_t num_edges() const { return edge_from.size(); }
  std::size_t num_levels() const { return level_offsets.empty() ? 0 : level_offsets.size() - 1; }
  bool enabled(EdgeId e) const { return !disabled[e]; }
  bool propagates(EdgeId e) const { return !disabled[e] && edge_kind[e] != EdgeKind::cell_check_arc; }

  const TimingArc* arc(EdgeId e, const FlatNetlist& n, const LibertyLibrary& lib) const {
    if (edge_arc[e] == kInvalidId) return nullptr;
    return &lib.cells[n.cell_lib[n.pin_cell[edge_from[e]]]].arcs[edge_arc[e]];
  }
};

/// Builds edges and applies set_disable_timing. Call apply_case_analysis and levelize next.
TimingGraph build_graph(const FlatNetlist& netlist, const LibertyLibrary& lib, const Constraints& constraints);

/// Kahn levels over enabled non-check edges. Combinational cycles are broken by disabling the
/// smallest enabled edge id inside each strongly connected component, then re-levelizing.
/// Returns the number of edges disabled to break cycles.
std::size_t levelize(TimingGraph& graph, const FlatNetlist* netlist = nullptr);

}  // namespace ministra
