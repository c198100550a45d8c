#include "ministra/case_analysis.hpp"

#include <fmt/format.h>

#include <deque>

#include "ministra/log.hpp"

namespace ministra {

CaseResult apply_case_analysis(TimingGraph& g, const FlatNetlist& n, const LibertyLibrary& lib,
                               const Constraints& c) {
  CaseResult r;
  r.value.assign(n.num_pins(), Logic::unknown);
  std::deque<PinId> work;
  auto assign = [&](PinId p, Logic v, const char* why) {
    if (r.value[p] == v) return;
    if (r.value[p] != Logic::unknown)
      throw SemanticError(fmt::format("contradictory constants on pin '{}' ({})", n.pin_names[p], why));
    r.value[p] = v;
    work.push_back(p);
  };
  for (std::size_t i = 0; i < n.const_pins.size(); ++i)
    assign(n.const_pins[i], n.const_vals[i] ? Logic::one : Logic::zero, "constant tie");
  for (const auto& cv : c.case_values) assign(cv.pin, cv.value ? Logic::one : Logic::zero, "set_case_analysis");
  if (work.empty()) return r;

  auto lookup_for = [&](CellId cell) {
    const LibertyCell& lc = lib.cells[n.cell_lib[cell]];
    return [&, cell, &lc = lc](std::string_view name) -> Logic {
      auto idx = lc.find_pin(name);
      if (!idx) return Logic::unknown;  // state variables
      for (auto k = n.cell_pin_offsets[cell]; k < n.cell_pin_offsets[cell + 1]; ++k)
        if (n.pin_lib_pin[n.cell_pins[k]] == *idx) return r.value[n.cell_pins[k]];
      return Logic::unknown;
    };
  };

  while (!work.empty()) {
    PinId p = work.front();
    work.pop_front();
    if (n.is_driver(p) && n.pin_net[p] != kInvalidId) {
      NetId net = n.pin_net[p];
      for (auto k = n.net_pin_offsets[net]; k < n.net_pin_offsets[net + 1]; ++k)
        if (n.net_pins[k] != p) assign(n.net_pins[k], r.value[p], "propagated constant");
    }
    if (n.is_port(p) || n.is_driver(p)) continue;
    CellId cell = n.pin_cell[p];
    const LibertyCell& lc = lib.cells[n.cell_lib[cell]];
    auto lookup = lookup_for(cell);
    for (auto k = n.cell_pin_offsets[cell]; k < n.cell_pin_offsets[cell + 1]; ++k) {
      PinId q = n.cell_pins[k];
      const LibertyPin& lp = lc.pins[n.pin_lib_pin[q]];
      if (!n.is_driver(q) || !lp.function || lc.is_sequential) continue;
      Logic v = lp.function->eval(lookup);
      if (v != Logic::unknown) assign(q, v, "pin function");
    }
  }

  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (g.disabled[e]) continue;
    bool off = r.value[g.edge_from[e]] != Logic::unknown || r.value[g.edge_to[e]] != Logic::unknown;
    if (!off && g.edge_kind[e] != EdgeKind::net_arc) {
      const TimingArc* arc = g.arc(e, n, lib);
      if (arc->when) off = arc->when->eval(lookup_for(n.pin_cell[g.edge_from[e]])) == Logic::zero;
    }
    if (off) {
      g.disabled[e] = 1;
      ++r.disabled;
    }
  }
  log::debug("case analysis: {} edges disabled", r.disabled);
  return r;
}

}  // namespace ministra
