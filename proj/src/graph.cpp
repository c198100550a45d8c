#include "ministra/graph.hpp"

#include <algorithm>

#include "ministra/log.hpp"
#include "ministra/parallel.hpp"

namespace ministra {
namespace {

void build_csr(std::size_t nodes, const std::vector<PinId>& key, std::vector<std::uint32_t>& offsets,
               std::vector<EdgeId>& items) {
  offsets.assign(nodes + 1, 0);
  for (PinId k : key) ++offsets[k + 1];
  for (std::size_t i = 0; i < nodes; ++i) offsets[i + 1] += offsets[i];
  items.assign(key.size(), 0);
  std::vector<std::uint32_t> fill(offsets.begin(), offsets.end() - 1);
  for (EdgeId e = 0; e < key.size(); ++e) items[fill[key[e]]++] = e;
}

}  // namespace

TimingGraph build_graph(const FlatNetlist& n, const LibertyLibrary& lib, const Constraints& c) {
  TimingGraph g;
  g.num_nodes = n.num_pins();
  auto add = [&](PinId from, PinId to, EdgeKind k, std::uint32_t arc) {
    g.edge_from.push_back(from);
    g.edge_to.push_back(to);
    g.edge_kind.push_back(k);
    g.edge_arc.push_back(arc);
  };
  std::size_t undriven = 0;
  for (NetId net = 0; net < n.num_nets(); ++net) {
    PinId drv = n.net_driver[net];
    if (drv == kInvalidId) {
      ++undriven;
      continue;
    }
    for (auto k = n.net_pin_offsets[net]; k < n.net_pin_offsets[net + 1]; ++k) {
      PinId p = n.net_pins[k];
      if (p == drv) continue;
      const bool sink = n.is_port(p) ? n.pin_dir[p] != PinDirection::input
                                     : n.pin_dir[p] == PinDirection::input || n.pin_dir[p] == PinDirection::inout;
      if (sink) add(drv, p, EdgeKind::net_arc, kInvalidId);
    }
  }
  std::size_t unconnected = 0;
  std::vector<PinId> lib_pin;
  for (CellId cell = 0; cell < n.num_cells(); ++cell) {
    const LibertyCell& lc = lib.cells[n.cell_lib[cell]];
    lib_pin.assign(lc.pins.size(), kInvalidId);
    for (auto k = n.cell_pin_offsets[cell]; k < n.cell_pin_offsets[cell + 1]; ++k)
      lib_pin[n.pin_lib_pin[n.cell_pins[k]]] = n.cell_pins[k];
    for (std::uint32_t a = 0; a < lc.arcs.size(); ++a) {
      const TimingArc& arc = lc.arcs[a];
      PinId from = lib_pin[arc.from_pin], to = lib_pin[arc.to_pin];
      if (from == kInvalidId || to == kInvalidId || n.pin_net[from] == kInvalidId || n.pin_net[to] == kInvalidId) {
        ++unconnected;
        continue;
      }
      add(from, to, is_check(arc.kind) ? EdgeKind::cell_check_arc : EdgeKind::cell_delay_arc, a);
    }
  }
  if (undriven) log::debug("graph: {} undriven nets", undriven);
  if (unconnected) log::debug("graph: {} cell arcs skipped on unconnected pins", unconnected);
  g.disabled.assign(g.num_edges(), 0);

  build_csr(g.num_nodes, g.edge_from, g.fanout_offsets, g.fanout_edges);
  build_csr(g.num_nodes, g.edge_to, g.fanin_offsets, g.fanin_edges);

  for (const auto& d : c.disables) {
    if (d.pin != kInvalidId) {
      for (auto k = g.fanout_offsets[d.pin]; k < g.fanout_offsets[d.pin + 1]; ++k)
        if (g.edge_kind[g.fanout_edges[k]] != EdgeKind::net_arc) g.disabled[g.fanout_edges[k]] = 1;
      for (auto k = g.fanin_offsets[d.pin]; k < g.fanin_offsets[d.pin + 1]; ++k)
        if (g.edge_kind[g.fanin_edges[k]] != EdgeKind::net_arc) g.disabled[g.fanin_edges[k]] = 1;
      if (n.is_port(d.pin)) {
        for (auto k = g.fanout_offsets[d.pin]; k < g.fanout_offsets[d.pin + 1]; ++k) g.disabled[g.fanout_edges[k]] = 1;
        for (auto k = g.fanin_offsets[d.pin]; k < g.fanin_offsets[d.pin + 1]; ++k) g.disabled[g.fanin_edges[k]] = 1;
      }
      continue;
    }
    const LibertyCell& lc = lib.cells[n.cell_lib[d.cell]];
    for (auto k = n.cell_pin_offsets[d.cell]; k < n.cell_pin_offsets[d.cell + 1]; ++k) {
      PinId p = n.cell_pins[k];
      for (auto j = g.fanout_offsets[p]; j < g.fanout_offsets[p + 1]; ++j) {
        EdgeId e = g.fanout_edges[j];
        if (g.edge_kind[e] == EdgeKind::net_arc) continue;
        const TimingArc& arc = lc.arcs[g.edge_arc[e]];
        if (!d.from.empty() && lc.pins[arc.from_pin].name != d.from) continue;
        if (!d.to.empty() && lc.pins[arc.to_pin].name != d.to) continue;
        g.disabled[e] = 1;
      }
    }
  }
  return g;
}

namespace {

// Iterative Tarjan over enabled propagating edges restricted to `alive` nodes.
std::vector<std::uint32_t> scc_ids(const TimingGraph& g, const std::vector<std::uint8_t>& alive, std::uint32_t& count) {
  const std::size_t nn = g.num_nodes;
  std::vector<std::uint32_t> index(nn, kInvalidId), low(nn, 0), comp(nn, kInvalidId);
  std::vector<PinId> stack;
  std::vector<std::uint8_t> on_stack(nn, 0);
  std::vector<std::pair<PinId, std::uint32_t>> call;
  std::uint32_t next = 0;
  count = 0;
  for (PinId root = 0; root < nn; ++root) {
    if (!alive[root] || index[root] != kInvalidId) continue;
    call.push_back({root, g.fanout_offsets[root]});
    index[root] = low[root] = next++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, it] = call.back();
      if (it < g.fanout_offsets[v + 1]) {
        EdgeId e = g.fanout_edges[it++];
        if (!g.propagates(e)) continue;
        PinId w = g.edge_to[e];
        if (!alive[w]) continue;
        if (index[w] == kInvalidId) {
          index[w] = low[w] = next++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, g.fanout_offsets[w]});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      PinId done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        for (;;) {
          PinId w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = count;
          if (w == done) break;
        }
        ++count;
      }
    }
  }
  return comp;
}

}  // namespace

std::size_t levelize(TimingGraph& g, const FlatNetlist* netlist) {
  const std::size_t nn = g.num_nodes;
  std::size_t broken = 0;
  for (;;) {
    std::vector<std::uint32_t> indeg(nn, 0);
    for (EdgeId e = 0; e < g.num_edges(); ++e)
      if (g.propagates(e)) ++indeg[g.edge_to[e]];
    g.level.assign(nn, 0);
    std::vector<PinId> frontier;
    for (PinId v = 0; v < nn; ++v)
      if (indeg[v] == 0) frontier.push_back(v);
    std::size_t visited = 0;
    std::vector<PinId> order;
    order.reserve(nn);
    while (!frontier.empty()) {
      std::vector<PinId> next;
      for (PinId v : frontier) {
        ++visited;
        order.push_back(v);
        for (auto k = g.fanout_offsets[v]; k < g.fanout_offsets[v + 1]; ++k) {
          EdgeId e = g.fanout_edges[k];
          if (!g.propagates(e)) continue;
          PinId w = g.edge_to[e];
          g.level[w] = std::max(g.level[w], g.level[v] + 1);
          if (--indeg[w] == 0) next.push_back(w);
        }
      }
      frontier = std::move(next);
    }
    if (visited == nn) break;

    std::vector<std::uint8_t> alive(nn, 0);
    for (PinId v = 0; v < nn; ++v) alive[v] = indeg[v] > 0;
    std::uint32_t count = 0;
    auto comp = scc_ids(g, alive, count);
    std::vector<EdgeId> victim(count, kInvalidId);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      if (!g.propagates(e)) continue;
      PinId a = g.edge_from[e], b = g.edge_to[e];
      if (!alive[a] || !alive[b] || comp[a] != comp[b]) continue;
      if (victim[comp[a]] == kInvalidId) victim[comp[a]] = e;
    }
    std::size_t now = 0;
    for (EdgeId e : victim) {
      if (e == kInvalidId) continue;
      g.disabled[e] = 1;
      ++now;
      if (netlist)
        log::warn("combinational loop broken by disabling arc {} -> {}", netlist->pin_names[g.edge_from[e]],
                  netlist->pin_names[g.edge_to[e]]);
      else
        log::warn("combinational loop broken by disabling edge {}", e);
    }
    broken += now;
    if (now == 0) break;  // cannot happen: leftover nodes always contain a cycle
  }
  std::uint32_t max_level = 0;
  for (PinId v = 0; v < nn; ++v) max_level = std::max(max_level, g.level[v]);
  g.level_offsets.assign(nn ? max_level + 2 : 1, 0);
  for (PinId v = 0; v < nn; ++v) ++g.level_offsets[g.level[v] + 1];
  for (std::size_t l = 0; l + 1 < g.level_offsets.size(); ++l) g.level_offsets[l + 1] += g.level_offsets[l];
  g.level_nodes.assign(nn, 0);
  std::vector<std::uint32_t> fill(g.level_offsets.begin(), g.level_offsets.end() - 1);
  for (PinId v = 0; v < nn; ++v) g.level_nodes[fill[g.level[v]]++] = v;
  return broken;
}

}  // namespace ministra
