#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ministra/log.hpp"
#include "ministra/timing.hpp"

namespace ministra {

double ClockSet::edge_time(ClockEvent e) const {
  const SdcClock& c = clocks[event_clock(e)];
  return event_edge(e) == kRise ? c.rise : c.fall;
}

std::pair<double, double> clock_relationship(double lp, double le, double cp, double ce, bool* capped) {
  if (!std::isfinite(lp) || !std::isfinite(cp)) return {kInf, -kInf};
  using i64 = long long;
  const i64 Pl = std::max<i64>(1, std::llround(lp * 1000)), Pc = std::max<i64>(1, std::llround(cp * 1000));
  i64 El = std::llround(le * 1000) % Pl, Ec = std::llround(ce * 1000) % Pc;
  if (El < 0) El += Pl;
  if (Ec < 0) Ec += Pc;
  const i64 cap = 64 * std::max(Pl, Pc);
  i64 window;
  const i64 g = std::gcd(Pl, Pc);
  if (Pl / g > cap / Pc) {
    window = cap;
    if (capped) *capped = true;
  } else {
    window = Pl / g * Pc;
  }
  auto floor_div = [](i64 a, i64 b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };
  i64 best_s = 0, best_h = 0;
  bool first = true;
  for (i64 L = El; L < El + window; L += Pl) {
    i64 Cs = Ec + (floor_div(L - Ec, Pc) + 1) * Pc;  // first capture edge strictly after L
    i64 s = Cs - L;
    i64 h = std::max(Cs - Pc - L, Cs - (L + Pl));
    if (first || s < best_s) best_s = s;
    if (first || h > best_h) best_h = h;
    first = false;
  }
  return {best_s / 1000.0, best_h / 1000.0};
}

ClockSet build_clock_set(const Constraints& c) {
  ClockSet cs;
  cs.clocks = c.clocks;
  SdcClock virt;
  virt.name = "VIRTUAL";
  double p = 0;
  for (const auto& k : c.clocks) p = std::max(p, k.period);
  virt.period = c.clocks.empty() ? kInf : p;
  virt.rise = 0;
  virt.fall = c.clocks.empty() ? 0 : p / 2;
  cs.clocks.push_back(virt);
  const std::size_t ne = cs.num_events();
  cs.setup_rel.assign(ne * ne, kInf);
  cs.hold_rel.assign(ne * ne, -kInf);
  for (ClockEvent l = 0; l < ne; ++l)
    for (ClockEvent k = 0; k < ne; ++k) {
      auto [s, h] = clock_relationship(cs.period(event_clock(l)), cs.edge_time(l), cs.period(event_clock(k)),
                                       cs.edge_time(k), &cs.window_capped);
      cs.setup_rel[l * ne + k] = s;
      cs.hold_rel[l * ne + k] = h;
    }
  if (cs.window_capped) log::warn("clock periods have no small common multiple; edge expansion capped at 64 periods");
  return cs;
}

std::vector<std::vector<ClockArrival>> trace_clock_network(const TimingGraph& g, const FlatNetlist& nl,
                                                           const LibertyLibrary& lib, const Constraints& c) {
  std::vector<std::vector<ClockArrival>> at(g.num_nodes);
  auto add = [&](PinId p, ClockArrival a) {
    auto& v = at[p];
    if (std::find(v.begin(), v.end(), a) != v.end()) return false;
    v.push_back(a);
    return true;
  };
  for (ClockId k = 0; k < c.clocks.size(); ++k) {
    std::vector<std::pair<PinId, bool>> work;
    for (PinId s : c.clocks[k].sources)
      if (add(s, {k, false})) work.emplace_back(s, false);
    while (!work.empty()) {
      auto [p, inv] = work.back();
      work.pop_back();
      for (auto i = g.fanout_offsets[p]; i < g.fanout_offsets[p + 1]; ++i) {
        EdgeId e = g.fanout_edges[i];
        if (!g.propagates(e)) continue;
        bool flips[2] = {false, false};
        int n = 0;
        if (g.edge_kind[e] == EdgeKind::net_arc) {
          flips[n++] = false;
        } else {
          const TimingArc& arc = *g.arc(e, nl, lib);
          if (is_clock_to_q(arc.kind)) continue;
          if (arc.sense == TimingSense::positive_unate) {
            flips[n++] = false;
          } else if (arc.sense == TimingSense::negative_unate) {
            flips[n++] = true;
          } else {
            flips[n++] = false;
            flips[n++] = true;
          }
        }
        for (int j = 0; j < n; ++j) {
          PinId q = g.edge_to[e];
          bool qi = inv != flips[j];
          if (add(q, {k, qi})) work.emplace_back(q, qi);
        }
      }
    }
  }
  for (auto& v : at)
    std::sort(v.begin(), v.end(), [](auto& a, auto& b) { return std::tie(a.clock, a.inverted) < std::tie(b.clock, b.inverted); });
  return at;
}

}  // namespace ministra
