#include "ministra/timing.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>

#include "ministra/log.hpp"
#include "ministra/parallel.hpp"

namespace ministra {

namespace {

ModeEdge<double> empty_arrival() { return {{{kInf, kInf}, {-kInf, -kInf}}}; }

bool valid(const ModeEdge<double>& a, int rf) { return a[kLate][rf] > -kInf; }

void merge_into(ModeEdge<double>& dst, const ModeEdge<double>& src) {
  for (int rf = 0; rf < 2; ++rf) {
    dst[kEarly][rf] = std::min(dst[kEarly][rf], src[kEarly][rf]);
    dst[kLate][rf] = std::max(dst[kLate][rf], src[kLate][rf]);
  }
}

void add_entry(std::vector<TagEntry>& v, TagId tag, const ModeEdge<double>& arr) {
  for (auto& e : v)
    if (e.tag == tag) {
      merge_into(e.arr, arr);
      return;
    }
  v.push_back({tag, arr});
}

double fill(double a, double b) {
  if (!std::isnan(a)) return a;
  if (!std::isnan(b)) return b;
  return 0.0;
}

}  // namespace

int edge_inputs(const TimingGraph& g, const FlatNetlist& nl, const LibertyLibrary& lib, EdgeId e, int out, int in[2]) {
  if (g.edge_kind[e] == EdgeKind::net_arc) {
    in[0] = out;
    return 1;
  }
  const TimingArc& arc = *g.arc(e, nl, lib);
  if (is_check(arc.kind)) return 0;
  if (is_clock_to_q(arc.kind)) {
    in[0] = static_cast<int>(active_clock_edge(arc.kind));
    return 1;
  }
  switch (arc.sense) {
    case TimingSense::positive_unate: in[0] = out; return 1;
    case TimingSense::negative_unate: in[0] = 1 - out; return 1;
    default:
      in[0] = 0;
      in[1] = 1;
      return 2;
  }
}

const TagEntry* TimingState::find_entry(PinId pin, TagId tag) const {
  for (const auto& e : entries[pin])
    if (e.tag == tag) return &e;
  return nullptr;
}

TimingState propagate_arrivals(const TimingGraph& g, const FlatNetlist& nl, const LibertyLibrary& lib,
                               const Constraints& c, const ArcTiming& arcs, const TimingOptions& opt) {
  TimingState st;
  st.clocks = build_clock_set(c);
  st.clock_at = trace_clock_network(g, nl, lib, c);
  st.exceptions = ExceptionSet(c, nl, lib, g);
  st.tags = std::make_unique<TagTable>(st.clocks.num_events(), st.exceptions.words());
  const std::size_t np = g.num_nodes;
  st.entries.assign(np, {});
  st.is_clock_pin.assign(np, 0);
  const ClockId virt = st.clocks.virtual_clock();

  auto seed_tag = [&](PinId p, ClockEvent ev) {
    if (st.exceptions.empty()) return static_cast<TagId>(ev);
    return st.tags->intern(st.exceptions.seed(p, ev));
  };

  // Register clock pins launch at the active edge of every clock reaching them.
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (g.edge_kind[e] != EdgeKind::cell_delay_arc) continue;
    const TimingArc& arc = *g.arc(e, nl, lib);
    if (!is_clock_to_q(arc.kind)) continue;
    const PinId ck = g.edge_from[e];
    st.is_clock_pin[ck] = 1;
    if (!g.enabled(e)) continue;
    const int a = static_cast<int>(active_clock_edge(arc.kind));
    for (const ClockArrival& ca : st.clock_at[ck]) {
      ModeEdge<double> arr = empty_arrival();
      arr[kEarly][a] = arr[kLate][a] = 0.0;
      add_entry(st.entries[ck], seed_tag(ck, make_event(ca.clock, a ^ (ca.inverted ? 1 : 0))), arr);
    }
  }

  std::vector<std::uint8_t> is_clock_source(np, 0);
  for (const auto& k : c.clocks)
    for (PinId s : k.sources) is_clock_source[s] = 1;
  std::vector<std::uint8_t> has_input_delay(np, 0);
  for (const IoDelay& d : c.io_delays) {
    if (!d.is_input) continue;
    has_input_delay[d.pin] = 1;
    ClockEvent ev = d.clock == kInvalidId ? make_event(virt, kRise) : make_event(d.clock, d.clock_fall ? kFall : kRise);
    ModeEdge<double> arr;
    for (int rf = 0; rf < 2; ++rf) {
      arr[kEarly][rf] = fill(d.value[kEarly][rf], d.value[kLate][rf]);
      arr[kLate][rf] = fill(d.value[kLate][rf], d.value[kEarly][rf]);
    }
    add_entry(st.entries[d.pin], seed_tag(d.pin, ev), arr);
  }
  std::size_t unclocked = 0;
  for (PinId p = 0; p < nl.num_ports(); ++p) {
    if (nl.pin_dir[p] == PinDirection::output || has_input_delay[p] || is_clock_source[p]) continue;
    ModeEdge<double> arr{{{0, 0}, {0, 0}}};
    add_entry(st.entries[p], seed_tag(p, make_event(virt, kRise)), arr);
    ++unclocked;
  }
  if (unclocked && !c.clocks.empty())
    log::info("{} input port(s) without input delay are launched by the VIRTUAL clock at time 0", unclocked);

  std::atomic<std::size_t> overflows{0};
  const bool with_ex = !st.exceptions.empty();
  for (std::size_t L = 0; L < g.num_levels(); ++L) {
    const std::uint32_t lb = g.level_offsets[L], le = g.level_offsets[L + 1];
    parallel_for(le - lb, [&](std::size_t i) {
      const PinId v = g.level_nodes[lb + i];
      if (st.is_clock_pin[v]) return;
      std::vector<TagEntry>& out = st.entries[v];
      const bool touches = with_ex && st.exceptions.touches(v);
      for (auto k = g.fanin_offsets[v]; k < g.fanin_offsets[v + 1]; ++k) {
        const EdgeId e = g.fanin_edges[k];
        if (!g.propagates(e)) continue;
        const PinId u = g.edge_from[e];
        for (const TagEntry& src : st.entries[u]) {
          TagId tag = src.tag;
          if (touches) {
            TagKey key = st.tags->get(tag);
            if (st.exceptions.advance(key, v)) tag = st.tags->intern(key);
          }
          ModeEdge<double> arr = empty_arrival();
          bool any = false;
          for (int o = 0; o < 2; ++o) {
            int in[2];
            int n = edge_inputs(g, nl, lib, e, o, in);
            for (int j = 0; j < n; ++j) {
              if (!valid(src.arr, in[j])) continue;
              arr[kLate][o] = std::max(arr[kLate][o], src.arr[kLate][in[j]] + arcs.delay[e][kLate][o]);
              arr[kEarly][o] = std::min(arr[kEarly][o], src.arr[kEarly][in[j]] + arcs.delay[e][kEarly][o]);
              any = true;
            }
          }
          if (any) add_entry(out, tag, arr);
        }
      }
      if (out.size() > 1)
        std::sort(out.begin(), out.end(),
                  [&](const TagEntry& a, const TagEntry& b) { return st.tags->get(a.tag) < st.tags->get(b.tag); });
      while (out.size() > opt.tag_cap) {
        // Merge the closest pair of same-event tags; their bits keep only what both matched.
        std::size_t bi = 0, bj = 0;
        double best = kInf;
        for (std::size_t a = 0; a < out.size(); ++a)
          for (std::size_t b = a + 1; b < out.size(); ++b) {
            if (st.tags->get(out[a].tag).event != st.tags->get(out[b].tag).event) continue;
            double d = std::fabs(std::max(out[a].arr[kLate][0], out[a].arr[kLate][1]) -
                                 std::max(out[b].arr[kLate][0], out[b].arr[kLate][1]));
            if (d < best) {
              best = d;
              bi = a;
              bj = b;
            }
          }
        if (best == kInf) break;
        TagKey key = st.tags->get(out[bi].tag);
        const TagKey& other = st.tags->get(out[bj].tag);
        for (std::size_t w = 0; w < key.bits.size(); ++w) key.bits[w] &= other.bits[w];
        ModeEdge<double> arr = out[bi].arr;
        merge_into(arr, out[bj].arr);
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(bj));
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(bi));
        add_entry(out, st.tags->intern(key), arr);
        std::sort(out.begin(), out.end(),
                  [&](const TagEntry& a, const TagEntry& b) { return st.tags->get(a.tag) < st.tags->get(b.tag); });
        ++overflows;
      }
    });
  }
  st.tag_overflows = overflows;
  if (st.tag_overflows) log::warn("tag limit of {} exceeded {} time(s); merged pessimistically", opt.tag_cap, st.tag_overflows);
  return st;
}

std::optional<double> check_relation(const TimingState& st, const TagKey& key, const Endpoint& ep,
                                     const CaptureContext& ctx, CheckMode mode) {
  const ClockEvent launch = key.event, capture = ctx.event;
  const ClockId lc = event_clock(launch), cc = event_clock(capture);
  const bool setup = mode == CheckMode::setup;
  ExceptionSet::Resolution r;
  if (!st.exceptions.empty()) r = st.exceptions.resolve(key, ep.pin, cc, setup);
  if (r.excluded) return std::nullopt;
  if (r.fixed) return *r.fixed;
  auto period = [&](McpAnchor a) { return st.clocks.period(a == McpAnchor::start ? lc : cc); };
  if (setup) {
    double s = st.clocks.setup(launch, capture);
    if (r.setup_multiplier != 1) s += (r.setup_multiplier - 1) * period(r.setup_anchor);
    return s;
  }
  double h = st.clocks.hold(launch, capture);
  if (r.setup_multiplier != 1) h += (r.setup_multiplier - 1) * period(r.setup_anchor);
  if (r.hold_multiplier != 0) h -= r.hold_multiplier * period(r.hold_anchor);
  return h;
}

std::optional<double> endpoint_required(const TimingState& st, const TagKey& key, const Endpoint& ep,
                                        const CaptureContext& ctx, CheckMode mode, int rf) {
  if (mode == CheckMode::setup ? !ctx.has_setup : !ctx.has_hold) return std::nullopt;
  auto rel = check_relation(st, key, ep, ctx, mode);
  if (!rel) return std::nullopt;
  if (mode == CheckMode::setup) return *rel - ctx.setup_margin[rf] - ctx.out_max[rf];
  return *rel + ctx.hold_margin[rf] - ctx.out_min[rf];
}

namespace {

std::vector<Endpoint> find_endpoints(const TimingState& st, const TimingGraph& g, const FlatNetlist& nl,
                                     const LibertyLibrary& lib, const Constraints& c, const ArcTiming& arcs) {
  std::vector<Endpoint> out;
  const ClockId virt = st.clocks.virtual_clock();
  std::vector<std::vector<const IoDelay*>> out_delays(nl.num_pins());
  for (const IoDelay& d : c.io_delays)
    if (!d.is_input) out_delays[d.pin].push_back(&d);
  for (PinId p = 0; p < g.num_nodes; ++p) {
    Endpoint ep{p, false, {}};
    bool is_ep = false;
    for (auto k = g.fanin_offsets[p]; k < g.fanin_offsets[p + 1]; ++k) {
      EdgeId e = g.fanin_edges[k];
      if (g.edge_kind[e] != EdgeKind::cell_check_arc) continue;
      is_ep = true;
      if (g.disabled[e]) continue;
      const TimingArc& arc = *g.arc(e, nl, lib);
      const PinId ck = g.edge_from[e];
      const int a = static_cast<int>(active_clock_edge(arc.kind));
      for (const ClockArrival& ca : st.clock_at[ck]) {
        ClockEvent ev = make_event(ca.clock, a ^ (ca.inverted ? 1 : 0));
        auto it = std::find_if(ep.contexts.begin(), ep.contexts.end(),
                               [&](const CaptureContext& x) { return x.event == ev && x.clock_pin == ck; });
        if (it == ep.contexts.end()) {
          ep.contexts.push_back({});
          it = ep.contexts.end() - 1;
          it->event = ev;
          it->clock_pin = ck;
        }
        for (int rf = 0; rf < 2; ++rf) {
          if (is_setup(arc.kind)) {
            double m = arcs.delay[e][kLate][rf];
            it->setup_margin[rf] = it->has_setup ? std::max(it->setup_margin[rf], m) : m;
          } else {
            double m = arcs.delay[e][kEarly][rf];
            it->hold_margin[rf] = it->has_hold ? std::max(it->hold_margin[rf], m) : m;
          }
        }
        (is_setup(arc.kind) ? it->has_setup : it->has_hold) = true;
      }
    }
    if (nl.is_port(p) && nl.pin_dir[p] != PinDirection::input) {
      is_ep = true;
      ep.is_output = true;
      for (const IoDelay* d : out_delays[p]) {
        CaptureContext ctx;
        ctx.event = d->clock == kInvalidId ? make_event(virt, kRise) : make_event(d->clock, d->clock_fall ? kFall : kRise);
        ctx.has_setup = ctx.has_hold = true;
        for (int rf = 0; rf < 2; ++rf) {
          ctx.out_max[rf] = fill(d->value[kLate][rf], d->value[kEarly][rf]);
          ctx.out_min[rf] = fill(d->value[kEarly][rf], d->value[kLate][rf]);
        }
        ep.contexts.push_back(ctx);
      }
    }
    if (is_ep) out.push_back(std::move(ep));
  }
  return out;
}

}  // namespace

void compute_required_and_slack(TimingState& st, const TimingGraph& g, const FlatNetlist& nl, const LibertyLibrary& lib,
                                const Constraints& c, const ArcTiming& arcs) {
  st.endpoints = find_endpoints(st, g, nl, lib, c, arcs);
  st.endpoint_of.assign(g.num_nodes, kInvalidId);
  for (std::uint32_t i = 0; i < st.endpoints.size(); ++i) st.endpoint_of[st.endpoints[i].pin] = i;
  st.setup_slack.assign(st.endpoints.size(), kInf);
  st.hold_slack.assign(st.endpoints.size(), kInf);
  st.required.assign(g.num_nodes, {});
  for (PinId p = 0; p < g.num_nodes; ++p) st.required[p].assign(st.entries[p].size(), empty_arrival());

  std::atomic<std::size_t> unconstrained{0};
  parallel_for(st.endpoints.size(), [&](std::size_t i) {
    const Endpoint& ep = st.endpoints[i];
    if (ep.contexts.empty()) {
      ++unconstrained;
      return;
    }
    const auto& ents = st.entries[ep.pin];
    for (std::size_t k = 0; k < ents.size(); ++k) {
      const TagKey& key = st.tag(ents[k].tag);
      auto& req = st.required[ep.pin][k];
      for (const CaptureContext& ctx : ep.contexts)
        for (int rf = 0; rf < 2; ++rf) {
          if (!valid(ents[k].arr, rf)) continue;
          if (auto r = endpoint_required(st, key, ep, ctx, CheckMode::setup, rf)) {
            req[kLate][rf] = std::min(req[kLate][rf], *r);
            st.setup_slack[i] = std::min(st.setup_slack[i], *r - ents[k].arr[kLate][rf]);
          }
          if (auto r = endpoint_required(st, key, ep, ctx, CheckMode::hold, rf)) {
            req[kEarly][rf] = std::max(req[kEarly][rf], *r);
            st.hold_slack[i] = std::min(st.hold_slack[i], ents[k].arr[kEarly][rf] - *r);
          }
        }
    }
  });
  st.unconstrained = unconstrained;
  if (st.unconstrained) log::info("{} endpoint(s) have no capture clock or output delay; unconstrained", st.unconstrained);

  const bool with_ex = !st.exceptions.empty();
  for (std::size_t L = g.num_levels(); L-- > 0;) {
    const std::uint32_t lb = g.level_offsets[L], le = g.level_offsets[L + 1];
    parallel_for(le - lb, [&](std::size_t i) {
      const PinId u = g.level_nodes[lb + i];
      for (std::size_t k = 0; k < st.entries[u].size(); ++k) {
        const TagId tag = st.entries[u][k].tag;
        auto& req = st.required[u][k];
        for (auto f = g.fanout_offsets[u]; f < g.fanout_offsets[u + 1]; ++f) {
          const EdgeId e = g.fanout_edges[f];
          if (!g.propagates(e)) continue;
          const PinId v = g.edge_to[e];
          if (st.is_clock_pin[v]) continue;
          TagId vt = tag;
          if (with_ex && st.exceptions.touches(v)) {
            TagKey key = st.tag(tag);
            if (st.exceptions.advance(key, v)) {
              auto found = st.tags->find(key);
              if (!found) continue;
              vt = *found;
            }
          }
          const auto& ve = st.entries[v];
          std::size_t j = 0;
          while (j < ve.size() && ve[j].tag != vt) ++j;
          if (j == ve.size()) continue;
          const auto& rv = st.required[v][j];
          for (int o = 0; o < 2; ++o) {
            int in[2];
            int n = edge_inputs(g, nl, lib, e, o, in);
            for (int m = 0; m < n; ++m) {
              req[kLate][in[m]] = std::min(req[kLate][in[m]], rv[kLate][o] - arcs.delay[e][kLate][o]);
              req[kEarly][in[m]] = std::max(req[kEarly][in[m]], rv[kEarly][o] - arcs.delay[e][kEarly][o]);
            }
          }
        }
      }
    });
  }
}

TimingState analyze(const TimingGraph& g, const FlatNetlist& nl, const LibertyLibrary& lib, const Constraints& c,
                    const ArcTiming& arcs, const TimingOptions& opt) {
  TimingState st = propagate_arrivals(g, nl, lib, c, arcs, opt);
  compute_required_and_slack(st, g, nl, lib, c, arcs);
  return st;
}

double endpoint_slack(const TimingState& st, std::size_t i, CheckMode mode, std::optional<ClockId> clock) {
  if (!clock) return mode == CheckMode::setup ? st.setup_slack[i] : st.hold_slack[i];
  const Endpoint& ep = st.endpoints[i];
  double s = kInf;
  for (const TagEntry& ent : st.entries[ep.pin]) {
    const TagKey& key = st.tag(ent.tag);
    for (const CaptureContext& ctx : ep.contexts) {
      if (event_clock(ctx.event) != *clock) continue;
      for (int rf = 0; rf < 2; ++rf) {
        if (!valid(ent.arr, rf)) continue;
        auto r = endpoint_required(st, key, ep, ctx, mode, rf);
        if (!r) continue;
        s = std::min(s, mode == CheckMode::setup ? *r - ent.arr[kLate][rf] : ent.arr[kEarly][rf] - *r);
      }
    }
  }
  return s;
}

WnsTns wns_tns(const TimingState& st, CheckMode mode, std::optional<ClockId> clock) {
  WnsTns r;
  for (std::size_t i = 0; i < st.endpoints.size(); ++i) {
    double s = endpoint_slack(st, i, mode, clock);
    if (!std::isfinite(s)) continue;
    ++r.endpoints;
    r.wns = std::min(r.wns, s);
    if (s < 0) {
      r.tns += s;
      ++r.violations;
    }
  }
  return r;
}

std::vector<double> pin_slacks(const TimingState& st, CheckMode mode) {
  std::vector<double> out(st.entries.size(), kInf);
  parallel_for(st.entries.size(), [&](std::size_t p) {
    double s = kInf;
    for (std::size_t k = 0; k < st.entries[p].size(); ++k) {
      const auto& a = st.entries[p][k].arr;
      const auto& r = st.required[p][k];
      for (int rf = 0; rf < 2; ++rf) {
        if (!valid(a, rf)) continue;
        double v = mode == CheckMode::setup ? r[kLate][rf] - a[kLate][rf] : a[kEarly][rf] - r[kEarly][rf];
        if (!std::isnan(v)) s = std::min(s, v);
      }
    }
    out[p] = s;
  });
  return out;
}

}  // namespace ministra
