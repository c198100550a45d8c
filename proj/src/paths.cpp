#include "ministra/paths.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <unordered_map>

namespace ministra {

namespace {

bool in_set(const std::vector<PinId>& v, PinId p) { return std::find(v.begin(), v.end(), p) != v.end(); }

struct Filter {
  std::vector<PinId> pins;
  std::vector<ClockId> clocks;
  bool active = false;

  bool pass(PinId p, ClockId c) const {
    return !active || in_set(pins, p) || std::find(clocks.begin(), clocks.end(), c) != clocks.end();
  }
};

// Search keys in fixed-point picoseconds: bounds and completed slacks compare exactly.
using Fixed = std::int64_t;
constexpr double kScale = 1073741824.0;  // 2^30 per ps
constexpr Fixed kNoPath = INT64_MAX;
constexpr Fixed kUnreached = INT64_MIN;
Fixed fixed(double ps) { return static_cast<Fixed>(std::llround(ps * kScale)); }
double to_ps(Fixed f) { return static_cast<double>(f) / kScale; }

struct Query {
  const TimingState& st;
  const TimingGraph& g;
  const FlatNetlist& nl;
  const LibertyLibrary& lib;
  const ArcTiming& arcs;
  const PathQuery& q;
  Filter from, to;
  bool setup;
  int md;
  bool with_ex;

  double none() const { return setup ? -kInf : kInf; }
  double slack(double required, double arrival) const { return setup ? required - arrival : arrival - required; }
  Fixed qslack(Fixed required, Fixed arrival) const { return setup ? required - arrival : arrival - required; }
  bool keep(Fixed key) const { return key != kNoPath && (!q.slack_lt || to_ps(key) < *q.slack_lt); }
  bool is_start(PinId p) const { return st.is_clock_pin[p] || (nl.is_port(p) && nl.pin_dir[p] != PinDirection::output); }

  std::optional<TagId> next_tag(TagId tag, PinId w) const {
    if (!with_ex || !st.exceptions.touches(w)) return tag;
    TagKey k2 = st.tag(tag);
    if (!st.exceptions.advance(k2, w)) return tag;
    return st.tags->find(k2);
  }
  std::optional<std::uint32_t> entry_index(PinId p, TagId tag) const {
    const auto& ents = st.entries[p];
    for (std::uint32_t j = 0; j < ents.size(); ++j)
      if (ents[j].tag == tag) return j;
    return std::nullopt;
  }
};

struct Item {
  PinId pin;
  TagId tag;
  std::uint32_t entry;
  std::array<double, 2> arr;
  std::array<Fixed, 2> qarr;
  std::uint32_t parent;
  EdgeId edge;
  ClockEvent capture;  // kInvalidId for partial paths
  Fixed key;
  double slack;
  double required;
  std::uint32_t seq;  // node in the pin-sequence trie
};

// Paths into one endpoint in (slack, pin sequence, launch, capture) order. A partial path's key
// is the slack of its best completion, from required times over the endpoint's fanin cone.
class EndpointStream {
 public:
  EndpointStream(const Query& c, PinId end) : c_(c), end_(end) {
    build_cone();
    seed();
  }

  // Next path, expanding partial paths until a complete one is on top.
  const Item* peek() {
    while (!heap_.empty()) {
      const std::uint32_t top = heap_.front();
      if (items_[top].capture != kInvalidId) return &items_[top];
      pop_heap();
      expand(top);
    }
    return nullptr;
  }
  std::uint32_t pop() {
    const std::uint32_t top = heap_.front();
    pop_heap();
    return top;
  }
  const std::vector<Item>& items() const { return items_; }

 private:
  struct SeqNode {
    std::uint32_t parent;
    PinId pin;
    std::uint32_t depth;
  };

  void build_cone() {
    const auto& st = c_.st;
    const auto& g = c_.g;
    std::vector<PinId> cone{end_};
    base_.emplace(end_, 0);
    for (std::size_t i = 0; i < cone.size(); ++i) {
      const PinId w = cone[i];
      if (w != end_ && st.is_clock_pin[w]) continue;
      for (auto f = g.fanin_offsets[w]; f < g.fanin_offsets[w + 1]; ++f) {
        const EdgeId e = g.fanin_edges[f];
        if (!g.propagates(e)) continue;
        if (base_.emplace(g.edge_from[e], 0).second) cone.push_back(g.edge_from[e]);
      }
    }
    std::sort(cone.begin(), cone.end(), [&](PinId a, PinId b) {
      return g.level[a] != g.level[b] ? g.level[a] > g.level[b] : a < b;
    });
    std::uint32_t total = 0;
    for (PinId p : cone) {
      base_[p] = total;
      total += static_cast<std::uint32_t>(st.entries[p].size());
    }
    req_.assign(total, {kUnreached, kUnreached});
    cone_ = std::move(cone);

    const Endpoint& ep = st.endpoints[st.endpoint_of[end_]];
    const auto& ents = st.entries[end_];
    for (std::size_t j = 0; j < ents.size(); ++j) {
      auto& r = req_[base_[end_] + j];
      for (const CaptureContext& ctx : ep.contexts) {
        if (!c_.to.pass(end_, event_clock(ctx.event))) continue;
        for (int rf = 0; rf < 2; ++rf)
          if (auto v = endpoint_required(st, st.tag(ents[j].tag), ep, ctx, c_.q.mode, rf)) merge(r[rf], fixed(*v));
      }
    }
    for (PinId v : cone_) {
      if (v == end_) continue;
      const auto& ents = st.entries[v];
      for (std::size_t j = 0; j < ents.size(); ++j) {
        auto& r = req_[base_[v] + j];
        for (auto f = g.fanout_offsets[v]; f < g.fanout_offsets[v + 1]; ++f) {
          const EdgeId e = g.fanout_edges[f];
          if (!g.propagates(e)) continue;
          const PinId w = g.edge_to[e];
          if (st.is_clock_pin[w]) continue;
          auto bw = base_.find(w);
          if (bw == base_.end()) continue;
          auto wt = c_.next_tag(ents[j].tag, w);
          if (!wt) continue;
          auto jw = c_.entry_index(w, *wt);
          if (!jw) continue;
          const auto& rw = req_[bw->second + *jw];
          for (int o = 0; o < 2; ++o) {
            if (rw[o] == kUnreached) continue;
            int in[2];
            int n = edge_inputs(g, c_.nl, c_.lib, e, o, in);
            for (int m = 0; m < n; ++m) merge(r[in[m]], rw[o] - fixed(c_.arcs.delay[e][c_.md][o]));
          }
        }
      }
    }
  }

  void merge(Fixed& r, Fixed x) const {
    if (r == kUnreached || (c_.setup ? x < r : x > r)) r = x;
  }

  Fixed bound(PinId p, std::uint32_t j, const Item& it) const {
    const auto& r = req_[base_.at(p) + j];
    Fixed b = kNoPath;
    for (int rf = 0; rf < 2; ++rf)
      if (std::isfinite(it.arr[rf]) && r[rf] != kUnreached) b = std::min(b, c_.qslack(r[rf], it.qarr[rf]));
    return b;
  }

  void seed() {
    const auto& st = c_.st;
    for (PinId p : cone_) {
      if (!c_.is_start(p)) continue;
      const auto& ents = st.entries[p];
      for (std::uint32_t j = 0; j < ents.size(); ++j) {
        const TagEntry& e = ents[j];
        if (!c_.from.pass(p, event_clock(st.tag(e.tag).event))) continue;
        std::array<double, 2> arr = {e.arr[c_.md][0], e.arr[c_.md][1]};
        for (int rf = 0; rf < 2; ++rf)
          if (e.arr[kLate][rf] == -kInf) arr[rf] = c_.none();
        Item it{p, e.tag, j, arr, {0, 0}, kInvalidId, kInvalidId, kInvalidId, 0, 0.0, 0.0, 0};
        for (int rf = 0; rf < 2; ++rf)
          if (std::isfinite(arr[rf])) it.qarr[rf] = fixed(arr[rf]);
        it.key = bound(p, j, it);
        push(it);
      }
    }
  }

  std::uint32_t seq_node(std::uint32_t parent, PinId pin) {
    std::uint64_t k = (static_cast<std::uint64_t>(parent) << 32) | pin;
    auto [it, fresh] = seq_index_.emplace(k, static_cast<std::uint32_t>(seqs_.size()));
    if (fresh) seqs_.push_back({parent, pin, parent == kInvalidId ? 0 : seqs_[parent].depth + 1});
    return it->second;
  }

  void push(Item it) {
    if (!c_.keep(it.key)) return;
    if (it.capture == kInvalidId) it.seq = seq_node(it.parent == kInvalidId ? kInvalidId : items_[it.parent].seq, it.pin);
    items_.push_back(it);
    heap_.push_back(static_cast<std::uint32_t>(items_.size() - 1));
    std::push_heap(heap_.begin(), heap_.end(), After{this});
  }
  void pop_heap() {
    std::pop_heap(heap_.begin(), heap_.end(), After{this});
    heap_.pop_back();
  }

  int compare_seq(std::uint32_t a, std::uint32_t b) const {
    if (a == b) return 0;
    int lifted = 0;
    while (seqs_[a].depth > seqs_[b].depth) {
      a = seqs_[a].parent;
      lifted = 1;
    }
    while (seqs_[b].depth > seqs_[a].depth) {
      b = seqs_[b].parent;
      lifted = -1;
    }
    if (a == b) return lifted;
    while (seqs_[a].parent != seqs_[b].parent) {
      a = seqs_[a].parent;
      b = seqs_[b].parent;
    }
    return seqs_[a].pin < seqs_[b].pin ? -1 : 1;
  }

  bool before(std::uint32_t ia, std::uint32_t ib) const {
    const Item &x = items_[ia], &y = items_[ib];
    if (x.key != y.key) return x.key < y.key;
    if (int s = compare_seq(x.seq, y.seq)) return s < 0;
    auto lx = c_.st.tag(x.tag).event, ly = c_.st.tag(y.tag).event;
    if (lx != ly) return lx < ly;
    if (x.tag != y.tag) return x.tag < y.tag;
    if (x.capture != y.capture) return x.capture + 1 < y.capture + 1;
    return ia < ib;
  }
  struct After {
    const EndpointStream* s;
    bool operator()(std::uint32_t a, std::uint32_t b) const { return s->before(b, a); }
  };

  void expand(std::uint32_t idx) {
    const auto& st = c_.st;
    const auto& g = c_.g;
    const Item it = items_[idx];
    const PinId v = it.pin;
    if (v == end_) {
      const Endpoint& ep = st.endpoints[st.endpoint_of[v]];
      const TagKey& tkey = st.tag(it.tag);
      struct Worst {
        Fixed key;
        double slack, required;
      };
      std::map<ClockEvent, Worst> by_event;
      for (const CaptureContext& ctx : ep.contexts) {
        if (!c_.to.pass(v, event_clock(ctx.event))) continue;
        for (int rf = 0; rf < 2; ++rf) {
          if (!std::isfinite(it.arr[rf])) continue;
          auto r = endpoint_required(st, tkey, ep, ctx, c_.q.mode, rf);
          if (!r) continue;
          Worst w{c_.qslack(fixed(*r), it.qarr[rf]), c_.slack(*r, it.arr[rf]), *r};
          auto [pos, fresh] = by_event.try_emplace(ctx.event, w);
          if (!fresh && w.key < pos->second.key) pos->second = w;
        }
      }
      for (auto& [ev, w] : by_event) {
        Item c = it;
        c.parent = idx;
        c.capture = ev;
        c.key = w.key;
        c.slack = w.slack;
        c.required = w.required;
        push(c);
      }
      return;
    }
    for (auto f = g.fanout_offsets[v]; f < g.fanout_offsets[v + 1]; ++f) {
      const EdgeId e = g.fanout_edges[f];
      if (!g.propagates(e)) continue;
      const PinId w = g.edge_to[e];
      if (st.is_clock_pin[w] || !base_.count(w)) continue;
      auto wt = c_.next_tag(it.tag, w);
      if (!wt) continue;
      auto jw = c_.entry_index(w, *wt);
      if (!jw) continue;
      Item c{w, *wt, *jw, {c_.none(), c_.none()}, {0, 0}, idx, e, kInvalidId, 0, 0.0, 0.0, 0};
      for (int o = 0; o < 2; ++o) {
        int in[2];
        int n = edge_inputs(g, c_.nl, c_.lib, e, o, in);
        const double d = c_.arcs.delay[e][c_.md][o];
        const Fixed qd = fixed(d);
        for (int j = 0; j < n; ++j) {
          if (!std::isfinite(it.arr[in[j]])) continue;
          const double a = it.arr[in[j]] + d;
          const Fixed qa = it.qarr[in[j]] + qd;
          if (!std::isfinite(c.arr[o]) || (c_.setup ? qa > c.qarr[o] : qa < c.qarr[o])) {
            c.arr[o] = a;
            c.qarr[o] = qa;
          }
        }
      }
      c.key = bound(w, *jw, c);
      push(c);
    }
  }

  const Query& c_;
  PinId end_;
  std::vector<PinId> cone_;
  std::unordered_map<PinId, std::uint32_t> base_;
  std::vector<std::array<Fixed, 2>> req_;
  std::vector<Item> items_;
  std::vector<std::uint32_t> heap_;
  std::vector<SeqNode> seqs_;
  std::unordered_map<std::uint64_t, std::uint32_t> seq_index_;
};

// Follows the worst edge back from the endpoint and appends the path.
void materialize(const Query& c, const std::vector<Item>& items, std::uint32_t ci, PathSet& out) {
  const auto& st = c.st;
  const Item& it_end = items[ci];
  std::vector<std::uint32_t> chain;
  for (std::uint32_t i = it_end.parent; i != kInvalidId; i = items[i].parent) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());
  const Endpoint& ep = st.endpoints[st.endpoint_of[it_end.pin]];
  int rf = -1;
  double best = kInf;
  for (int o = 0; o < 2; ++o) {
    if (!std::isfinite(it_end.arr[o])) continue;
    double worst = kInf;
    for (const CaptureContext& ctx : ep.contexts) {
      if (ctx.event != it_end.capture) continue;
      auto r = endpoint_required(st, st.tag(it_end.tag), ep, ctx, c.q.mode, o);
      if (r) worst = std::min(worst, c.slack(*r, it_end.arr[o]));
    }
    if (worst < best) {
      best = worst;
      rf = o;
    }
  }
  std::vector<int> edges(chain.size());
  edges.back() = rf;
  for (std::size_t s = chain.size() - 1; s > 0; --s) {
    const Item& child = items[chain[s]];
    const Item& parent = items[chain[s - 1]];
    int o = edges[s], pick = -1;
    int in[2];
    int n = edge_inputs(c.g, c.nl, c.lib, child.edge, o, in);
    double bestv = 0;
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(parent.arr[in[j]])) continue;
      double v = parent.arr[in[j]];
      if (pick < 0 || (c.setup ? v > bestv : v < bestv)) {
        pick = in[j];
        bestv = v;
      }
    }
    edges[s - 1] = pick;
  }
  for (std::size_t s = 0; s < chain.size(); ++s) {
    const Item& it = items[chain[s]];
    double a = it.arr[edges[s]];
    out.pins.push_back(it.pin);
    out.edge.push_back(static_cast<std::uint8_t>(edges[s]));
    out.arrival.push_back(a);
    out.incr.push_back(s == 0 ? a : c.arcs.delay[it.edge][c.md][edges[s]]);
  }
  out.offsets.push_back(static_cast<std::uint32_t>(out.pins.size()));
  out.slack.push_back(it_end.slack);
  out.required.push_back(it_end.required);
  out.endpoint.push_back(it_end.pin);
  out.launch.push_back(st.tag(it_end.tag).event);
  out.capture.push_back(it_end.capture);
}

}  // namespace

PathSet report_paths(const TimingState& st, const TimingGraph& g, const FlatNetlist& nl, const LibertyLibrary& lib,
                     const ArcTiming& arcs, const PathQuery& q) {
  PathSet out;
  out.mode = q.mode;
  const bool setup = q.mode == CheckMode::setup;
  const std::size_t k_limit = q.k == 0 ? SIZE_MAX : q.k;
  const std::size_t nworst = q.nworst == 0 ? SIZE_MAX : q.nworst;

  auto make_filter = [&](const std::optional<NodeSet>& s, bool start) {
    Filter f;
    if (!s) return f;
    f.active = true;
    f.pins = s->pins;
    f.clocks = s->clocks;
    for (CellId c : s->cells)
      for (auto k = nl.cell_pin_offsets[c]; k < nl.cell_pin_offsets[c + 1]; ++k) {
        PinId p = nl.cell_pins[k];
        if (start ? st.is_clock_pin[p] != 0 : st.endpoint_of[p] != kInvalidId) f.pins.push_back(p);
      }
    return f;
  };
  const Query c{st, g, nl, lib, arcs, q, make_filter(q.from, true), make_filter(q.to, false),
                setup, setup ? kLate : kEarly, !st.exceptions.empty()};

  // Endpoints merge by (slack, pin). Unopened endpoints sit at their worst slack, which bounds
  // every path into them.
  struct Head {
    Fixed key;
    PinId pin;
    bool opened;
  };
  auto after = [](const Head& a, const Head& b) { return a.key != b.key ? a.key > b.key : a.pin > b.pin; };
  std::vector<Head> heads;
  for (std::size_t i = 0; i < st.endpoints.size(); ++i) {
    const double lb = setup ? st.setup_slack[i] : st.hold_slack[i];
    if (!(lb < kInf) || (q.slack_lt && !(lb < *q.slack_lt + 1e-6))) continue;
    heads.push_back({fixed(lb - 1e-6), st.endpoints[i].pin, false});
  }
  std::make_heap(heads.begin(), heads.end(), after);
  std::unordered_map<PinId, std::unique_ptr<EndpointStream>> streams;
  std::unordered_map<PinId, std::size_t> per_endpoint;

  std::size_t emitted = 0;
  while (!heads.empty() && emitted < k_limit) {
    std::pop_heap(heads.begin(), heads.end(), after);
    Head h = heads.back();
    heads.pop_back();
    auto& s = streams[h.pin];
    if (!h.opened) s = std::make_unique<EndpointStream>(c, h.pin);
    if (h.opened) {
      materialize(c, s->items(), s->pop(), out);
      ++emitted;
      if (++per_endpoint[h.pin] >= nworst) {
        streams.erase(h.pin);
        continue;
      }
    }
    if (const Item* next = s->peek()) {
      heads.push_back({next->key, h.pin, true});
      std::push_heap(heads.begin(), heads.end(), after);
    } else {
      streams.erase(h.pin);
    }
  }
  return out;
}

std::string format_path_text(const PathSet& ps, std::size_t i, const FlatNetlist& nl, const TimingState& st) {
  const std::uint32_t b = ps.offsets[i], e = ps.offsets[i + 1];
  auto ev_name = [&](ClockEvent ev) {
    return fmt::format("{} {}", st.clocks.name(event_clock(ev)), event_edge(ev) == kRise ? "rise" : "fall");
  };
  std::size_t w = 3;
  for (auto k = b; k < e; ++k) w = std::max(w, nl.pin_names[ps.pins[k]].size());
  std::string s;
  s += fmt::format("Startpoint: {} ({})\n", nl.pin_names[ps.pins[b]], ev_name(ps.launch[i]));
  s += fmt::format("Endpoint: {} ({})\n", nl.pin_names[ps.endpoint[i]], ev_name(ps.capture[i]));
  s += fmt::format("Path Group: {}\n", st.clocks.name(event_clock(ps.capture[i])));
  s += fmt::format("Path Type: {}\n", ps.mode == CheckMode::setup ? "max" : "min");
  s += fmt::format("{:>{}} {:>4} {:>10} {:>10}\n", "Pin", w, "Edge", "Incr", "Arrival");
  for (auto k = b; k < e; ++k)
    s += fmt::format("{:>{}} {:>4} {:>10.3f} {:>10.3f}\n", nl.pin_names[ps.pins[k]], w, ps.edge[k] ? "f" : "r",
                     ps.incr[k], ps.arrival[k]);
  s += fmt::format("{:>{}} {:>10.3f}\n", "required", w + 5, ps.required[i]);
  s += fmt::format("{:>{}} {:>10.3f}\n", "slack", w + 5, ps.slack[i]);
  return s;
}

std::string format_paths_text(const PathSet& ps, const FlatNetlist& nl, const TimingState& st) {
  std::string s;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) s += "\n";
    s += format_path_text(ps, i, nl, st);
  }
  return s;
}

}  // namespace ministra
