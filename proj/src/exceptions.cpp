#include <fmt/format.h>

#include <algorithm>

#include "ministra/log.hpp"
#include "ministra/timing.hpp"

namespace ministra {

TagTable::TagTable(std::size_t num_events, std::size_t words)
    : words_(words), chunks_(new std::unique_ptr<TagKey[]>[kChunk]) {
  for (ClockEvent e = 0; e < num_events; ++e) intern(TagKey{e, std::vector<std::uint64_t>(words, 0)});
}

std::size_t TagTable::Hash::operator()(const TagKey& k) const {
  std::size_t h = k.event * 0x9E3779B97F4A7C15ull;
  for (auto w : k.bits) h = (h ^ w) * 0x100000001B3ull + (h >> 29);
  return h;
}

TagId TagTable::intern(const TagKey& key) {
  std::lock_guard lock(mutex_);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  const std::size_t id = size_;
  if (id / kChunk >= kChunk) throw Error("tag table overflow");
  auto& chunk = chunks_[id / kChunk];
  if (!chunk) chunk.reset(new TagKey[kChunk]);
  chunk[id % kChunk] = key;
  index_.emplace(key, static_cast<TagId>(id));
  ++size_;
  return static_cast<TagId>(id);
}

std::optional<TagId> TagTable::find(const TagKey& key) const {
  std::lock_guard lock(mutex_);
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const TagKey& TagTable::get(TagId id) const { return chunks_[id / kChunk][id % kChunk]; }

std::size_t TagTable::size() const {
  std::lock_guard lock(mutex_);
  return size_;
}

namespace {

bool has(const std::vector<std::uint32_t>& sorted, std::uint32_t x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

bool get_bit(const TagKey& k, std::size_t b) { return (k.bits[b / 64] >> (b % 64)) & 1; }
void set_bit(TagKey& k, std::size_t b) { k.bits[b / 64] |= std::uint64_t{1} << (b % 64); }

}  // namespace

ExceptionSet::ExceptionSet(const Constraints& c, const FlatNetlist& nl, const LibertyLibrary& lib,
                           const TimingGraph& g) {
  // Pin roles inside cells: clock pins start paths, check-arc data pins end them.
  std::vector<std::uint8_t> is_clock(nl.num_pins(), 0), is_data(nl.num_pins(), 0);
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (g.edge_kind[e] == EdgeKind::net_arc) continue;
    const TimingArc& arc = *g.arc(e, nl, lib);
    if (is_clock_to_q(arc.kind)) is_clock[g.edge_from[e]] = 1;
    if (g.edge_kind[e] == EdgeKind::cell_check_arc) {
      is_clock[g.edge_from[e]] = 1;
      is_data[g.edge_to[e]] = 1;
    }
  }
  auto cell_pins = [&](CellId cell, auto pred) {
    std::vector<PinId> out;
    for (auto k = nl.cell_pin_offsets[cell]; k < nl.cell_pin_offsets[cell + 1]; ++k)
      if (pred(nl.cell_pins[k])) out.push_back(nl.cell_pins[k]);
    return out;
  };
  auto expand = [&](const NodeSet& s, auto pred) {
    std::vector<PinId> pins = s.pins;
    for (CellId cell : s.cells) {
      auto more = cell_pins(cell, pred);
      pins.insert(pins.end(), more.begin(), more.end());
    }
    std::sort(pins.begin(), pins.end());
    pins.erase(std::unique(pins.begin(), pins.end()), pins.end());
    return pins;
  };
  auto sorted_clocks = [](std::vector<ClockId> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };

  for (const PathException& pe : c.exceptions) {
    CompiledException x;
    x.kind = pe.kind;
    x.setup = pe.setup;
    x.hold = pe.hold;
    x.multiplier = pe.multiplier;
    x.anchor = pe.anchor;
    x.value = pe.value;
    x.priority = pe.priority;
    bool empty = false;
    if (!pe.from.empty()) {
      x.has_from = true;
      x.from_pins = expand(pe.from, [&](PinId p) { return is_clock[p] != 0; });
      x.from_clocks = sorted_clocks(pe.from.clocks);
      empty |= x.from_pins.empty() && x.from_clocks.empty();
    }
    for (const NodeSet& t : pe.through) {
      x.through.push_back(expand(t, [&](PinId p) { return nl.is_driver(p); }));
      empty |= x.through.back().empty();
    }
    if (!pe.to.empty()) {
      x.has_to = true;
      x.to_pins = expand(pe.to, [&](PinId p) { return is_data[p] != 0; });
      x.to_clocks = sorted_clocks(pe.to.clocks);
      empty |= x.to_pins.empty() && x.to_clocks.empty();
    }
    if (empty) {
      log::warn("line {}: exception matches no timing points after expansion; dropped", pe.line);
      continue;
    }
    x.bit = static_cast<std::uint32_t>(bits_);
    bits_ += 1 + x.through.size();
    ex_.push_back(std::move(x));
  }

  std::vector<std::uint32_t> count(nl.num_pins() + 1, 0);
  for (const auto& x : ex_)
    for (const auto& seg : x.through)
      for (PinId p : seg) ++count[p + 1];
  through_offsets_.assign(nl.num_pins() + 1, 0);
  for (std::size_t i = 0; i < nl.num_pins(); ++i) through_offsets_[i + 1] = through_offsets_[i] + count[i + 1];
  through_index_.resize(through_offsets_.back());
  std::vector<std::uint32_t> fill(through_offsets_.begin(), through_offsets_.end() - 1);
  for (std::uint32_t xi = 0; xi < ex_.size(); ++xi)
    for (std::uint32_t s = 0; s < ex_[xi].through.size(); ++s)
      for (PinId p : ex_[xi].through[s]) through_index_[fill[p]++] = {xi, s};
}

TagKey ExceptionSet::seed(PinId pin, ClockEvent event) const {
  TagKey k{event, std::vector<std::uint64_t>(words(), 0)};
  if (ex_.empty()) return k;
  const ClockId clk = event_clock(event);
  for (const auto& x : ex_) {
    bool alive = !x.has_from || has(x.from_pins, pin) || has(x.from_clocks, clk);
    if (alive) set_bit(k, x.bit);
  }
  advance(k, pin);
  return k;
}

bool ExceptionSet::advance(TagKey& k, PinId pin) const {
  if (pin + 1 >= through_offsets_.size()) return false;
  bool changed = false;
  std::uint32_t last = kInvalidId;
  for (auto i = through_offsets_[pin]; i < through_offsets_[pin + 1]; ++i) {
    auto [xi, seg] = through_index_[i];
    if (xi == last) continue;
    const CompiledException& x = ex_[xi];
    if (!get_bit(k, x.bit)) continue;
    bool at_seg = (seg == 0 || get_bit(k, x.bit + seg)) && !get_bit(k, x.bit + 1 + seg);
    if (!at_seg) continue;
    set_bit(k, x.bit + 1 + seg);
    last = xi;
    changed = true;
  }
  return changed;
}

bool ExceptionSet::matches(const CompiledException& x, const TagKey& k, PinId endpoint, ClockId capture) const {
  if (!get_bit(k, x.bit)) return false;
  if (!x.through.empty() && !get_bit(k, x.bit + x.through.size())) return false;
  return !x.has_to || has(x.to_pins, endpoint) || has(x.to_clocks, capture);
}

ExceptionSet::Resolution ExceptionSet::resolve(const TagKey& k, PinId endpoint, ClockId capture, bool setup) const {
  Resolution r;
  const CompiledException* fixed[2] = {nullptr, nullptr};  // [setup, hold]
  const CompiledException* mcp[2] = {nullptr, nullptr};
  bool fp[2] = {false, false};
  for (const auto& x : ex_) {
    if (!matches(x, k, endpoint, capture)) continue;
    for (int s = 0; s < 2; ++s) {
      if (!(s == 0 ? x.setup : x.hold)) continue;
      switch (x.kind) {
        case ExceptionKind::false_path: fp[s] = true; break;
        case ExceptionKind::max_delay:
        case ExceptionKind::min_delay:
          if (!fixed[s] || x.priority > fixed[s]->priority) fixed[s] = &x;
          break;
        case ExceptionKind::multicycle:
          if (!mcp[s] || x.priority > mcp[s]->priority) mcp[s] = &x;
          break;
      }
    }
  }
  const int s = setup ? 0 : 1;
  if (fp[s]) {
    r.excluded = true;
    return r;
  }
  if (fixed[s]) {
    r.fixed = fixed[s]->value;
    return r;
  }
  // Hold follows a setup multicycle only when the multicycle decides the setup check.
  if (mcp[0] && !fp[0] && !fixed[0]) {
    r.setup_multiplier = mcp[0]->multiplier;
    r.setup_anchor = mcp[0]->anchor == McpAnchor::start ? McpAnchor::start : McpAnchor::end;
  }
  if (mcp[1]) {
    r.hold_multiplier = mcp[1]->multiplier;
    r.hold_anchor = mcp[1]->anchor == McpAnchor::end ? McpAnchor::end : McpAnchor::start;
  }
  return r;
}

}  // namespace ministra
