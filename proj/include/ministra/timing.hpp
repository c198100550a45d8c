#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ministra/delay.hpp"
#include "ministra/graph.hpp"
#include "ministra/sdc.hpp"

namespace ministra {

/// Launch or capture event: clock id * 2 + source edge. The last clock id is VIRTUAL.
using ClockEvent = std::uint32_t;
inline ClockEvent make_event(ClockId c, int edge) { return c * 2 + static_cast<std::uint32_t>(edge); }
inline ClockId event_clock(ClockEvent e) { return e / 2; }
inline int event_edge(ClockEvent e) { return static_cast<int>(e & 1); }

/// Defined clocks plus VIRTUAL, and the setup/hold relationship of every event pair.
struct ClockSet {
  std::vector<SdcClock> clocks;  // back() is VIRTUAL
  std::vector<double> setup_rel;  // [launch event * events + capture event], ps
  std::vector<double> hold_rel;
  bool window_capped = false;

  ClockId virtual_clock() const { return static_cast<ClockId>(clocks.size() - 1); }
  std::size_t num_events() const { return clocks.size() * 2; }
  double period(ClockId c) const { return clocks[c].period; }
  double edge_time(ClockEvent e) const;
  double setup(ClockEvent launch, ClockEvent capture) const { return setup_rel[launch * num_events() + capture]; }
  double hold(ClockEvent launch, ClockEvent capture) const { return hold_rel[launch * num_events() + capture]; }
  const std::string& name(ClockId c) const { return clocks[c].name; }
};

ClockSet build_clock_set(const Constraints& constraints);

/// Setup and hold relationship of one launch/capture edge pair, from integer femtosecond edge
/// expansion over the common period (capped at 64 times the larger period).
std::pair<double, double> clock_relationship(double launch_period, double launch_edge, double capture_period,
                                             double capture_edge, bool* capped = nullptr);

/// Clocks reaching a pin through the ideal clock network, with the polarity at the pin.
struct ClockArrival {
  ClockId clock;
  bool inverted;
  friend bool operator==(const ClockArrival&, const ClockArrival&) = default;
};

std::vector<std::vector<ClockArrival>> trace_clock_network(const TimingGraph& graph, const FlatNetlist& netlist,
                                                           const LibertyLibrary& lib, const Constraints& constraints);

/// One exception compiled into tag bits: an alive bit (the from side matched) followed by one
/// progress bit per -through segment.
struct CompiledException {
  ExceptionKind kind = ExceptionKind::false_path;
  bool setup = true, hold = true;
  int multiplier = 1;
  McpAnchor anchor = McpAnchor::by_default;
  double value = 0.0;
  std::uint32_t priority = 0;
  bool has_from = false;
  std::vector<PinId> from_pins;  // sorted
  std::vector<ClockId> from_clocks;
  std::vector<std::vector<PinId>> through;  // sorted per segment
  bool has_to = false;
  std::vector<PinId> to_pins;
  std::vector<ClockId> to_clocks;
  std::uint32_t bit = 0;  // alive bit; progress bits follow
};

struct TagKey {
  ClockEvent event = 0;
  std::vector<std::uint64_t> bits;
  friend bool operator==(const TagKey&, const TagKey&) = default;
  friend auto operator<=>(const TagKey& a, const TagKey& b) {
    if (auto c = a.event <=> b.event; c != 0) return c;
    return a.bits <=> b.bits;
  }
};

using TagId = std::uint32_t;

/// Interned tags. Ids below num_events() are the exception-free tags of each event. Safe for
/// concurrent intern/get.
class TagTable {
 public:
  TagTable(std::size_t num_events, std::size_t words);
  TagId intern(const TagKey& key);
  std::optional<TagId> find(const TagKey& key) const;
  const TagKey& get(TagId id) const;
  std::size_t words() const { return words_; }
  std::size_t size() const;

 private:
  struct Hash {
    std::size_t operator()(const TagKey& k) const;
  };
  static constexpr std::size_t kChunk = 4096;
  std::size_t words_;
  mutable std::mutex mutex_;
  std::size_t size_ = 0;
  // Fixed chunk table: readers index it without locking while other threads append.
  std::unique_ptr<std::unique_ptr<TagKey[]>[]> chunks_;
  std::unordered_map<TagKey, TagId, Hash> index_;
};

class ExceptionSet {
 public:
  ExceptionSet() = default;
  ExceptionSet(const Constraints& constraints, const FlatNetlist& netlist, const LibertyLibrary& lib,
               const TimingGraph& graph);

  const std::vector<CompiledException>& exceptions() const { return ex_; }
  std::size_t num_bits() const { return bits_; }
  std::size_t words() const { return (bits_ + 63) / 64; }
  bool empty() const { return ex_.empty(); }

  /// Tag of a path starting at `pin` launched by `event`, after matching the start pin itself.
  TagKey seed(PinId pin, ClockEvent event) const;
  /// Advances `key` on entering `pin`. Returns false when nothing changed.
  bool advance(TagKey& key, PinId pin) const;
  bool touches(PinId pin) const { return pin < through_offsets_.size() - 1 && through_offsets_[pin] != through_offsets_[pin + 1]; }

  struct Resolution {
    bool excluded = false;
    std::optional<double> fixed;  // max/min delay value
    int setup_multiplier = 1;     // from the winning setup multicycle
    McpAnchor setup_anchor = McpAnchor::end;
    int hold_multiplier = 0;
    McpAnchor hold_anchor = McpAnchor::start;
  };

  /// Winning exceptions for a path with tag bits `key` ending at `endpoint` captured by `capture`.
  Resolution resolve(const TagKey& key, PinId endpoint, ClockId capture, bool setup) const;

 private:
  bool matches(const CompiledException& x, const TagKey& key, PinId endpoint, ClockId capture) const;

  std::vector<CompiledException> ex_;
  std::size_t bits_ = 0;
  std::vector<std::uint32_t> through_offsets_{0};
  std::vector<std::pair<std::uint32_t, std::uint32_t>> through_index_;  // (exception, segment)
};

/// Arrivals of one tag at one pin, [mode][edge]. Missing edges are -inf late / +inf early.
struct TagEntry {
  TagId tag;
  ModeEdge<double> arr;
};

struct CaptureContext {
  ClockEvent event = 0;
  PinId clock_pin = kInvalidId;      // register endpoints
  bool has_setup = false, has_hold = false;
  std::array<double, 2> setup_margin{0, 0};  // per data edge
  std::array<double, 2> hold_margin{0, 0};
  std::array<double, 2> out_max{0, 0};  // output delay per edge
  std::array<double, 2> out_min{0, 0};
};

struct Endpoint {
  PinId pin;
  bool is_output = false;
  std::vector<CaptureContext> contexts;
};

enum class CheckMode : std::uint8_t { setup, hold };

struct TimingOptions {
  std::size_t tag_cap = 32;
};

struct TimingState {
  ClockSet clocks;
  ExceptionSet exceptions;
  std::unique_ptr<TagTable> tags;
  std::vector<std::vector<ClockArrival>> clock_at;
  std::vector<std::vector<TagEntry>> entries;  // per pin, sorted by tag key
  std::vector<std::uint8_t> is_clock_pin;      // register clock pins (startpoints)
  std::vector<Endpoint> endpoints;             // ascending pin
  std::vector<std::uint32_t> endpoint_of;      // pin -> endpoint index or kInvalidId
  std::vector<double> setup_slack;             // per endpoint, +inf when unconstrained
  std::vector<double> hold_slack;
  // Back-propagated required times per pin entry, [mode][edge]; late = setup, early = hold.
  std::vector<std::vector<ModeEdge<double>>> required;
  std::size_t unconstrained = 0;
  std::size_t tag_overflows = 0;

  const TagKey& tag(TagId id) const { return tags->get(id); }
  const TagEntry* find_entry(PinId pin, TagId tag) const;
};

/// Relationship of a tag at an endpoint, after exceptions. nullopt when the path is excluded.
std::optional<double> check_relation(const TimingState& st, const TagKey& key, const Endpoint& ep,
                                     const CaptureContext& ctx, CheckMode mode);

/// Required time of a data edge at an endpoint for one context, or nullopt when excluded.
std::optional<double> endpoint_required(const TimingState& st, const TagKey& key, const Endpoint& ep,
                                        const CaptureContext& ctx, CheckMode mode, int rf);

TimingState propagate_arrivals(const TimingGraph& graph, const FlatNetlist& netlist, const LibertyLibrary& lib,
                               const Constraints& constraints, const ArcTiming& arcs,
                               const TimingOptions& options = {});

void compute_required_and_slack(TimingState& state, const TimingGraph& graph, const FlatNetlist& netlist,
                                const LibertyLibrary& lib, const Constraints& constraints, const ArcTiming& arcs);

/// Full analysis: arrivals, endpoint slacks, back-propagated required times.
TimingState analyze(const TimingGraph& graph, const FlatNetlist& netlist, const LibertyLibrary& lib,
                    const Constraints& constraints, const ArcTiming& arcs, const TimingOptions& options = {});

struct WnsTns {
  double wns = kInf;
  double tns = 0.0;
  std::size_t endpoints = 0;
  std::size_t violations = 0;
};

/// With a clock filter only contexts captured by that clock count.
WnsTns wns_tns(const TimingState& state, CheckMode mode, std::optional<ClockId> clock = std::nullopt);
double endpoint_slack(const TimingState& state, std::size_t endpoint, CheckMode mode,
                      std::optional<ClockId> clock = std::nullopt);

/// Per-pin slack (required - arrival for setup, arrival - required for hold); +inf off any
/// constrained path.
std::vector<double> pin_slacks(const TimingState& state, CheckMode mode);

/// Which input edges of an edge feed output edge `out`. Returns the count written to `in`.
int edge_inputs(const TimingGraph& graph, const FlatNetlist& netlist, const LibertyLibrary& lib, EdgeId e, int out,
                int in[2]);

}  // namespace ministra
