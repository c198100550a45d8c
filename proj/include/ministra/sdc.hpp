#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ministra/liberty.hpp"
#include "ministra/netlist.hpp"
#include "ministra/tcl.hpp"

namespace ministra {

/// Objects named by an SDC argument. Cells are kept unexpanded; their meaning depends on the
/// position (from = clock pins, to = data pins, through = output pins).
struct NodeSet {
  std::vector<PinId> pins;
  std::vector<ClockId> clocks;
  std::vector<CellId> cells;

  bool empty() const { return pins.empty() && clocks.empty() && cells.empty(); }
  friend bool operator==(const NodeSet&, const NodeSet&) = default;
};

struct SdcClock {
  std::string name;
  double period = 0.0;  // ps
  double rise = 0.0;
  double fall = 0.0;
  std::vector<PinId> sources;  // empty for a virtual clock
  friend bool operator==(const SdcClock&, const SdcClock&) = default;
};

/// One input or output delay of a port relative to one clock edge. Unset components are NaN.
struct IoDelay {
  PinId pin = kInvalidId;
  ClockId clock = kInvalidId;  // kInvalidId: no clock
  bool clock_fall = false;
  bool is_input = true;
  ModeEdge<double> value;  // [mode][edge]

  friend bool operator==(const IoDelay& a, const IoDelay& b);
};

enum class ExceptionKind : std::uint8_t { false_path, multicycle, max_delay, min_delay };
enum class McpAnchor : std::uint8_t { by_default, start, end };

struct PathException {
  ExceptionKind kind = ExceptionKind::false_path;
  int multiplier = 1;       // multicycle
  bool setup = true;        // which checks the exception applies to
  bool hold = true;
  McpAnchor anchor = McpAnchor::by_default;
  double value = 0.0;       // max/min delay, ps
  NodeSet from;
  std::vector<NodeSet> through;
  NodeSet to;
  std::uint32_t priority = 0;  // declaration index
  std::size_t line = 0;
  friend bool operator==(const PathException&, const PathException&) = default;
};

struct CaseValue {
  PinId pin = kInvalidId;
  bool value = false;
  friend bool operator==(const CaseValue&, const CaseValue&) = default;
};

struct DisableTiming {
  PinId pin = kInvalidId;    // disables every arc touching the pin
  CellId cell = kInvalidId;  // or the cell's arcs, optionally filtered by Liberty pin names
  std::string from;
  std::string to;
  friend bool operator==(const DisableTiming&, const DisableTiming&) = default;
};

struct Constraints {
  double time_unit_ps = 1000.0;
  double cap_unit_ff = 1000.0;
  std::vector<SdcClock> clocks;
  std::vector<IoDelay> io_delays;
  std::vector<PathException> exceptions;
  std::vector<CaseValue> case_values;
  std::vector<DisableTiming> disables;
  std::map<PinId, ModeEdge<double>> input_slew;  // set_input_transition, NaN = unset
  std::map<PinId, double> port_load;             // set_load, fF

  ClockId find_clock(std::string_view name) const;

  friend bool operator==(const Constraints&, const Constraints&) = default;
};

/// Runs an SDC script. Units default to the library's; `set_units` overrides them.
Constraints eval_sdc(std::string_view script, const FlatNetlist& netlist, const LibertyLibrary& lib,
                     const std::string& file = "<sdc>");

enum class ObjectKind { ports, pins, cells, clocks, nets };

/// Glob match with `*` and `?`; a backslash makes the next character literal.
bool glob_match(std::string_view pattern, std::string_view text);

/// Object ids matching `pattern`, ascending.
std::vector<std::uint32_t> query_objects(ObjectKind kind, std::string_view pattern, const FlatNetlist& netlist,
                                         const Constraints& constraints);

}  // namespace ministra
