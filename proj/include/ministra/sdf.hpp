#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ministra/types.hpp"

namespace ministra {

/// min:typ:max in ps; any part may be absent.
struct SdfValue {
  std::optional<double> min, typ, max;

  bool empty() const { return !min && !typ && !max; }
  /// min if present, else typ, else max.
  std::optional<double> early() const;
  /// max if present, else typ, else min.
  std::optional<double> late() const;

  static SdfValue early_late(double e, double l);
  friend bool operator==(const SdfValue&, const SdfValue&) = default;
};

enum class SdfEdge : std::uint8_t { none, posedge, negedge };

struct SdfIopath {
  std::string instance;
  std::string cell_type;
  std::string from_pin;
  SdfEdge from_edge = SdfEdge::none;
  std::string to_pin;
  SdfValue rise, fall;
  friend bool operator==(const SdfIopath&, const SdfIopath&) = default;
};

struct SdfInterconnect {
  std::string from;  // full hierarchical pin path, divider '/'
  std::string to;
  SdfValue rise, fall;
  friend bool operator==(const SdfInterconnect&, const SdfInterconnect&) = default;
};

struct SdfData {
  std::string version = "3.0";
  std::string design;
  double timescale_ps = 1.0;  // of the source file; values below are already in ps
  char divider = '/';
  std::vector<SdfIopath> iopaths;
  std::vector<SdfInterconnect> interconnects;
  std::size_t skipped = 0;

  bool operator==(const SdfData& o) const { return iopaths == o.iopaths && interconnects == o.interconnects; }
};

SdfData parse_sdf(std::string_view source, const std::string& name = "<sdf>");
SdfData parse_sdf_chunked(std::string_view source, std::size_t chunks, const std::string& name = "<sdf>");

/// Writes SDF 3.0 with TIMESCALE 1ps and 3-decimal values. IOPATHs are grouped into one CELL
/// per consecutive instance; interconnects go into a CELL for the design itself.
std::string format_sdf(const SdfData& data);

}  // namespace ministra
