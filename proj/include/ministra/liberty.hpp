#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ministra/boolexpr.hpp"
#include "ministra/io.hpp"
#include "ministra/types.hpp"

namespace ministra {

/// NLDM table in internal units. For delay/transition tables index_1 is input slew (ps) and
/// index_2 is load (fF); for constraint tables index_1 is data slew and index_2 clock slew.
/// Either index may be empty (1-D or scalar). values are row-major over (index_1, index_2).
struct Lut2D {
  std::vector<double> index_1;
  std::vector<double> index_2;
  std::vector<double> values;

  std::size_t rows() const { return index_1.empty() ? 1 : index_1.size(); }
  std::size_t cols() const { return index_2.empty() ? 1 : index_2.size(); }
  double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }

  friend bool operator==(const Lut2D&, const Lut2D&) = default;
};

struct LutTemplate {
  std::string name;
  std::string variable_1;
  std::string variable_2;
  std::vector<double> index_1;  // already scaled by the unit of its variable
  std::vector<double> index_2;

  friend bool operator==(const LutTemplate&, const LutTemplate&) = default;
};

enum class TimingSense : std::uint8_t { positive_unate, negative_unate, non_unate };

enum class ArcKind : std::uint8_t {
  combinational,
  rising_edge_clk_to_q,
  falling_edge_clk_to_q,
  setup_rising,
  setup_falling,
  hold_rising,
  hold_falling,
};

bool is_check(ArcKind k);
bool is_setup(ArcKind k);
bool is_clock_to_q(ArcKind k);
/// The clock transition that triggers a clock-to-q or check arc.
RiseFall active_clock_edge(ArcKind k);
const char* to_string(ArcKind k);
const char* to_string(TimingSense s);

struct TimingArc {
  std::uint32_t from_pin = 0;  // index into LibertyCell::pins (the related pin)
  std::uint32_t to_pin = 0;
  TimingSense sense = TimingSense::non_unate;
  ArcKind kind = ArcKind::combinational;
  std::optional<BoolExpr> when;
  // Delay arcs.
  std::optional<Lut2D> cell_rise, cell_fall, rise_transition, fall_transition;
  // Check arcs.
  std::optional<Lut2D> rise_constraint, fall_constraint;

  friend bool operator==(const TimingArc&, const TimingArc&) = default;
};

struct LibertyPin {
  std::string name;
  PinDirection direction = PinDirection::input;
  double capacitance = 0.0;  // fF
  std::optional<double> max_capacitance;
  std::optional<BoolExpr> function;
  bool is_clock = false;

  friend bool operator==(const LibertyPin&, const LibertyPin&) = default;
};

struct LibertyCell {
  std::string name;
  std::vector<LibertyPin> pins;
  std::vector<TimingArc> arcs;
  bool is_sequential = false;
  std::vector<std::string> state_vars;  // ff/latch variables a pin function may reference

  std::optional<std::uint32_t> find_pin(std::string_view name) const;

  friend bool operator==(const LibertyCell&, const LibertyCell&) = default;
};

struct LibertyLibrary {
  std::string name;
  double time_unit_ps = 1000.0;  // declared time unit of the main (first) library, in ps
  double cap_unit_ff = 1000.0;
  double res_unit_kohm = 1.0;
  double slew_derate = 1.0;
  std::vector<LutTemplate> templates;  // sorted by name
  std::vector<LibertyCell> cells;      // sorted by name; LibCellId = index
  std::size_t skipped_groups = 0;
  std::size_t skipped_attributes = 0;

  const LibertyCell* find_cell(std::string_view name) const;
  std::optional<LibCellId> find_cell_id(std::string_view name) const;
  /// Smallest slew index over all delay tables; the default startpoint slew.
  double default_slew() const;

  friend bool operator==(const LibertyLibrary& a, const LibertyLibrary& b) {
    return a.templates == b.templates && a.cells == b.cells && a.slew_derate == b.slew_derate;
  }

 private:
  void build_index();
  std::unordered_map<std::string, LibCellId> cell_index_;
  friend LibertyLibrary parse_liberty(const std::vector<SourceText>& sources);
};

/// Parses and merges one or more Liberty files (each optionally gzipped). Files are parsed in
/// parallel; templates may come from a different file than the cells that use them.
LibertyLibrary parse_liberty(const std::vector<SourceText>& sources);
LibertyLibrary parse_liberty(std::string_view text, const std::string& name = "<liberty>");

/// Parses a unit string such as "1ns", "10ps", "1pf" (or the pair form "1,ff") into the
/// matching internal unit (ps, fF, kOhm).
double liberty_time_unit_ps(std::string_view text);
double liberty_cap_unit_ff(double mult, std::string_view unit);
double liberty_res_unit_kohm(std::string_view text);

}  // namespace ministra
