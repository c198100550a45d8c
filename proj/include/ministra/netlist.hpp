#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ministra/liberty.hpp"
#include "ministra/types.hpp"
#include "ministra/verilog.hpp"

namespace ministra {

/// Flattened netlist. Port pins come first (owner kPortOwner), then the pins of every cell in
/// cell order and Liberty pin order. Hierarchical names are joined with '/'.
struct FlatNetlist {
  std::string design;

  std::vector<LibCellId> cell_lib;
  std::vector<std::string> cell_names;

  std::vector<CellId> pin_cell;
  std::vector<std::uint32_t> pin_lib_pin;  // Liberty pin index; kInvalidId for ports
  std::vector<NetId> pin_net;              // kInvalidId when unconnected
  std::vector<PinDirection> pin_dir;
  std::vector<std::string> pin_names;

  std::vector<std::string> net_names;
  std::vector<PinId> net_driver;  // kInvalidId when undriven
  std::vector<std::uint32_t> net_pin_offsets{0};
  std::vector<PinId> net_pins;
  std::vector<std::uint32_t> cell_pin_offsets{0};
  std::vector<PinId> cell_pins;

  std::vector<PinId> const_pins;  // pins tied to a constant net
  std::vector<std::uint8_t> const_vals;

  std::size_t num_cells() const { return cell_lib.size(); }
  std::size_t num_pins() const { return pin_cell.size(); }
  std::size_t num_nets() const { return net_names.size(); }
  std::size_t num_ports() const { return num_ports_; }

  bool is_port(PinId p) const { return pin_cell[p] == kPortOwner; }
  /// Pins that launch a signal onto their net: cell outputs and input/inout ports.
  bool is_driver(PinId p) const;

  PinId find_pin(std::string_view name) const;
  CellId find_cell(std::string_view name) const;
  NetId find_net(std::string_view name) const;
  /// Port pin by port name, or kInvalidId.
  PinId find_port(std::string_view name) const;

  /// Derives drivers, the cell->pin CSR and lookup maps, then checks every invariant.
  void finalize();

  bool operator==(const FlatNetlist& o) const;

 private:
  std::size_t num_ports_ = 0;
  std::unordered_map<std::string, PinId> pin_index_;
  std::unordered_map<std::string, CellId> cell_index_;
  std::unordered_map<std::string, NetId> net_index_;
};

/// Flattens `design` below `top` (empty = the unique uninstantiated module).
FlatNetlist elaborate(const VerilogDesign& design, const LibertyLibrary& lib, const std::string& top = "");

/// External CSR bundle. Ids are used as-is; only derived indices are rebuilt.
struct NetlistArrays {
  std::vector<std::uint32_t> cell_lib;
  std::vector<std::uint32_t> pin_cell;
  std::vector<std::uint32_t> pin_lib_pin;
  std::vector<std::uint32_t> pin_net;
  std::vector<std::uint32_t> pin_dir;  // optional for cell pins (taken from Liberty when empty)
  std::vector<std::uint32_t> net_pin_offsets;
  std::vector<std::uint32_t> net_pins;
  std::vector<std::uint32_t> const_pins;
  std::vector<std::uint32_t> const_vals;
  std::vector<std::string> cell_names;  // optional
  std::vector<std::string> net_names;   // optional
  std::vector<std::string> port_names;  // optional, port pin order
};

FlatNetlist ingest_flat(const NetlistArrays& arrays, const LibertyLibrary& lib);
NetlistArrays export_netlist_arrays(const FlatNetlist& n);

void write_netlist_bundle(const std::string& dir, const FlatNetlist& n);
NetlistArrays read_netlist_bundle(const std::string& dir);

/// Little-endian u32/f64 array files shared by every bundle.
void write_u32(const std::string& path, const std::vector<std::uint32_t>& v);
std::vector<std::uint32_t> read_u32(const std::string& path);
void write_f64(const std::string& path, const std::vector<double>& v);
std::vector<double> read_f64(const std::string& path);
void write_lines(const std::string& path, const std::vector<std::string>& v);
std::vector<std::string> read_lines(const std::string& path);

}  // namespace ministra
