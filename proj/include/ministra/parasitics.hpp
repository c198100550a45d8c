#pragma once

#include <string>
#include <vector>

#include "ministra/netlist.hpp"
#include "ministra/spef.hpp"

namespace ministra {

/// Grounded RC tree of one net. Node 0 is the driver. Caps are wire caps only; pin caps are
/// added by delay calculation.
struct RcNet {
  std::vector<double> cap;      // fF per node
  std::vector<PinId> node_pin;  // kInvalidId for internal nodes
  std::vector<std::uint32_t> res_a;
  std::vector<std::uint32_t> res_b;
  std::vector<double> res;  // kOhm

  std::size_t num_nodes() const { return cap.size(); }
  double total_cap() const;
  friend bool operator==(const RcNet&, const RcNet&) = default;
};

/// Parent pointers of an RcNet tree; `order` lists nodes root first so parents precede children.
struct RcTree {
  std::vector<std::uint32_t> parent;  // kInvalidId at the root
  std::vector<double> res;            // resistance to parent
  std::vector<std::uint32_t> order;
};

/// Fails with SemanticError if `rc` is not a connected tree rooted at node 0.
RcTree make_tree(const RcNet& rc);

/// Replaces resistor loops by a minimum-resistance spanning tree (drops the largest resistor of
/// each cycle) and clamps zero resistances. Returns the number of resistors removed. Throws if a
/// node is disconnected.
std::size_t reduce_to_tree(RcNet& rc, const std::string& net_name);

/// Per-net RC; nets without an entry fall back to lumped pin capacitance.
struct RcStore {
  std::vector<RcNet> nets;
  std::vector<std::uint8_t> present;

  explicit RcStore(std::size_t num_nets = 0) : nets(num_nets), present(num_nets, 0) {}
  bool has(NetId n) const { return n < present.size() && present[n]; }
  friend bool operator==(const RcStore&, const RcStore&) = default;
};

RcStore annotate_spef(const SpefData& spef, const FlatNetlist& netlist);

struct RcArrays {
  std::vector<std::uint32_t> net_node_offsets;  // nets + 1
  std::vector<double> node_cap;
  std::vector<std::uint32_t> node_pin;
  std::vector<std::uint32_t> net_res_offsets;  // nets + 1
  std::vector<std::uint32_t> res_a;            // net-local node indices
  std::vector<std::uint32_t> res_b;
  std::vector<double> res_kohm;
};

RcStore ingest_flat_rc(const RcArrays& arrays, const FlatNetlist& netlist, bool allow_loops = true);
RcArrays export_rc_arrays(const RcStore& store);
void write_rc_bundle(const std::string& dir, const RcStore& store);
RcArrays read_rc_bundle(const std::string& dir);

struct SteinerConfig {
  double unit_res_x = 0.0;  // kOhm per distance unit
  double unit_res_y = 0.0;
  double unit_cap_x = 0.0;  // fF per distance unit
  double unit_cap_y = 0.0;
};

struct PinPosition {
  PinId pin = kInvalidId;
  double x = 0.0;
  double y = 0.0;
};

/// Rectilinear spanning tree (Prim from the driver, ties to the smaller pin id), each edge
/// embedded as a horizontal-first L with a Steiner node at the bend.
RcNet build_steiner(std::vector<PinPosition> pins, PinId driver, const SteinerConfig& cfg);

/// Reads `<pin name> <x> <y>` lines and builds a Steiner RC for every net whose pins all have
/// positions.
RcStore build_steiner_all(const FlatNetlist& netlist, const std::string& positions_text, const SteinerConfig& cfg);

}  // namespace ministra
