#include "ministra/netlist.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>

#include "ministra/io.hpp"
#include "ministra/log.hpp"

namespace ministra {

bool FlatNetlist::is_driver(PinId p) const {
  const PinDirection d = pin_dir[p];
  if (is_port(p)) return d == PinDirection::input || d == PinDirection::inout;
  return d == PinDirection::output || d == PinDirection::inout;
}

PinId FlatNetlist::find_pin(std::string_view name) const {
  auto it = pin_index_.find(std::string(name));
  return it == pin_index_.end() ? kInvalidId : it->second;
}
CellId FlatNetlist::find_cell(std::string_view name) const {
  auto it = cell_index_.find(std::string(name));
  return it == cell_index_.end() ? kInvalidId : it->second;
}
NetId FlatNetlist::find_net(std::string_view name) const {
  auto it = net_index_.find(std::string(name));
  return it == net_index_.end() ? kInvalidId : it->second;
}
PinId FlatNetlist::find_port(std::string_view name) const {
  PinId p = find_pin(name);
  return p != kInvalidId && is_port(p) ? p : kInvalidId;
}

bool FlatNetlist::operator==(const FlatNetlist& o) const {
  return cell_lib == o.cell_lib && cell_names == o.cell_names && pin_cell == o.pin_cell &&
         pin_lib_pin == o.pin_lib_pin && pin_net == o.pin_net && pin_dir == o.pin_dir && pin_names == o.pin_names &&
         net_names == o.net_names && net_driver == o.net_driver && net_pin_offsets == o.net_pin_offsets &&
         net_pins == o.net_pins && cell_pin_offsets == o.cell_pin_offsets && cell_pins == o.cell_pins &&
         const_pins == o.const_pins && const_vals == o.const_vals;
}

void FlatNetlist::finalize() {
  const std::size_t np = num_pins();
  const std::size_t nn = num_nets();
  const std::size_t nc = num_cells();
  if (pin_lib_pin.size() != np || pin_net.size() != np || pin_dir.size() != np || pin_names.size() != np)
    throw SemanticError("netlist: pin arrays have different lengths");
  if (cell_names.size() != nc) throw SemanticError("netlist: cell arrays have different lengths");
  if (net_pin_offsets.size() != nn + 1) throw SemanticError("netlist: net offsets length must be net count + 1");
  if (net_pin_offsets.front() != 0 || net_pin_offsets.back() != net_pins.size())
    throw SemanticError("netlist: net offsets do not span the net-pin array");
  for (std::size_t i = 0; i < nn; ++i)
    if (net_pin_offsets[i] > net_pin_offsets[i + 1])
      throw SemanticError(fmt::format("netlist: net offsets not monotone at net {}", i));

  num_ports_ = 0;
  for (PinId p = 0; p < np; ++p) {
    if (pin_cell[p] == kPortOwner) {
      if (p != num_ports_) throw SemanticError(fmt::format("netlist: port pin {} follows a cell pin", p));
      ++num_ports_;
    } else if (pin_cell[p] >= nc) {
      throw SemanticError(fmt::format("netlist: pin {} references cell {} out of range", p, pin_cell[p]));
    }
    if (pin_net[p] != kInvalidId && pin_net[p] >= nn)
      throw SemanticError(fmt::format("netlist: pin {} references net {} out of range", p, pin_net[p]));
  }

  std::vector<std::uint8_t> seen(np, 0);
  net_driver.assign(nn, kInvalidId);
  for (NetId n = 0; n < nn; ++n) {
    for (std::uint32_t k = net_pin_offsets[n]; k < net_pin_offsets[n + 1]; ++k) {
      PinId p = net_pins[k];
      if (p >= np) throw SemanticError(fmt::format("netlist: net {} lists pin {} out of range", n, p));
      if (pin_net[p] != n)
        throw SemanticError(fmt::format("netlist: pin {} is listed on net {} but references net {}", p, n,
                                        pin_net[p] == kInvalidId ? -1 : static_cast<long>(pin_net[p])));
      if (seen[p]) throw SemanticError(fmt::format("netlist: pin {} appears twice in net lists", p));
      seen[p] = 1;
      if (is_driver(p)) {
        if (net_driver[n] != kInvalidId)
          throw SemanticError(fmt::format("netlist: net '{}' is driven by both '{}' and '{}'", net_names[n],
                                          pin_names[net_driver[n]], pin_names[p]));
        net_driver[n] = p;
      }
    }
  }
  for (PinId p = 0; p < np; ++p)
    if (pin_net[p] != kInvalidId && !seen[p])
      throw SemanticError(fmt::format("netlist: pin {} references net {} but is missing from its pin list", p, pin_net[p]));

  cell_pin_offsets.assign(nc + 1, 0);
  for (PinId p = num_ports_; p < np; ++p) ++cell_pin_offsets[pin_cell[p] + 1];
  for (std::size_t c = 0; c < nc; ++c) cell_pin_offsets[c + 1] += cell_pin_offsets[c];
  cell_pins.assign(np - num_ports_, 0);
  {
    std::vector<std::uint32_t> fill(cell_pin_offsets.begin(), cell_pin_offsets.end() - 1);
    for (PinId p = num_ports_; p < np; ++p) cell_pins[fill[pin_cell[p]]++] = p;
  }

  if (const_pins.size() != const_vals.size()) throw SemanticError("netlist: constant arrays have different lengths");
  for (std::size_t i = 0; i < const_pins.size(); ++i) {
    if (const_pins[i] >= np) throw SemanticError(fmt::format("netlist: constant pin {} out of range", const_pins[i]));
    if (const_vals[i] > 1) throw SemanticError(fmt::format("netlist: constant pin {} has value {}", const_pins[i], const_vals[i]));
  }

  pin_index_.clear();
  cell_index_.clear();
  net_index_.clear();
  pin_index_.reserve(np);
  for (PinId p = 0; p < np; ++p) pin_index_.emplace(pin_names[p], p);
  for (CellId c = 0; c < nc; ++c) cell_index_.emplace(cell_names[c], c);
  for (NetId n = 0; n < nn; ++n) net_index_.emplace(net_names[n], n);
}

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;
  std::uint32_t make() {
    parent.push_back(static_cast<std::uint32_t>(parent.size()));
    return parent.back();
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

constexpr std::uint32_t kConst0 = 0;
constexpr std::uint32_t kConst1 = 1;

struct PendingCell {
  std::string name;
  LibCellId lib;
  std::vector<std::int64_t> pin_nodes;  // per Liberty pin, -1 = unconnected
};

class Elaborator {
 public:
  Elaborator(const VerilogDesign& d, const LibertyLibrary& lib) : d_(d), lib_(lib) {
    node(std::string("1'b0"), 0);
    node(std::string("1'b1"), 0);
  }

  FlatNetlist run(const std::string& top_name) {
    const VModule* top = pick_top(top_name);
    for (const auto& m : d_.modules)
      if (!module_index_.emplace(m.name, &m).second) throw SemanticError(fmt::format("module '{}' defined twice", m.name));

    std::vector<const VModule*> stack;
    auto& top_nets = elab(*top, "", 0, stack);

    FlatNetlist out;
    out.design = top->name;
    std::vector<std::int64_t> pin_node;
    for (const auto& port : top->port_order) {
      const VNetDecl* d = top->find_decl(port);
      if (!d || d->kind == NetKind::wire)
        throw SemanticError(fmt::format("port '{}' of module '{}' has no direction", port, top->name));
      const auto& bits = top_nets.at(port);
      auto idx = d->range ? d->range->bits() : std::vector<int>{0};
      for (std::size_t i = 0; i < bits.size(); ++i) {
        out.pin_cell.push_back(kPortOwner);
        out.pin_lib_pin.push_back(kInvalidId);
        out.pin_dir.push_back(d->kind == NetKind::input    ? PinDirection::input
                              : d->kind == NetKind::output ? PinDirection::output
                                                           : PinDirection::inout);
        out.pin_names.push_back(d->range ? fmt::format("{}[{}]", port, idx[i]) : port);
        pin_node.push_back(bits[i]);
      }
    }
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      const auto& pc = cells_[c];
      const LibertyCell& lc = lib_.cells[pc.lib];
      out.cell_lib.push_back(pc.lib);
      out.cell_names.push_back(pc.name);
      for (std::size_t k = 0; k < lc.pins.size(); ++k) {
        out.pin_cell.push_back(static_cast<CellId>(c));
        out.pin_lib_pin.push_back(static_cast<std::uint32_t>(k));
        out.pin_dir.push_back(lc.pins[k].direction);
        out.pin_names.push_back(pc.name + "/" + lc.pins[k].name);
        pin_node.push_back(pc.pin_nodes[k]);
      }
    }

    // Nets are the union-find classes that own at least one pin, ordered by their first pin.
    const std::size_t np = out.pin_cell.size();
    std::unordered_map<std::uint32_t, NetId> class_net;
    out.pin_net.assign(np, kInvalidId);
    std::vector<std::uint32_t> net_class;
    for (PinId p = 0; p < np; ++p) {
      if (pin_node[p] < 0) continue;
      std::uint32_t r = uf_.find(static_cast<std::uint32_t>(pin_node[p]));
      auto [it, fresh] = class_net.emplace(r, static_cast<NetId>(net_class.size()));
      if (fresh) net_class.push_back(r);
      out.pin_net[p] = it->second;
    }
    const std::size_t nn = net_class.size();
    std::vector<std::uint32_t> best(nn, kInvalidId);
    for (std::uint32_t x = 0; x < names_.size(); ++x) {
      auto it = class_net.find(uf_.find(x));
      if (it == class_net.end()) continue;
      std::uint32_t& b = best[it->second];
      if (b == kInvalidId || depth_[x] < depth_[b]) b = x;
    }
    const std::uint32_t c0 = uf_.find(kConst0), c1 = uf_.find(kConst1);
    if (c0 == c1) throw SemanticError("constant 0 and constant 1 are shorted together");
    out.net_names.resize(nn);
    for (NetId n = 0; n < nn; ++n) {
      std::uint32_t r = net_class[n];
      out.net_names[n] = r == c0 ? "1'b0" : r == c1 ? "1'b1" : names_[best[n]];
    }
    // Keep net names unique: two classes can share a base name only through hierarchy aliases.
    {
      std::unordered_map<std::string, int> used;
      for (auto& nm : out.net_names) {
        int& k = used[nm];
        if (k++ > 0) nm = fmt::format("{}#{}", nm, k - 1);
      }
    }
    std::vector<std::uint32_t> counts(nn + 1, 0);
    for (PinId p = 0; p < np; ++p)
      if (out.pin_net[p] != kInvalidId) ++counts[out.pin_net[p] + 1];
    for (NetId n = 0; n < nn; ++n) counts[n + 1] += counts[n];
    out.net_pin_offsets = counts;
    out.net_pins.assign(counts.back(), 0);
    for (PinId p = 0; p < np; ++p)
      if (out.pin_net[p] != kInvalidId) out.net_pins[counts[out.pin_net[p]]++] = p;

    for (PinId p = 0; p < np; ++p) {
      if (out.pin_net[p] == kInvalidId) continue;
      std::uint32_t r = net_class[out.pin_net[p]];
      if (r != c0 && r != c1) continue;
      bool drives = out.pin_cell[p] == kPortOwner
                        ? out.pin_dir[p] != PinDirection::output
                        : out.pin_dir[p] == PinDirection::output || out.pin_dir[p] == PinDirection::inout;
      if (drives)
        throw SemanticError(fmt::format("pin '{}' drives a net tied to constant {}", out.pin_names[p], r == c0 ? 0 : 1));
      out.const_pins.push_back(p);
      out.const_vals.push_back(r == c0 ? 0 : 1);
    }
    out.finalize();
    return out;
  }

 private:
  using NetMap = std::unordered_map<std::string, std::vector<std::uint32_t>>;

  std::uint32_t node(std::string name, int depth) {
    names_.push_back(std::move(name));
    depth_.push_back(depth);
    return uf_.make();
  }

  const VNetDecl* find_decl(const VModule& m, const std::string& name) {
    auto [it, fresh] = decl_index_.try_emplace(&m);
    if (fresh)
      for (const auto& d : m.decls) it->second.emplace(d.name, &d);
    auto f = it->second.find(name);
    return f == it->second.end() ? nullptr : f->second;
  }

  const VModule* pick_top(const std::string& top_name) {
    if (!top_name.empty()) {
      const VModule* m = d_.find_module(top_name);
      if (!m) throw SemanticError(fmt::format("top module '{}' not found", top_name));
      return m;
    }
    std::unordered_map<std::string, bool> used;
    for (const auto& m : d_.modules)
      for (const auto& i : m.instances) used[i.module] = true;
    std::vector<const VModule*> roots;
    for (const auto& m : d_.modules)
      if (!used.count(m.name)) roots.push_back(&m);
    if (roots.size() == 1) return roots[0];
    if (roots.empty()) throw SemanticError("no top module: every module is instantiated");
    std::string list;
    for (auto* r : roots) list += (list.empty() ? "" : ", ") + r->name;
    throw SemanticError(fmt::format("ambiguous top module ({}); pass --top", list));
  }

  std::vector<std::uint32_t>& declare(NetMap& nets, const std::string& prefix, int depth, const std::string& name,
                                      const std::optional<VRange>& range, NetKind kind) {
    auto& bits = nets[name];
    if (!bits.empty()) return bits;
    if (range) {
      for (int i : range->bits()) bits.push_back(node(fmt::format("{}{}[{}]", prefix, name, i), depth));
    } else {
      bits.push_back(node(prefix + name, depth));
    }
    if (kind == NetKind::supply0 || kind == NetKind::supply1)
      for (auto b : bits) uf_.unite(b, kind == NetKind::supply0 ? kConst0 : kConst1);
    return bits;
  }

  // Bits of an expression, msb first.
  std::vector<std::uint32_t> bits_of(const VExpr& e, NetMap& nets, const VModule& m, const std::string& prefix,
                                     int depth) {
    std::vector<std::uint32_t> out;
    switch (e.kind) {
      case VExpr::Kind::empty:
        break;
      case VExpr::Kind::constant:
        for (char c : e.const_bits)
          out.push_back(c == '0' ? kConst0 : c == '1' ? kConst1 : node(prefix + "$x", depth));
        break;
      case VExpr::Kind::concat:
        for (const auto& it : e.items) {
          auto b = bits_of(it, nets, m, prefix, depth);
          out.insert(out.end(), b.begin(), b.end());
        }
        break;
      case VExpr::Kind::ref: {
        const VNetDecl* d = find_decl(m, e.name);
        auto it = nets.find(e.name);
        if (it == nets.end()) {
          if (e.select) throw SemanticError(fmt::format("module '{}': undeclared bus '{}'", m.name, e.name));
          declare(nets, prefix, depth, e.name, std::nullopt, NetKind::wire);
          it = nets.find(e.name);
          d = nullptr;
        }
        const auto& all = it->second;
        if (!e.select) return all;
        if (!d || !d->range) {
          if (e.select->msb == 0 && e.select->lsb == 0 && all.size() == 1) return all;
          throw SemanticError(fmt::format("module '{}': '{}' is not a bus", m.name, e.name));
        }
        const VRange& r = *d->range;
        auto pos = [&](int i) -> std::size_t {
          bool inside = r.msb >= r.lsb ? (i <= r.msb && i >= r.lsb) : (i >= r.msb && i <= r.lsb);
          if (!inside) throw SemanticError(fmt::format("module '{}': index {} out of range for '{}'", m.name, i, e.name));
          return static_cast<std::size_t>(r.msb >= r.lsb ? r.msb - i : i - r.msb);
        };
        for (int i : e.select->bits()) out.push_back(all[pos(i)]);
        break;
      }
    }
    return out;
  }

  static std::vector<std::uint32_t> fit(std::vector<std::uint32_t> bits, std::size_t width, const VExpr& e, bool& ok) {
    ok = true;
    if (bits.size() == width) return bits;
    // Only unsized/sized constants are resized; anything else is a width mismatch.
    if (e.kind != VExpr::Kind::constant) {
      ok = false;
      return bits;
    }
    if (bits.size() > width) return std::vector<std::uint32_t>(bits.end() - static_cast<long>(width), bits.end());
    std::vector<std::uint32_t> out(width - bits.size(), kConst0);
    out.insert(out.end(), bits.begin(), bits.end());
    return out;
  }

  NetMap& elab(const VModule& m, const std::string& prefix, int depth, std::vector<const VModule*>& stack) {
    if (std::find(stack.begin(), stack.end(), &m) != stack.end())
      throw SemanticError(fmt::format("module '{}' instantiates itself", m.name));
    stack.push_back(&m);
    frames_.push_back(std::make_unique<NetMap>());
    NetMap& nets = *frames_.back();
    for (const auto& d : m.decls) declare(nets, prefix, depth, d.name, d.range, d.kind);
    for (const auto& p : m.port_order)
      if (!find_decl(m, p)) declare(nets, prefix, depth, p, std::nullopt, NetKind::wire);

    for (const auto& a : m.assigns) {
      auto l = bits_of(a.lhs, nets, m, prefix, depth);
      auto r = bits_of(a.rhs, nets, m, prefix, depth);
      bool ok = true;
      r = fit(std::move(r), l.size(), a.rhs, ok);
      if (!ok)
        throw SemanticError(fmt::format("module '{}': assign width mismatch ({} vs {})", m.name, l.size(), r.size()));
      for (std::size_t i = 0; i < l.size(); ++i) uf_.unite(r[i], l[i]);
    }

    for (const auto& inst : m.instances) {
      const std::string ipath = prefix + inst.name;
      if (auto sub_it = module_index_.find(inst.module); sub_it != module_index_.end()) {
        const VModule& sub = *sub_it->second;
        NetMap& sub_nets = elab(sub, ipath + "/", depth + 1, stack);
        for (std::size_t k = 0; k < inst.connections.size(); ++k) {
          const auto& c = inst.connections[k];
          std::string port;
          if (c.port.empty()) {
            if (k >= sub.port_order.size())
              throw SemanticError(fmt::format("{}: too many connections to '{}'", ipath, sub.name));
            port = sub.port_order[k];
          } else {
            port = c.port;
            if (std::find(sub.port_order.begin(), sub.port_order.end(), port) == sub.port_order.end())
              throw SemanticError(fmt::format("{}: module '{}' has no port '{}'", ipath, sub.name, port));
          }
          if (c.expr.kind == VExpr::Kind::empty) continue;
          const auto& formal = sub_nets.at(port);
          bool ok = true;
          auto actual = fit(bits_of(c.expr, nets, m, prefix, depth), formal.size(), c.expr, ok);
          if (!ok)
            throw SemanticError(fmt::format("{}: width mismatch on port '{}' ({} vs {})", ipath, port, formal.size(),
                                            actual.size()));
          for (std::size_t i = 0; i < formal.size(); ++i) uf_.unite(actual[i], formal[i]);
        }
        continue;
      }
      auto lib_id = lib_.find_cell_id(inst.module);
      if (!lib_id)
        throw SemanticError(fmt::format("{}: '{}' is neither a module nor a library cell (line {})", ipath, inst.module,
                                        inst.line));
      const LibertyCell& lc = lib_.cells[*lib_id];
      PendingCell pc{ipath, *lib_id, std::vector<std::int64_t>(lc.pins.size(), -1)};
      for (std::size_t k = 0; k < inst.connections.size(); ++k) {
        const auto& c = inst.connections[k];
        std::uint32_t pin_idx;
        if (c.port.empty()) {
          if (k >= lc.pins.size()) throw SemanticError(fmt::format("{}: too many connections to '{}'", ipath, lc.name));
          pin_idx = static_cast<std::uint32_t>(k);
        } else {
          auto f = lc.find_pin(c.port);
          if (!f) throw SemanticError(fmt::format("{}: cell '{}' has no pin '{}'", ipath, lc.name, c.port));
          pin_idx = *f;
        }
        if (c.expr.kind == VExpr::Kind::empty) continue;
        bool ok = true;
        auto b = fit(bits_of(c.expr, nets, m, prefix, depth), 1, c.expr, ok);
        if (!ok)
          throw SemanticError(fmt::format("{}: width mismatch on pin '{}' ({} bits)", ipath, lc.pins[pin_idx].name, b.size()));
        if (pc.pin_nodes[pin_idx] >= 0)
          throw SemanticError(fmt::format("{}: pin '{}' connected twice", ipath, lc.pins[pin_idx].name));
        pc.pin_nodes[pin_idx] = b[0];
      }
      cells_.push_back(std::move(pc));
    }
    stack.pop_back();
    return nets;
  }

  const VerilogDesign& d_;
  const LibertyLibrary& lib_;
  std::unordered_map<std::string, const VModule*> module_index_;
  UnionFind uf_;
  std::vector<std::string> names_;
  std::vector<int> depth_;
  std::vector<PendingCell> cells_;
  std::vector<std::unique_ptr<NetMap>> frames_;
  std::unordered_map<const VModule*, std::unordered_map<std::string_view, const VNetDecl*>> decl_index_;
};

}  // namespace

FlatNetlist elaborate(const VerilogDesign& design, const LibertyLibrary& lib, const std::string& top) {
  Elaborator e(design, lib);
  return e.run(top.empty() ? design.top : top);
}

FlatNetlist ingest_flat(const NetlistArrays& a, const LibertyLibrary& lib) {
  FlatNetlist n;
  const std::size_t np = a.pin_cell.size();
  const std::size_t nc = a.cell_lib.size();
  if (a.pin_lib_pin.size() != np || a.pin_net.size() != np)
    throw SemanticError("netlist bundle: pin arrays have different lengths");
  if (!a.pin_dir.empty() && a.pin_dir.size() != np) throw SemanticError("netlist bundle: pin_dir length mismatch");
  if (a.net_pin_offsets.empty()) throw SemanticError("netlist bundle: empty net offsets");
  const std::size_t nn = a.net_pin_offsets.size() - 1;
  for (std::size_t c = 0; c < nc; ++c)
    if (a.cell_lib[c] >= lib.cells.size())
      throw SemanticError(fmt::format("netlist bundle: cell {} references library cell {} out of range", c, a.cell_lib[c]));
  n.cell_lib = a.cell_lib;
  n.cell_names = a.cell_names;
  if (n.cell_names.empty())
    for (std::size_t c = 0; c < nc; ++c) n.cell_names.push_back(fmt::format("c{}", c));
  if (n.cell_names.size() != nc) throw SemanticError("netlist bundle: cell name count mismatch");
  n.pin_cell = a.pin_cell;
  n.pin_lib_pin = a.pin_lib_pin;
  n.pin_net = a.pin_net;
  n.pin_dir.resize(np);
  n.pin_names.resize(np);
  std::size_t port = 0;
  for (PinId p = 0; p < np; ++p) {
    if (a.pin_cell[p] == kPortOwner) {
      if (a.pin_dir.empty()) throw SemanticError(fmt::format("netlist bundle: port pin {} needs a direction", p));
      n.pin_names[p] = port < a.port_names.size() ? a.port_names[port] : fmt::format("p{}", port);
      ++port;
    } else {
      if (a.pin_cell[p] >= nc)
        throw SemanticError(fmt::format("netlist bundle: pin {} references cell {} out of range", p, a.pin_cell[p]));
      const LibertyCell& lc = lib.cells[a.cell_lib[a.pin_cell[p]]];
      if (a.pin_lib_pin[p] >= lc.pins.size())
        throw SemanticError(fmt::format("netlist bundle: pin {} references library pin {} out of range", p, a.pin_lib_pin[p]));
      n.pin_names[p] = n.cell_names[a.pin_cell[p]] + "/" + lc.pins[a.pin_lib_pin[p]].name;
      if (a.pin_dir.empty()) n.pin_dir[p] = lc.pins[a.pin_lib_pin[p]].direction;
    }
    if (!a.pin_dir.empty()) {
      if (a.pin_dir[p] > 3) throw SemanticError(fmt::format("netlist bundle: pin {} has bad direction {}", p, a.pin_dir[p]));
      n.pin_dir[p] = static_cast<PinDirection>(a.pin_dir[p]);
    }
    if (a.pin_net[p] != kInvalidId && a.pin_net[p] >= nn)
      throw SemanticError(fmt::format("netlist bundle: pin {} references net {} out of range", p, a.pin_net[p]));
  }
  n.net_names = a.net_names;
  if (n.net_names.empty())
    for (std::size_t i = 0; i < nn; ++i) n.net_names.push_back(fmt::format("n{}", i));
  if (n.net_names.size() != nn) throw SemanticError("netlist bundle: net name count mismatch");
  n.net_pin_offsets = a.net_pin_offsets;
  n.net_pins = a.net_pins;
  n.const_pins = a.const_pins;
  n.const_vals.assign(a.const_vals.begin(), a.const_vals.end());
  for (auto v : a.const_vals)
    if (v > 1) throw SemanticError("netlist bundle: constant value must be 0 or 1");
  n.finalize();
  return n;
}

NetlistArrays export_netlist_arrays(const FlatNetlist& n) {
  NetlistArrays a;
  a.cell_lib = n.cell_lib;
  a.pin_cell = n.pin_cell;
  a.pin_lib_pin = n.pin_lib_pin;
  a.pin_net = n.pin_net;
  for (auto d : n.pin_dir) a.pin_dir.push_back(static_cast<std::uint32_t>(d));
  a.net_pin_offsets = n.net_pin_offsets;
  a.net_pins = n.net_pins;
  a.const_pins = n.const_pins;
  a.const_vals.assign(n.const_vals.begin(), n.const_vals.end());
  a.cell_names = n.cell_names;
  a.net_names = n.net_names;
  for (PinId p = 0; p < n.num_ports(); ++p) a.port_names.push_back(n.pin_names[p]);
  return a;
}

namespace {
template <typename T>
void write_pod(const std::string& path, const std::vector<T>& v) {
  std::string bytes(v.size() * sizeof(T), '\0');
  if (!v.empty()) std::memcpy(bytes.data(), v.data(), bytes.size());
  write_file(path, bytes);
}
template <typename T>
std::vector<T> read_pod(const std::string& path) {
  std::string bytes = read_file_raw(path);
  if (bytes.size() % sizeof(T) != 0) throw Error(fmt::format("{}: size {} is not a multiple of {}", path, bytes.size(), sizeof(T)));
  std::vector<T> v(bytes.size() / sizeof(T));
  if (!v.empty()) std::memcpy(v.data(), bytes.data(), bytes.size());
  return v;
}
}  // namespace

void write_u32(const std::string& path, const std::vector<std::uint32_t>& v) { write_pod(path, v); }
std::vector<std::uint32_t> read_u32(const std::string& path) { return read_pod<std::uint32_t>(path); }
void write_f64(const std::string& path, const std::vector<double>& v) { write_pod(path, v); }
std::vector<double> read_f64(const std::string& path) { return read_pod<double>(path); }

void write_lines(const std::string& path, const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) {
    out += s;
    out += '\n';
  }
  write_file(path, out);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::string text = read_file_raw(path);
  std::vector<std::string> out;
  std::size_t b = 0;
  while (b < text.size()) {
    std::size_t e = text.find('\n', b);
    if (e == std::string::npos) e = text.size();
    out.emplace_back(text.substr(b, e - b));
    b = e + 1;
  }
  return out;
}

void write_netlist_bundle(const std::string& dir, const FlatNetlist& n) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  NetlistArrays a = export_netlist_arrays(n);
  auto p = [&](const char* f) { return (fs::path(dir) / f).string(); };
  write_u32(p("cell_lib.u32"), a.cell_lib);
  write_u32(p("pin_cell.u32"), a.pin_cell);
  write_u32(p("pin_lib_pin.u32"), a.pin_lib_pin);
  write_u32(p("pin_net.u32"), a.pin_net);
  write_u32(p("pin_dir.u32"), a.pin_dir);
  write_u32(p("net_pin_offsets.u32"), a.net_pin_offsets);
  write_u32(p("net_pins.u32"), a.net_pins);
  write_u32(p("const_pins.u32"), a.const_pins);
  write_u32(p("const_vals.u32"), a.const_vals);
  write_lines(p("cell_names.txt"), a.cell_names);
  write_lines(p("net_names.txt"), a.net_names);
  write_lines(p("port_names.txt"), a.port_names);
  nlohmann::json m = {{"format", "ministra-netlist"},
                      {"version", 1},
                      {"design", n.design},
                      {"cells", n.num_cells()},
                      {"pins", n.num_pins()},
                      {"nets", n.num_nets()},
                      {"ports", n.num_ports()}};
  write_file(p("manifest.json"), m.dump(2) + "\n");
}

NetlistArrays read_netlist_bundle(const std::string& dir) {
  namespace fs = std::filesystem;
  auto p = [&](const char* f) { return (fs::path(dir) / f).string(); };
  auto opt_u32 = [&](const char* f) { return fs::exists(p(f)) ? read_u32(p(f)) : std::vector<std::uint32_t>{}; };
  auto opt_lines = [&](const char* f) { return fs::exists(p(f)) ? read_lines(p(f)) : std::vector<std::string>{}; };
  if (fs::exists(p("manifest.json"))) {
    auto m = nlohmann::json::parse(read_file_raw(p("manifest.json")));
    if (m.value("version", 0) != 1) throw Error(fmt::format("{}: unsupported netlist bundle version", dir));
  }
  NetlistArrays a;
  a.cell_lib = read_u32(p("cell_lib.u32"));
  a.pin_cell = read_u32(p("pin_cell.u32"));
  a.pin_lib_pin = read_u32(p("pin_lib_pin.u32"));
  a.pin_net = read_u32(p("pin_net.u32"));
  a.pin_dir = opt_u32("pin_dir.u32");
  a.net_pin_offsets = read_u32(p("net_pin_offsets.u32"));
  a.net_pins = read_u32(p("net_pins.u32"));
  a.const_pins = opt_u32("const_pins.u32");
  a.const_vals = opt_u32("const_vals.u32");
  a.cell_names = opt_lines("cell_names.txt");
  a.net_names = opt_lines("net_names.txt");
  a.port_names = opt_lines("port_names.txt");
  return a;
}

}  // namespace ministra
