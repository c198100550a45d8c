#include "ministra/parasitics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>
#include <set>
#include <sstream>

#include "ministra/io.hpp"
#include "ministra/log.hpp"
#include "ministra/parallel.hpp"

namespace ministra {

namespace {
constexpr double kMinRes = 1e-6;
}

double RcNet::total_cap() const { return std::accumulate(cap.begin(), cap.end(), 0.0); }

RcTree make_tree(const RcNet& rc) {
  const std::size_t n = rc.num_nodes();
  RcTree t;
  t.parent.assign(n, kInvalidId);
  t.res.assign(n, 0.0);
  if (n == 0) return t;
  if (rc.res.size() != n - 1) throw SemanticError(fmt::format("RC net has {} resistors for {} nodes", rc.res.size(), n));
  std::vector<std::uint32_t> off(n + 1, 0), adj(2 * rc.res.size());
  for (std::size_t r = 0; r < rc.res.size(); ++r) {
    ++off[rc.res_a[r] + 1];
    ++off[rc.res_b[r] + 1];
  }
  for (std::size_t i = 0; i < n; ++i) off[i + 1] += off[i];
  std::vector<std::uint32_t> fill(off.begin(), off.end() - 1);
  for (std::uint32_t r = 0; r < rc.res.size(); ++r) {
    adj[fill[rc.res_a[r]]++] = r;
    adj[fill[rc.res_b[r]]++] = r;
  }
  std::vector<std::uint8_t> seen(n, 0);
  t.order.reserve(n);
  t.order.push_back(0);
  seen[0] = 1;
  for (std::size_t i = 0; i < t.order.size(); ++i) {
    std::uint32_t v = t.order[i];
    for (auto k = off[v]; k < off[v + 1]; ++k) {
      std::uint32_t r = adj[k];
      std::uint32_t w = rc.res_a[r] == v ? rc.res_b[r] : rc.res_a[r];
      if (seen[w]) continue;
      seen[w] = 1;
      t.parent[w] = v;
      t.res[w] = rc.res[r];
      t.order.push_back(w);
    }
  }
  if (t.order.size() != n) throw SemanticError("RC net is not connected");
  return t;
}

std::size_t reduce_to_tree(RcNet& rc, const std::string& net_name) {
  const std::size_t n = rc.num_nodes();
  for (auto& r : rc.res) {
    if (!(r >= 0)) throw SemanticError(fmt::format("net '{}': negative resistance", net_name));
    if (r < kMinRes) r = kMinRes;
  }
  std::vector<std::uint32_t> idx(rc.res.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return rc.res[a] < rc.res[b]; });
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::uint8_t> keep(rc.res.size(), 0);
  std::size_t dropped = 0;
  for (auto r : idx) {
    std::uint32_t a = find(rc.res_a[r]), b = find(rc.res_b[r]);
    if (a == b) {
      ++dropped;
      continue;
    }
    parent[std::max(a, b)] = std::min(a, b);
    keep[r] = 1;
  }
  for (std::uint32_t v = 0; v < n; ++v)
    if (find(v) != find(0)) {
      std::string what = rc.node_pin[v] != kInvalidId ? fmt::format("pin node {}", v) : fmt::format("node {}", v);
      throw SemanticError(fmt::format("net '{}': RC {} is disconnected from the driver", net_name, what));
    }
  if (dropped) {
    RcNet t = rc;
    t.res_a.clear();
    t.res_b.clear();
    t.res.clear();
    for (std::size_t r = 0; r < rc.res.size(); ++r)
      if (keep[r]) {
        t.res_a.push_back(rc.res_a[r]);
        t.res_b.push_back(rc.res_b[r]);
        t.res.push_back(rc.res[r]);
      }
    rc = std::move(t);
    log::warn("net '{}': {} resistor(s) removed to break RC loops", net_name, dropped);
  }
  return dropped;
}

RcStore annotate_spef(const SpefData& spef, const FlatNetlist& nl) {
  RcStore store(nl.num_nets());
  const char delim = spef.delimiter;
  struct Coupling {
    NetId net;
    std::uint32_t node;
    std::string own, partner;
    double value;
  };
  std::vector<Coupling> couplings;
  std::unordered_map<std::string, std::pair<NetId, std::uint32_t>> global_node;

  for (const auto& sn : spef.nets) {
    NetId nid = nl.find_net(sn.name);
    if (nid == kInvalidId) {
      // Nets are often named after a driving port.
      PinId port = nl.find_port(sn.name);
      if (port != kInvalidId) nid = nl.pin_net[port];
    }
    if (nid == kInvalidId) {
      log::warn("SPEF net '{}' not found in the netlist; skipped", sn.name);
      continue;
    }
    if (store.present[nid]) {
      log::warn("SPEF net '{}' annotated twice; keeping the first", sn.name);
      continue;
    }
    auto pin_of = [&](const std::string& name) -> PinId {
      std::size_t d = name.rfind(delim);
      if (d != std::string::npos) {
        PinId p = nl.find_pin(name.substr(0, d) + "/" + name.substr(d + 1));
        if (p != kInvalidId && !nl.is_port(p)) return p;
      }
      return nl.find_port(name);
    };
    RcNet rc;
    std::unordered_map<std::string, std::uint32_t> local;
    auto canon = [&](const std::string& name) -> std::string {
      PinId p = pin_of(name);
      return p != kInvalidId ? "\x01" + nl.pin_names[p] : name;
    };
    auto node_of = [&](const std::string& name) -> std::uint32_t {
      std::string key = canon(name);
      auto it = local.find(key);
      if (it != local.end()) return it->second;
      PinId p = pin_of(name);
      if (p != kInvalidId && nl.pin_net[p] != nid) {
        log::warn("SPEF net '{}': pin '{}' belongs to another net; treated as internal node", sn.name, name);
        p = kInvalidId;
      }
      std::uint32_t idx = static_cast<std::uint32_t>(rc.cap.size());
      rc.cap.push_back(0.0);
      rc.node_pin.push_back(p);
      local.emplace(key, idx);
      return idx;
    };
    const PinId drv = nl.net_driver[nid];
    if (drv != kInvalidId) {
      rc.cap.push_back(0.0);
      rc.node_pin.push_back(drv);
      local.emplace("\x01" + nl.pin_names[drv], 0);
    }
    for (const auto& c : sn.conns) node_of(c.name);
    for (const auto& c : sn.caps) {
      std::uint32_t a = node_of(c.node);
      if (c.partner.empty()) {
        rc.cap[a] += c.value;
      } else {
        rc.cap[a] += c.value;
        couplings.push_back({nid, a, canon(c.node), canon(c.partner), c.value});
      }
    }
    for (const auto& r : sn.res) {
      std::uint32_t a = node_of(r.a), b = node_of(r.b);
      if (a == b) continue;
      rc.res_a.push_back(a);
      rc.res_b.push_back(b);
      rc.res.push_back(r.value);
    }
    if (drv == kInvalidId) {
      log::warn("SPEF net '{}' has no driver; lumped", sn.name);
      continue;
    }
    for (auto k = nl.net_pin_offsets[nid]; k < nl.net_pin_offsets[nid + 1]; ++k) {
      PinId p = nl.net_pins[k];
      if (local.count("\x01" + nl.pin_names[p])) continue;
      log::warn("SPEF net '{}': pin '{}' missing; attached to the driver", sn.name, nl.pin_names[p]);
      std::uint32_t idx = static_cast<std::uint32_t>(rc.cap.size());
      rc.cap.push_back(0.0);
      rc.node_pin.push_back(p);
      local.emplace("\x01" + nl.pin_names[p], idx);
      rc.res_a.push_back(0);
      rc.res_b.push_back(idx);
      rc.res.push_back(kMinRes);
    }
    double total = rc.total_cap();
    if (sn.total_cap > 0 && std::fabs(total - sn.total_cap) > 1e-6 * std::max(1.0, sn.total_cap))
      log::debug("SPEF net '{}': total cap {} differs from section sum {}", sn.name, sn.total_cap, total);
    reduce_to_tree(rc, sn.name);
    for (auto& [key, idx] : local) global_node.emplace(key, std::make_pair(nid, idx));
    store.nets[nid] = std::move(rc);
    store.present[nid] = 1;
  }

  // A coupling listed by only one of the two nets is folded into the partner as well.
  std::multiset<std::tuple<std::string, std::string, double>> listed;
  for (const auto& c : couplings) listed.emplace(c.own, c.partner, c.value);
  for (const auto& c : couplings) {
    if (listed.count({c.partner, c.own, c.value})) continue;
    auto it = global_node.find(c.partner);
    if (it == global_node.end()) {
      log::debug("coupling partner '{}' not annotated", c.partner);
      continue;
    }
    store.nets[it->second.first].cap[it->second.second] += c.value;
  }
  return store;
}

RcStore ingest_flat_rc(const RcArrays& a, const FlatNetlist& nl, bool allow_loops) {
  const std::size_t nn = nl.num_nets();
  RcStore store(nn);
  if (a.net_node_offsets.empty() && a.net_res_offsets.empty()) return store;
  if (a.net_node_offsets.size() != nn + 1 || a.net_res_offsets.size() != nn + 1)
    throw SemanticError(fmt::format("RC bundle: offsets must have {} entries", nn + 1));
  if (a.node_cap.size() != a.node_pin.size() || a.net_node_offsets.back() != a.node_cap.size())
    throw SemanticError("RC bundle: node arrays do not match the node offsets");
  if (a.res_a.size() != a.res_b.size() || a.res_a.size() != a.res_kohm.size() ||
      a.net_res_offsets.back() != a.res_a.size())
    throw SemanticError("RC bundle: resistor arrays do not match the resistor offsets");
  for (NetId n = 0; n < nn; ++n) {
    if (a.net_node_offsets[n] > a.net_node_offsets[n + 1] || a.net_res_offsets[n] > a.net_res_offsets[n + 1])
      throw SemanticError(fmt::format("RC bundle: offsets not monotone at net {}", n));
    const std::uint32_t nb = a.net_node_offsets[n], ne = a.net_node_offsets[n + 1];
    if (nb == ne) continue;
    RcNet rc;
    rc.cap.assign(a.node_cap.begin() + nb, a.node_cap.begin() + ne);
    rc.node_pin.assign(a.node_pin.begin() + nb, a.node_pin.begin() + ne);
    for (std::size_t i = 0; i < rc.cap.size(); ++i) {
      if (!(rc.cap[i] >= 0)) throw SemanticError(fmt::format("RC bundle: net {} node {} has negative cap", n, i));
      PinId p = rc.node_pin[i];
      if (p != kInvalidId && (p >= nl.num_pins() || nl.pin_net[p] != n))
        throw SemanticError(fmt::format("RC bundle: net {} node {} names pin {} of another net", n, i, p));
    }
    if (rc.node_pin[0] != nl.net_driver[n])
      throw SemanticError(fmt::format("RC bundle: node 0 of net {} is not the driver", n));
    const std::uint32_t local_n = ne - nb;
    for (auto r = a.net_res_offsets[n]; r < a.net_res_offsets[n + 1]; ++r) {
      if (a.res_a[r] >= local_n || a.res_b[r] >= local_n)
        throw SemanticError(fmt::format("RC bundle: net {} resistor {} references a node out of range", n, r));
      rc.res_a.push_back(a.res_a[r]);
      rc.res_b.push_back(a.res_b[r]);
      rc.res.push_back(a.res_kohm[r]);
    }
    if (!allow_loops && rc.res.size() + 1 != rc.cap.size())
      throw SemanticError(fmt::format("RC bundle: net {} is not a tree", n));
    reduce_to_tree(rc, nl.net_names[n]);
    store.nets[n] = std::move(rc);
    store.present[n] = 1;
  }
  return store;
}

RcArrays export_rc_arrays(const RcStore& s) {
  RcArrays a;
  a.net_node_offsets.push_back(0);
  a.net_res_offsets.push_back(0);
  for (std::size_t n = 0; n < s.nets.size(); ++n) {
    if (s.present[n]) {
      const RcNet& rc = s.nets[n];
      a.node_cap.insert(a.node_cap.end(), rc.cap.begin(), rc.cap.end());
      a.node_pin.insert(a.node_pin.end(), rc.node_pin.begin(), rc.node_pin.end());
      a.res_a.insert(a.res_a.end(), rc.res_a.begin(), rc.res_a.end());
      a.res_b.insert(a.res_b.end(), rc.res_b.begin(), rc.res_b.end());
      a.res_kohm.insert(a.res_kohm.end(), rc.res.begin(), rc.res.end());
    }
    a.net_node_offsets.push_back(static_cast<std::uint32_t>(a.node_cap.size()));
    a.net_res_offsets.push_back(static_cast<std::uint32_t>(a.res_a.size()));
  }
  return a;
}

void write_rc_bundle(const std::string& dir, const RcStore& s) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  RcArrays a = export_rc_arrays(s);
  auto p = [&](const char* f) { return (fs::path(dir) / f).string(); };
  write_u32(p("net_node_offsets.u32"), a.net_node_offsets);
  write_f64(p("node_cap.f64"), a.node_cap);
  write_u32(p("node_pin.u32"), a.node_pin);
  write_u32(p("net_res_offsets.u32"), a.net_res_offsets);
  write_u32(p("res_a.u32"), a.res_a);
  write_u32(p("res_b.u32"), a.res_b);
  write_f64(p("res_kohm.f64"), a.res_kohm);
  nlohmann::json m = {{"format", "ministra-rc"}, {"version", 1}, {"nets", s.nets.size()},
                      {"nodes", a.node_cap.size()}, {"resistors", a.res_a.size()},
                      {"units", {{"cap", "fF"}, {"res", "kOhm"}}}};
  write_file(p("manifest.json"), m.dump(2) + "\n");
}

RcArrays read_rc_bundle(const std::string& dir) {
  namespace fs = std::filesystem;
  auto p = [&](const char* f) { return (fs::path(dir) / f).string(); };
  if (fs::exists(p("manifest.json"))) {
    auto m = nlohmann::json::parse(read_file_raw(p("manifest.json")));
    if (m.value("version", 0) != 1) throw Error(fmt::format("{}: unsupported RC bundle version", dir));
  }
  RcArrays a;
  a.net_node_offsets = read_u32(p("net_node_offsets.u32"));
  a.node_cap = read_f64(p("node_cap.f64"));
  a.node_pin = read_u32(p("node_pin.u32"));
  a.net_res_offsets = read_u32(p("net_res_offsets.u32"));
  a.res_a = read_u32(p("res_a.u32"));
  a.res_b = read_u32(p("res_b.u32"));
  a.res_kohm = read_f64(p("res_kohm.f64"));
  return a;
}

RcNet build_steiner(std::vector<PinPosition> pins, PinId driver, const SteinerConfig& cfg) {
  RcNet rc;
  if (pins.empty()) return rc;
  std::sort(pins.begin(), pins.end(), [](auto& a, auto& b) { return a.pin < b.pin; });
  auto drv_it = std::find_if(pins.begin(), pins.end(), [&](auto& p) { return p.pin == driver; });
  if (drv_it == pins.end()) throw SemanticError("steiner: driver pin has no position");
  std::rotate(pins.begin(), drv_it, drv_it + 1);  // driver first, the rest still sorted by id
  const std::size_t n = pins.size();
  for (const auto& p : pins) {
    rc.cap.push_back(0.0);
    rc.node_pin.push_back(p.pin);
  }
  auto add_edge = [&](std::uint32_t a, std::uint32_t b, double len, bool horizontal) {
    double r = len * (horizontal ? cfg.unit_res_x : cfg.unit_res_y);
    double c = len * (horizontal ? cfg.unit_cap_x : cfg.unit_cap_y);
    rc.res_a.push_back(a);
    rc.res_b.push_back(b);
    rc.res.push_back(std::max(r, kMinRes));
    rc.cap[a] += c / 2;
    rc.cap[b] += c / 2;
  };
  std::vector<std::uint8_t> in(n, 0);
  std::vector<double> best(n, kInf);
  std::vector<std::uint32_t> from(n, 0);
  in[0] = 1;
  auto dist = [&](std::size_t a, std::size_t b) {
    return std::fabs(pins[a].x - pins[b].x) + std::fabs(pins[a].y - pins[b].y);
  };
  for (std::size_t i = 1; i < n; ++i) {
    best[i] = dist(0, i);
    from[i] = 0;
  }
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t pick = n;
    for (std::size_t i = 1; i < n; ++i)
      if (!in[i] && (pick == n || best[i] < best[pick])) pick = i;  // ties keep the smaller pin id
    in[pick] = 1;
    const std::uint32_t u = from[pick], v = static_cast<std::uint32_t>(pick);
    const double dx = std::fabs(pins[u].x - pins[v].x), dy = std::fabs(pins[u].y - pins[v].y);
    if (dx > 0 && dy > 0) {
      std::uint32_t bend = static_cast<std::uint32_t>(rc.cap.size());
      rc.cap.push_back(0.0);
      rc.node_pin.push_back(kInvalidId);
      add_edge(u, bend, dx, true);
      add_edge(bend, v, dy, false);
    } else {
      add_edge(u, v, dx > 0 ? dx : dy, dx > 0);
    }
    for (std::size_t i = 1; i < n; ++i) {
      if (in[i]) continue;
      double d = dist(pick, i);
      if (d < best[i] || (d == best[i] && pick < from[i])) {
        best[i] = d;
        from[i] = v;
      }
    }
  }
  return rc;
}

RcStore build_steiner_all(const FlatNetlist& nl, const std::string& text, const SteinerConfig& cfg) {
  std::vector<double> x(nl.num_pins(), 0.0), y(nl.num_pins(), 0.0);
  std::vector<std::uint8_t> has(nl.num_pins(), 0);
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string name;
    double px, py;
    if (!(ls >> name) || name[0] == '#') continue;
    if (!(ls >> px >> py)) throw ParseError("<positions>", 0, lineno, "expected '<pin> <x> <y>'");
    PinId p = nl.find_pin(name);
    if (p == kInvalidId) {
      log::warn("positions line {}: unknown pin '{}'", lineno, name);
      continue;
    }
    x[p] = px;
    y[p] = py;
    has[p] = 1;
  }
  RcStore store(nl.num_nets());
  parallel_for(nl.num_nets(), [&](std::size_t n) {
    PinId drv = nl.net_driver[n];
    if (drv == kInvalidId) return;
    std::vector<PinPosition> pins;
    for (auto k = nl.net_pin_offsets[n]; k < nl.net_pin_offsets[n + 1]; ++k) {
      PinId p = nl.net_pins[k];
      if (!has[p]) return;
      pins.push_back({p, x[p], y[p]});
    }
    store.nets[n] = build_steiner(std::move(pins), drv, cfg);
    store.present[n] = 1;
  });
  return store;
}

}  // namespace ministra
