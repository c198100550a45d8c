#include "ministra/sdc.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <set>

#include "ministra/log.hpp"

namespace ministra {

namespace {
bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
ModeEdge<double> unset() { return {{{kNaN, kNaN}, {kNaN, kNaN}}}; }
}  // namespace

bool operator==(const IoDelay& a, const IoDelay& b) {
  for (int m = 0; m < 2; ++m)
    for (int e = 0; e < 2; ++e)
      if (!same(a.value[m][e], b.value[m][e])) return false;
  return a.pin == b.pin && a.clock == b.clock && a.clock_fall == b.clock_fall && a.is_input == b.is_input;
}

ClockId Constraints::find_clock(std::string_view name) const {
  for (std::size_t i = 0; i < clocks.size(); ++i)
    if (clocks[i].name == name) return static_cast<ClockId>(i);
  return kInvalidId;
}

bool glob_match(std::string_view p, std::string_view t) {
  std::size_t pi = 0, ti = 0, star = std::string_view::npos, mark = 0;
  while (ti < t.size()) {
    if (pi < p.size() && p[pi] == '\\' && pi + 1 < p.size() && p[pi + 1] == t[ti]) {
      pi += 2;
      ++ti;
    } else if (pi < p.size() && (p[pi] == '?' || (p[pi] == t[ti] && p[pi] != '*' && p[pi] != '\\'))) {
      ++pi;
      ++ti;
    } else if (pi < p.size() && p[pi] == '*') {
      star = pi++;
      mark = ti;
    } else if (star != std::string_view::npos) {
      pi = star + 1;
      ti = ++mark;
    } else {
      return false;
    }
  }
  while (pi < p.size() && p[pi] == '*') ++pi;
  return pi == p.size();
}

std::vector<std::uint32_t> query_objects(ObjectKind kind, std::string_view pattern, const FlatNetlist& n,
                                         const Constraints& c) {
  std::vector<std::uint32_t> out;
  const bool wild = pattern.find_first_of("*?\\") != std::string_view::npos;
  auto scan = [&](std::size_t count, auto&& name_of, auto&& keep) {
    for (std::size_t i = 0; i < count; ++i)
      if (keep(i) && glob_match(pattern, name_of(i))) out.push_back(static_cast<std::uint32_t>(i));
  };
  switch (kind) {
    case ObjectKind::ports:
      if (!wild) {
        PinId p = n.find_port(pattern);
        if (p != kInvalidId) out.push_back(p);
        break;
      }
      scan(n.num_ports(), [&](std::size_t i) -> const std::string& { return n.pin_names[i]; },
           [](std::size_t) { return true; });
      break;
    case ObjectKind::pins:
      if (!wild) {
        PinId p = n.find_pin(pattern);
        if (p != kInvalidId && !n.is_port(p)) out.push_back(p);
        break;
      }
      scan(n.num_pins(), [&](std::size_t i) -> const std::string& { return n.pin_names[i]; },
           [&](std::size_t i) { return !n.is_port(static_cast<PinId>(i)); });
      break;
    case ObjectKind::cells:
      if (!wild) {
        CellId x = n.find_cell(pattern);
        if (x != kInvalidId) out.push_back(x);
        break;
      }
      scan(n.num_cells(), [&](std::size_t i) -> const std::string& { return n.cell_names[i]; },
           [](std::size_t) { return true; });
      break;
    case ObjectKind::nets:
      if (!wild) {
        NetId x = n.find_net(pattern);
        if (x != kInvalidId) out.push_back(x);
        break;
      }
      scan(n.num_nets(), [&](std::size_t i) -> const std::string& { return n.net_names[i]; },
           [](std::size_t) { return true; });
      break;
    case ObjectKind::clocks:
      scan(c.clocks.size(), [&](std::size_t i) -> const std::string& { return c.clocks[i].name; },
           [](std::size_t) { return true; });
      break;
  }
  return out;
}

namespace {

const char* prefix(ObjectKind k) {
  switch (k) {
    case ObjectKind::ports: return "port:";
    case ObjectKind::pins: return "pin:";
    case ObjectKind::cells: return "cell:";
    case ObjectKind::clocks: return "clock:";
    case ObjectKind::nets: return "net:";
  }
  return "";
}

struct Objects {
  std::vector<PinId> ports;
  std::vector<PinId> pins;
  std::vector<CellId> cells;
  std::vector<ClockId> clocks;
  std::vector<NetId> nets;
  bool empty() const { return ports.empty() && pins.empty() && cells.empty() && clocks.empty() && nets.empty(); }
};

template <typename T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

class SdcEvaluator {
 public:
  SdcEvaluator(const FlatNetlist& n, const LibertyLibrary& lib) : n_(n), lib_(lib) {
    c_.time_unit_ps = lib.time_unit_ps;
    c_.cap_unit_ff = lib.cap_unit_ff;
    tcl_.unknown = [this](TclInterp&, const std::vector<std::string>& a) {
      warn(fmt::format("unknown command '{}' skipped", a[0]));
      return std::string();
    };
    register_all();
  }

  Constraints run(std::string_view script, const std::string& file) {
    file_ = file;
    try {
      tcl_.eval(script, file);
    } catch (const TclError& e) {
      throw ParseError(file, 0, tcl_.line(), e.what());
    }
    return std::move(c_);
  }

 private:
  using Args = std::vector<std::string>;

  void warn(const std::string& msg) { log::warn("SDC-WARN {}: {}", tcl_.line(), msg); }
  [[noreturn]] void error(const std::string& msg) {
    throw SemanticError(fmt::format("{}:{}: {}", file_, tcl_.line(), msg));
  }

  double number(const std::string& s, const char* what) {
    std::string_view t = s;
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
    double v = 0;
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
      error(fmt::format("expected a number for {}, got '{}'", what, s));
    return v;
  }

  std::string handle(ObjectKind k, std::uint32_t id) const {
    switch (k) {
      case ObjectKind::ports:
      case ObjectKind::pins: return prefix(k) + n_.pin_names[id];
      case ObjectKind::cells: return prefix(k) + n_.cell_names[id];
      case ObjectKind::nets: return prefix(k) + n_.net_names[id];
      case ObjectKind::clocks: return prefix(k) + c_.clocks[id].name;
    }
    return {};
  }

  std::string make(ObjectKind k, std::vector<std::uint32_t> ids, const std::string& pattern) {
    sort_unique(ids);
    if (ids.empty()) last_empty_ = pattern;
    std::vector<std::string> items;
    items.reserve(ids.size());
    for (auto id : ids) items.push_back(handle(k, id));
    return TclInterp::make_list(items);
  }

  // Parses `-flag value` style arguments. Flags listed in `valued` take a value.
  struct Parsed {
    std::map<std::string, std::vector<std::string>> opts;  // repeated flags keep every value
    std::vector<std::string> positional;
    bool has(const std::string& f) const { return opts.count(f) != 0; }
    const std::string& get(const std::string& f) const { return opts.at(f).back(); }
  };
  Parsed parse(const Args& a, std::initializer_list<const char*> valued, std::initializer_list<const char*> flags) {
    Parsed p;
    for (std::size_t i = 1; i < a.size(); ++i) {
      const std::string& w = a[i];
      bool is_opt = w.size() > 1 && w[0] == '-' && !std::isdigit(static_cast<unsigned char>(w[1])) && w[1] != '.';
      if (!is_opt) {
        p.positional.push_back(w);
        continue;
      }
      bool takes = std::any_of(valued.begin(), valued.end(), [&](const char* v) { return w == v; });
      bool known = takes || std::any_of(flags.begin(), flags.end(), [&](const char* v) { return w == v; });
      if (!known) {
        warn(fmt::format("{}: unsupported option '{}' ignored", a[0], w));
        continue;
      }
      if (takes) {
        if (i + 1 >= a.size()) error(fmt::format("{}: missing value for {}", a[0], w));
        p.opts[w].push_back(a[++i]);
      } else {
        p.opts[w].push_back("");
      }
    }
    return p;
  }

  // Resolves a list of handles or bare names.
  Objects resolve(const std::string& list, const char* cmd, const char* role) {
    Objects o;
    auto items = TclInterp::split_list(list);
    if (items.empty()) {
      if (!last_empty_.empty()) error(fmt::format("{} {}: no objects match '{}'", cmd, role, last_empty_));
      error(fmt::format("{} {}: empty object list", cmd, role));
    }
    bool clocks_first = std::strcmp(role, "-clock") == 0 || std::strcmp(role, "-master_clock") == 0;
    for (const auto& it : items) {
      auto typed = [&](const char* pre) -> std::optional<std::string> {
        std::size_t l = std::strlen(pre);
        if (it.compare(0, l, pre) == 0) return it.substr(l);
        return std::nullopt;
      };
      if (auto s = typed("port:")) {
        PinId p = n_.find_port(*s);
        if (p == kInvalidId) error(fmt::format("{}: unknown port '{}'", cmd, *s));
        o.ports.push_back(p);
      } else if (auto s = typed("pin:")) {
        PinId p = n_.find_pin(*s);
        if (p == kInvalidId) error(fmt::format("{}: unknown pin '{}'", cmd, *s));
        o.pins.push_back(p);
      } else if (auto s = typed("cell:")) {
        CellId x = n_.find_cell(*s);
        if (x == kInvalidId) error(fmt::format("{}: unknown cell '{}'", cmd, *s));
        o.cells.push_back(x);
      } else if (auto s = typed("clock:")) {
        ClockId x = c_.find_clock(*s);
        if (x == kInvalidId) error(fmt::format("{}: unknown clock '{}'", cmd, *s));
        o.clocks.push_back(x);
      } else if (auto s = typed("net:")) {
        NetId x = n_.find_net(*s);
        if (x == kInvalidId) error(fmt::format("{}: unknown net '{}'", cmd, *s));
        o.nets.push_back(x);
      } else if (ClockId k = clocks_first ? c_.find_clock(it) : kInvalidId; k != kInvalidId) {
        o.clocks.push_back(k);
      } else if (PinId p = n_.find_port(it); p != kInvalidId) {
        o.ports.push_back(p);
      } else if (PinId q = n_.find_pin(it); q != kInvalidId) {
        o.pins.push_back(q);
      } else if (ClockId k = c_.find_clock(it); k != kInvalidId) {
        o.clocks.push_back(k);
      } else if (CellId x = n_.find_cell(it); x != kInvalidId) {
        o.cells.push_back(x);
      } else if (NetId y = n_.find_net(it); y != kInvalidId) {
        o.nets.push_back(y);
      } else {
        error(fmt::format("{} {}: no objects match '{}'", cmd, role, it));
      }
    }
    sort_unique(o.ports);
    sort_unique(o.pins);
    sort_unique(o.cells);
    sort_unique(o.clocks);
    sort_unique(o.nets);
    return o;
  }

  std::vector<PinId> ports_of(const Objects& o, const char* cmd) {
    std::vector<PinId> out = o.ports;
    for (PinId p : o.pins) out.push_back(p);
    if (!o.cells.empty() || !o.clocks.empty() || !o.nets.empty())
      warn(fmt::format("{}: only ports and pins are accepted here; other objects ignored", cmd));
    sort_unique(out);
    return out;
  }

  NodeSet node_set(const Objects& o, bool through, const char* cmd) {
    NodeSet s;
    s.pins = o.ports;
    s.pins.insert(s.pins.end(), o.pins.begin(), o.pins.end());
    s.clocks = o.clocks;
    s.cells = o.cells;
    for (NetId net : o.nets) {
      if (!through) {
        warn(fmt::format("{}: nets are only meaningful in -through; ignored", cmd));
        continue;
      }
      if (n_.net_driver[net] != kInvalidId) {
        s.pins.push_back(n_.net_driver[net]);
      } else {
        for (auto k = n_.net_pin_offsets[net]; k < n_.net_pin_offsets[net + 1]; ++k) s.pins.push_back(n_.net_pins[k]);
      }
    }
    if (through && !s.clocks.empty()) {
      warn(fmt::format("{}: clocks in -through ignored", cmd));
      s.clocks.clear();
    }
    sort_unique(s.pins);
    return s;
  }

  void add_query(const char* name, ObjectKind kind) {
    tcl_.register_command(name, [this, kind, name](TclInterp&, const Args& a) {
      Parsed p = parse(a, {"-of_objects", "-filter"}, {"-hierarchical", "-quiet", "-nocase", "-regexp", "-hier"});
      if (p.has("-filter")) warn(fmt::format("{}: -filter is not supported; ignored", name));
      std::vector<std::uint32_t> ids;
      std::string pattern;
      if (p.has("-of_objects")) {
        Objects o = resolve(p.get("-of_objects"), name, "-of_objects");
        pattern = p.get("-of_objects");
        for (CellId cell : o.cells) {
          if (kind == ObjectKind::pins)
            for (auto k = n_.cell_pin_offsets[cell]; k < n_.cell_pin_offsets[cell + 1]; ++k) ids.push_back(n_.cell_pins[k]);
          if (kind == ObjectKind::nets)
            for (auto k = n_.cell_pin_offsets[cell]; k < n_.cell_pin_offsets[cell + 1]; ++k)
              if (n_.pin_net[n_.cell_pins[k]] != kInvalidId) ids.push_back(n_.pin_net[n_.cell_pins[k]]);
        }
        for (NetId net : o.nets)
          for (auto k = n_.net_pin_offsets[net]; k < n_.net_pin_offsets[net + 1]; ++k) {
            PinId pin = n_.net_pins[k];
            if (kind == ObjectKind::pins && !n_.is_port(pin)) ids.push_back(pin);
            if (kind == ObjectKind::ports && n_.is_port(pin)) ids.push_back(pin);
            if (kind == ObjectKind::cells && !n_.is_port(pin)) ids.push_back(n_.pin_cell[pin]);
          }
        auto pins = o.pins;
        pins.insert(pins.end(), o.ports.begin(), o.ports.end());
        for (PinId pin : pins) {
          if (kind == ObjectKind::cells && !n_.is_port(pin)) ids.push_back(n_.pin_cell[pin]);
          if (kind == ObjectKind::nets && n_.pin_net[pin] != kInvalidId) ids.push_back(n_.pin_net[pin]);
        }
      } else {
        if (p.positional.empty()) {
          pattern = "*";
          ids = query_objects(kind, "*", n_, c_);
        }
        for (const auto& pat_list : p.positional)
          for (const auto& pat : TclInterp::split_list(pat_list)) {
            pattern = pat;
            auto got = query_objects(kind, pat, n_, c_);
            if (got.empty() && !p.has("-quiet")) warn(fmt::format("{}: no objects match '{}'", name, pat));
            ids.insert(ids.end(), got.begin(), got.end());
          }
      }
      return make(kind, std::move(ids), pattern);
    });
  }

  std::vector<PinId> register_pins(bool clock_pins) const {
    std::vector<PinId> out;
    for (CellId c = 0; c < n_.num_cells(); ++c) {
      const LibertyCell& lc = lib_.cells[n_.cell_lib[c]];
      if (!lc.is_sequential) continue;
      for (const auto& arc : lc.arcs) {
        if (!is_check(arc.kind)) continue;
        std::uint32_t lp = clock_pins ? arc.from_pin : arc.to_pin;
        for (auto k = n_.cell_pin_offsets[c]; k < n_.cell_pin_offsets[c + 1]; ++k)
          if (n_.pin_lib_pin[n_.cell_pins[k]] == lp) out.push_back(n_.cell_pins[k]);
      }
    }
    sort_unique(out);
    return out;
  }

  void add_exception(ExceptionKind kind, const Args& a) {
    Parsed p = parse(a, {"-from", "-to", "-through", "-rise_from", "-fall_from", "-rise_to", "-fall_to",
                         "-rise_through", "-fall_through", "-comment"},
                     {"-setup", "-hold", "-start", "-end", "-rise", "-fall", "-reset_path", "-ignore_clock_latency"});
    PathException e;
    e.kind = kind;
    e.line = tcl_.line();
    std::vector<std::string> pos = p.positional;
    if (kind != ExceptionKind::false_path) {
      if (pos.empty()) error(fmt::format("{}: missing value", a[0]));
      if (kind == ExceptionKind::multicycle) {
        double m = number(pos[0], "path multiplier");
        if (m < 1 || m != std::floor(m)) error(fmt::format("{}: multiplier must be an integer >= 1", a[0]));
        e.multiplier = static_cast<int>(m);
      } else {
        e.value = number(pos[0], "delay") * c_.time_unit_ps;
      }
      pos.erase(pos.begin());
    }
    if (!pos.empty()) warn(fmt::format("{}: extra arguments ignored", a[0]));
    for (const char* q : {"-rise_from", "-fall_from", "-rise_to", "-fall_to", "-rise_through", "-fall_through"})
      if (p.has(q)) warn(fmt::format("{}: {} treated as {}", a[0], q, std::string("-") + (std::strchr(q + 1, '_') + 1)));
    if (p.has("-rise") || p.has("-fall")) warn(fmt::format("{}: -rise/-fall ignored", a[0]));
    auto collect = [&](std::initializer_list<const char*> names, bool through, const char* role) {
      std::vector<NodeSet> out;
      // Preserve the command-line order of repeated -through flags.
      std::vector<std::pair<std::size_t, std::string>> ordered;
      for (std::size_t i = 1; i + 1 < a.size(); ++i)
        for (const char* nm : names)
          if (a[i] == nm) ordered.emplace_back(i, a[i + 1]);
      for (auto& [idx, val] : ordered) {
        (void)idx;
        out.push_back(node_set(resolve(val, a[0].c_str(), role), through, a[0].c_str()));
      }
      return out;
    };
    // Empty-list errors name the pattern of the query that produced them; re-run queries in order.
    auto from = collect({"-from", "-rise_from", "-fall_from"}, false, "-from");
    auto to = collect({"-to", "-rise_to", "-fall_to"}, false, "-to");
    e.through = collect({"-through", "-rise_through", "-fall_through"}, true, "-through");
    for (auto& f : from) merge(e.from, f);
    for (auto& t : to) merge(e.to, t);
    if (e.from.empty() && e.to.empty() && e.through.empty())
      error(fmt::format("{}: at least one of -from, -through, -to is required", a[0]));
    const bool s = p.has("-setup"), h = p.has("-hold");
    switch (kind) {
      case ExceptionKind::false_path:
        e.setup = s || !h;
        e.hold = h || !s;
        break;
      case ExceptionKind::multicycle:
        e.setup = !h || s;
        e.hold = h;
        if (s && h) error(fmt::format("{}: give -setup or -hold, not both", a[0]));
        e.anchor = p.has("-start") ? McpAnchor::start : p.has("-end") ? McpAnchor::end : McpAnchor::by_default;
        break;
      case ExceptionKind::max_delay:
        e.setup = true;
        e.hold = false;
        break;
      case ExceptionKind::min_delay:
        e.setup = false;
        e.hold = true;
        break;
    }
    e.priority = static_cast<std::uint32_t>(c_.exceptions.size());
    c_.exceptions.push_back(std::move(e));
  }

  static void merge(NodeSet& into, const NodeSet& more) {
    into.pins.insert(into.pins.end(), more.pins.begin(), more.pins.end());
    into.clocks.insert(into.clocks.end(), more.clocks.begin(), more.clocks.end());
    into.cells.insert(into.cells.end(), more.cells.begin(), more.cells.end());
    sort_unique(into.pins);
    sort_unique(into.clocks);
    sort_unique(into.cells);
  }

  void io_delay(const Args& a, bool input) {
    Parsed p = parse(a, {"-clock", "-reference_pin"},
                     {"-clock_fall", "-min", "-max", "-rise", "-fall", "-add_delay", "-network_latency_included",
                      "-source_latency_included", "-level_sensitive"});
    if (p.positional.size() != 2) error(fmt::format("{}: expected a delay value and a port list", a[0]));
    double v = number(p.positional[0], "delay") * c_.time_unit_ps;
    ClockId clk = kInvalidId;
    if (p.has("-clock")) {
      Objects o = resolve(p.get("-clock"), a[0].c_str(), "-clock");
      if (o.clocks.size() != 1) error(fmt::format("{}: -clock must name exactly one clock", a[0]));
      clk = o.clocks[0];
    }
    if (p.has("-reference_pin")) warn(fmt::format("{}: -reference_pin ignored", a[0]));
    auto pins = ports_of(resolve(p.positional[1], a[0].c_str(), "objects"), a[0].c_str());
    const bool any_mode = !p.has("-min") && !p.has("-max");
    const bool any_edge = !p.has("-rise") && !p.has("-fall");
    const bool cf = p.has("-clock_fall");
    for (PinId pin : pins) {
      const PinDirection d = n_.pin_dir[pin];
      if (!n_.is_port(pin)) warn(fmt::format("{}: '{}' is not a port", a[0], n_.pin_names[pin]));
      if (n_.is_port(pin) && d != PinDirection::inout && (d == PinDirection::input) != input)
        error(fmt::format("{}: port '{}' is an {} port", a[0], n_.pin_names[pin], to_string(d)));
      if (!p.has("-add_delay")) {
        for (auto& x : c_.io_delays) {
          if (x.pin != pin || x.is_input != input) continue;
          for (int m = 0; m < 2; ++m)
            for (int e = 0; e < 2; ++e)
              if ((any_mode || p.has(m ? "-max" : "-min")) && (any_edge || p.has(e ? "-fall" : "-rise")))
                x.value[m][e] = kNaN;
        }
      }
      IoDelay* slot = nullptr;
      for (auto& x : c_.io_delays)
        if (x.pin == pin && x.is_input == input && x.clock == clk && x.clock_fall == cf) slot = &x;
      if (!slot) {
        c_.io_delays.push_back(IoDelay{pin, clk, cf, input, unset()});
        slot = &c_.io_delays.back();
      }
      for (int m = 0; m < 2; ++m)
        for (int e = 0; e < 2; ++e)
          if ((any_mode || p.has(m ? "-max" : "-min")) && (any_edge || p.has(e ? "-fall" : "-rise")))
            slot->value[m][e] = v;
    }
    std::erase_if(c_.io_delays, [](const IoDelay& x) {
      for (auto& m : x.value)
        for (double v : m)
          if (!std::isnan(v)) return false;
      return true;
    });
  }

  void register_all() {
    add_query("get_ports", ObjectKind::ports);
    add_query("get_pins", ObjectKind::pins);
    add_query("get_cells", ObjectKind::cells);
    add_query("get_clocks", ObjectKind::clocks);
    add_query("get_nets", ObjectKind::nets);
    tcl_.register_command("all_inputs", [this](TclInterp&, const Args&) {
      std::vector<std::uint32_t> ids;
      for (PinId p = 0; p < n_.num_ports(); ++p)
        if (n_.pin_dir[p] != PinDirection::output) ids.push_back(p);
      return make(ObjectKind::ports, ids, "all_inputs");
    });
    tcl_.register_command("all_outputs", [this](TclInterp&, const Args&) {
      std::vector<std::uint32_t> ids;
      for (PinId p = 0; p < n_.num_ports(); ++p)
        if (n_.pin_dir[p] != PinDirection::input) ids.push_back(p);
      return make(ObjectKind::ports, ids, "all_outputs");
    });
    tcl_.register_command("all_clocks", [this](TclInterp&, const Args&) {
      std::vector<std::uint32_t> ids;
      for (std::size_t i = 0; i < c_.clocks.size(); ++i) ids.push_back(static_cast<std::uint32_t>(i));
      return make(ObjectKind::clocks, ids, "all_clocks");
    });
    tcl_.register_command("all_registers", [this](TclInterp&, const Args& a) {
      Parsed p = parse(a, {"-clock"}, {"-clock_pins", "-data_pins", "-cells", "-edge_triggered"});
      if (p.has("-clock")) warn("all_registers: -clock ignored");
      if (p.has("-clock_pins") || p.has("-data_pins")) {
        auto pins = register_pins(p.has("-clock_pins"));
        return make(ObjectKind::pins, std::vector<std::uint32_t>(pins.begin(), pins.end()), "all_registers");
      }
      std::vector<std::uint32_t> ids;
      for (CellId c = 0; c < n_.num_cells(); ++c)
        if (lib_.cells[n_.cell_lib[c]].is_sequential) ids.push_back(c);
      return make(ObjectKind::cells, ids, "all_registers");
    });
    tcl_.register_command("current_design", [this](TclInterp&, const Args&) { return n_.design; });

    tcl_.register_command("set_units", [this](TclInterp&, const Args& a) {
      Parsed p = parse(a, {"-time", "-capacitance", "-resistance", "-voltage", "-current", "-power"}, {});
      if (p.has("-time")) c_.time_unit_ps = liberty_time_unit_ps(p.get("-time"));
      if (p.has("-capacitance")) {
        std::string u = p.get("-capacitance");
        double mult = 1.0;
        auto r = std::from_chars(u.data(), u.data() + u.size(), mult);
        if (r.ptr == u.data()) mult = 1.0;
        c_.cap_unit_ff = liberty_cap_unit_ff(mult, std::string_view(r.ptr, u.data() + u.size() - r.ptr));
      }
      return std::string();
    });

    tcl_.register_command("create_clock", [this](TclInterp&, const Args& a) {
      Parsed p = parse(a, {"-period", "-name", "-waveform", "-comment"}, {"-add"});
      if (!p.has("-period")) error("create_clock: -period is required");
      SdcClock clk;
      clk.period = number(p.get("-period"), "period") * c_.time_unit_ps;
      if (!(clk.period > 0)) error("create_clock: period must be positive");
      clk.rise = 0;
      clk.fall = clk.period / 2;
      if (p.has("-waveform")) {
        auto w = TclInterp::split_list(p.get("-waveform"));
        if (w.size() != 2) error("create_clock: -waveform needs exactly two edges");
        clk.rise = number(w[0], "waveform") * c_.time_unit_ps;
        clk.fall = number(w[1], "waveform") * c_.time_unit_ps;
        if (!(clk.rise >= 0 && clk.rise < clk.fall && clk.fall < clk.period + clk.rise && clk.fall <= clk.period))
          error("create_clock: waveform must satisfy 0 <= rise < fall <= period");
        if (clk.fall == clk.period) error("create_clock: fall edge must be earlier than the period");
      }
      if (!p.positional.empty()) {
        clk.sources = ports_of(resolve(p.positional[0], "create_clock", "sources"), "create_clock");
      }
      if (p.has("-name")) {
        clk.name = p.get("-name");
      } else if (!clk.sources.empty()) {
        clk.name = n_.pin_names[clk.sources[0]];
      } else {
        error("create_clock: a virtual clock needs -name");
      }
      ClockId existing = c_.find_clock(clk.name);
      if (existing != kInvalidId) {
        warn(fmt::format("create_clock: clock '{}' redefined", clk.name));
        c_.clocks[existing] = clk;
      } else {
        c_.clocks.push_back(clk);
      }
      return std::string();
    });
    tcl_.register_command("set_input_delay", [this](TclInterp&, const Args& a) {
      io_delay(a, true);
      return std::string();
    });
    tcl_.register_command("set_output_delay", [this](TclInterp&, const Args& a) {
      io_delay(a, false);
      return std::string();
    });
    tcl_.register_command("set_false_path", [this](TclInterp&, const Args& a) {
      add_exception(ExceptionKind::false_path, a);
      return std::string();
    });
    tcl_.register_command("set_multicycle_path", [this](TclInterp&, const Args& a) {
      add_exception(ExceptionKind::multicycle, a);
      return std::string();
    });
    tcl_.register_command("set_max_delay", [this](TclInterp&, const Args& a) {
      add_exception(ExceptionKind::max_delay, a);
      return std::string();
    });
    tcl_.register_command("set_min_delay", [this](TclInterp&, const Args& a) {
      add_exception(ExceptionKind::min_delay, a);
      return std::string();
    });
    tcl_.register_command("set_case_analysis", [this](TclInterp&, const Args& a) {
      Parsed p = parse(a, {}, {});
      if (p.positional.size() != 2) error("set_case_analysis: expected a value and an object list");
      const std::string& v = p.positional[0];
      bool val;
      if (v == "0" || v == "zero" || v == "1'b0") {
        val = false;
      } else if (v == "1" || v == "one" || v == "1'b1") {
        val = true;
      } else {
        warn(fmt::format("set_case_analysis: value '{}' not supported; ignored", v));
        return std::string();
      }
      for (PinId pin : ports_of(resolve(p.positional[1], "set_case_analysis", "objects"), "set_case_analysis")) {
        auto it = std::find_if(c_.case_values.begin(), c_.case_values.end(), [&](auto& c) { return c.pin == pin; });
        if (it != c_.case_values.end()) {
          it->value = val;
        } else {
          c_.case_values.push_back({pin, val});
        }
      }
      return std::string();
    });
    tcl_.register_command("set_input_transition", [this](TclInterp&, const Args& a) {
      Parsed p = parse(a, {"-clock"}, {"-min", "-max", "-rise", "-fall", "-clock_fall"});
      if (p.positional.size() != 2) error("set_input_transition: expected a value and a port list");
      double v = number(p.positional[0], "transition") * c_.time_unit_ps;
      if (v < 0) error("set_input_transition: negative transition");
      const bool any_mode = !p.has("-min") && !p.has("-max");
      const bool any_edge = !p.has("-rise") && !p.has("-fall");
      for (PinId pin : ports_of(resolve(p.positional[1], "set_input_transition", "objects"), "set_input_transition")) {
        auto it = c_.input_slew.find(pin);
        if (it == c_.input_slew.end()) it = c_.input_slew.emplace(pin, unset()).first;
        for (int m = 0; m < 2; ++m)
          for (int e = 0; e < 2; ++e)
            if ((any_mode || p.has(m ? "-max" : "-min")) && (any_edge || p.has(e ? "-fall" : "-rise")))
              it->second[m][e] = v;
      }
      return std::string();
    });
    tcl_.register_command("set_load", [this](TclInterp&, const Args& a) {
      Parsed p = parse(a, {}, {"-min", "-max", "-pin_load", "-wire_load", "-subtract_pin_load"});
      if (p.positional.size() != 2) error("set_load: expected a value and an object list");
      double v = number(p.positional[0], "load") * c_.cap_unit_ff;
      Objects o = resolve(p.positional[1], "set_load", "objects");
      if (!o.nets.empty()) warn("set_load: net loads are not supported; ignored");
      for (PinId pin : o.ports) c_.port_load[pin] = v;
      return std::string();
    });
    tcl_.register_command("set_disable_timing", [this](TclInterp&, const Args& a) {
      Parsed p = parse(a, {"-from", "-to"}, {"-restore"});
      if (p.positional.size() != 1) error("set_disable_timing: expected an object list");
      Objects o = resolve(p.positional[0], "set_disable_timing", "objects");
      std::string from = p.has("-from") ? p.get("-from") : "";
      std::string to = p.has("-to") ? p.get("-to") : "";
      for (CellId c : o.cells) c_.disables.push_back({kInvalidId, c, from, to});
      for (PinId pin : o.pins) c_.disables.push_back({pin, kInvalidId, "", ""});
      for (PinId pin : o.ports) c_.disables.push_back({pin, kInvalidId, "", ""});
      if ((!from.empty() || !to.empty()) && (!o.pins.empty() || !o.ports.empty()))
        warn("set_disable_timing: -from/-to apply to cells only");
      return std::string();
    });
    for (const char* nop : {"create_generated_clock", "set_clock_groups"}) {
      tcl_.register_command(nop, [this, nop](TclInterp&, const Args&) {
        warn(fmt::format("{} is not supported; ignored", nop));
        return std::string();
      });
    }
    for (const char* nop : {"set_clock_uncertainty", "set_clock_latency", "set_clock_transition",
                            "set_propagated_clock", "set_driving_cell", "set_max_fanout", "set_max_transition",
                            "set_max_capacitance", "set_wire_load_model", "set_operating_conditions",
                            "set_timing_derate", "group_path", "set_ideal_network", "set_dont_touch"}) {
      tcl_.register_command(nop, [this, nop](TclInterp&, const Args&) {
        warn(fmt::format("{} ignored", nop));
        return std::string();
      });
    }
  }

  const FlatNetlist& n_;
  const LibertyLibrary& lib_;
  Constraints c_;
  TclInterp tcl_;
  std::string file_;
  std::string last_empty_;
};

}  // namespace

Constraints eval_sdc(std::string_view script, const FlatNetlist& netlist, const LibertyLibrary& lib,
                     const std::string& file) {
  SdcEvaluator ev(netlist, lib);
  return ev.run(script, file);
}

}  // namespace ministra
