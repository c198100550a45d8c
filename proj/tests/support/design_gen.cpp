#include "support/design_gen.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <random>

#include "ministra/spef.hpp"
#include "ministra/verilog.hpp"

namespace test {

using namespace ministra;

namespace {

using Rng = std::mt19937_64;

int uniform(Rng& r, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(r); }
bool chance(Rng& r, double p) { return std::uniform_real_distribution<double>(0, 1)(r) < p; }
double eighths(Rng& r, int lo, int hi) { return uniform(r, lo, hi) * 0.125; }
template <typename T>
const T& pick(Rng& r, const std::vector<T>& v) { return v[static_cast<std::size_t>(uniform(r, 0, static_cast<int>(v.size()) - 1))]; }

enum class Kind { buf, inv, nand, xor_, ha, dff, dffn };

struct CellType {
  std::string name;
  Kind kind;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  // Per (input, output) arc: rise and fall delay.
  std::vector<std::array<double, 2>> delay;
  double setup[2] = {0, 0}, hold[2] = {0, 0};
  double cap = 0.5;
};

std::string value(double v) { return fmt::format("\"{}\"", v); }

std::string scalar(const char* group, double v) { return fmt::format("        {}(scalar) {{ values({}); }}\n", group, value(v)); }

std::string liberty_text(const std::vector<CellType>& types) {
  std::string s =
      "library(gen) {\n  time_unit : \"1ps\";\n  capacitive_load_unit (1, ff);\n  pulling_resistance_unit : \"1kohm\";\n";
  for (const auto& t : types) {
    s += fmt::format("  cell({}) {{\n", t.name);
    const bool seq = t.kind == Kind::dff || t.kind == Kind::dffn;
    if (seq) s += fmt::format("    ff(IQ, IQN) {{ clocked_on : \"{}CK\"; next_state : \"D\"; }}\n", t.kind == Kind::dffn ? "!" : "");
    if (seq) {
      s += fmt::format("    pin(CK) {{ direction : input; clock : true; capacitance : {}; }}\n", t.cap);
      s += fmt::format("    pin(D) {{ direction : input; capacitance : {};\n", t.cap);
      const char* suffix = t.kind == Kind::dffn ? "falling" : "rising";
      s += fmt::format("      timing() {{ related_pin : \"CK\"; timing_type : setup_{};\n", suffix);
      s += scalar("rise_constraint", t.setup[0]) + scalar("fall_constraint", t.setup[1]) + "      }\n";
      s += fmt::format("      timing() {{ related_pin : \"CK\"; timing_type : hold_{};\n", suffix);
      s += scalar("rise_constraint", t.hold[0]) + scalar("fall_constraint", t.hold[1]) + "      }\n    }\n";
      s += "    pin(Q) { direction : output; function : \"IQ\";\n";
      s += fmt::format("      timing() {{ related_pin : \"CK\"; timing_type : {};\n",
                       t.kind == Kind::dffn ? "falling_edge" : "rising_edge");
      s += scalar("cell_rise", t.delay[0][0]) + scalar("cell_fall", t.delay[0][1]) + scalar("rise_transition", 2.0) +
           scalar("fall_transition", 2.0) + "      }\n    }\n  }\n";
      continue;
    }
    for (const auto& in : t.inputs) s += fmt::format("    pin({}) {{ direction : input; capacitance : {}; }}\n", in, t.cap);
    for (std::size_t o = 0; o < t.outputs.size(); ++o) {
      std::string fn;
      const char* sense = "positive_unate";
      switch (t.kind) {
        case Kind::buf: fn = "A"; break;
        case Kind::inv: fn = "!A"; sense = "negative_unate"; break;
        case Kind::nand: fn = "!(A&B)"; sense = "negative_unate"; break;
        case Kind::xor_: fn = "A^B"; sense = "non_unate"; break;
        case Kind::ha:
          fn = o == 0 ? "A^B" : "A&B";
          sense = o == 0 ? "non_unate" : "positive_unate";
          break;
        default: break;
      }
      s += fmt::format("    pin({}) {{ direction : output; function : \"{}\";\n", t.outputs[o], fn);
      for (std::size_t i = 0; i < t.inputs.size(); ++i) {
        const auto& d = t.delay[o * t.inputs.size() + i];
        s += fmt::format("      timing() {{ related_pin : \"{}\"; timing_sense : {};\n", t.inputs[i], sense);
        s += scalar("cell_rise", d[0]) + scalar("cell_fall", d[1]) + scalar("rise_transition", 2.0) +
             scalar("fall_transition", 2.0) + "      }\n";
      }
      s += "    }\n";
    }
    s += "  }\n";
  }
  return s + "}\n";
}

CellType make_type(Rng& r, std::string name, Kind kind) {
  CellType t{std::move(name), kind, {}, {}, {}};
  switch (kind) {
    case Kind::buf:
    case Kind::inv: t.inputs = {"A"}; t.outputs = {"Y"}; break;
    case Kind::nand:
    case Kind::xor_: t.inputs = {"A", "B"}; t.outputs = {"Y"}; break;
    case Kind::ha: t.inputs = {"A", "B"}; t.outputs = {"S", "CO"}; break;
    case Kind::dff:
    case Kind::dffn: t.inputs = {"CK", "D"}; t.outputs = {"Q"}; break;
  }
  t.cap = eighths(r, 1, 8) * 2;  // multiples of 0.25
  if (kind == Kind::dff || kind == Kind::dffn) {
    t.delay.push_back({eighths(r, 8, 40), eighths(r, 8, 40)});
    for (int e = 0; e < 2; ++e) {
      t.setup[e] = eighths(r, 0, 32);
      t.hold[e] = eighths(r, -8, 16);
    }
    return t;
  }
  for (std::size_t k = 0; k < t.inputs.size() * t.outputs.size(); ++k) t.delay.push_back({eighths(r, 2, 64), eighths(r, 2, 64)});
  return t;
}

std::vector<CellType> random_library(Rng& r) {
  std::vector<CellType> v;
  v.push_back(make_type(r, "BUF0", Kind::buf));
  v.push_back(make_type(r, "BUF1", Kind::buf));
  v.push_back(make_type(r, "DFF0", Kind::dff));
  v.push_back(make_type(r, "DFFN0", Kind::dffn));
  v.push_back(make_type(r, "INV0", Kind::inv));
  v.push_back(make_type(r, "INV1", Kind::inv));
  v.push_back(make_type(r, "NAND0", Kind::nand));
  v.push_back(make_type(r, "NAND1", Kind::nand));
  v.push_back(make_type(r, "XOR0", Kind::xor_));
  v.push_back(make_type(r, "HA0", Kind::ha));
  return v;
}

const CellType& type_named(const std::vector<CellType>& lib, std::string_view name) {
  return *std::find_if(lib.begin(), lib.end(), [&](const CellType& t) { return t.name == name; });
}

struct Instance {
  std::string name;
  std::string type;
  std::vector<std::pair<std::string, std::string>> conns;  // pin, net
};

struct Net {
  std::string driver;  // "inst:pin" or port name
  bool port_driver = false;
  std::vector<std::string> sinks;
  std::vector<bool> sink_is_port;
};

std::string format_verilog(const std::vector<std::string>& inputs, const std::vector<std::string>& outputs,
                           const std::vector<std::string>& wires, const std::vector<Instance>& cells) {
  std::string s = "module top(";
  std::vector<std::string> ports = inputs;
  ports.insert(ports.end(), outputs.begin(), outputs.end());
  s += fmt::format("{});\n", fmt::join(ports, ", "));
  for (const auto& p : inputs) s += fmt::format("  input {};\n", p);
  for (const auto& p : outputs) s += fmt::format("  output {};\n", p);
  for (const auto& w : wires) s += fmt::format("  wire {};\n", w);
  for (const auto& c : cells) {
    s += fmt::format("  {} {}(", c.type, c.name);
    for (std::size_t i = 0; i < c.conns.size(); ++i)
      s += fmt::format("{}.{}({})", i ? ", " : "", c.conns[i].first, c.conns[i].second);
    s += ");\n";
  }
  return s + "endmodule\n";
}

// Grounded trees whose resistances are powers of two and caps multiples of 0.25, so Elmore
// sums stay dyadic.
std::string format_spef(Rng& r, const std::vector<std::string>& inputs, const std::vector<std::string>& outputs,
                        const std::vector<std::pair<std::string, Net>>& nets) {
  std::string s =
      "*SPEF \"IEEE 1481-1998\"\n*DESIGN \"top\"\n*DIVIDER /\n*DELIMITER :\n*BUS_DELIMITER [ ]\n"
      "*T_UNIT 1 PS\n*C_UNIT 1 FF\n*R_UNIT 1 KOHM\n*L_UNIT 1 HENRY\n\n*PORTS\n";
  for (const auto& p : inputs) s += fmt::format("{} I\n", p);
  for (const auto& p : outputs) s += fmt::format("{} O\n", p);
  static const double kRes[] = {0.5, 1.0, 2.0};
  for (const auto& [name, net] : nets) {
    if (net.driver.empty() || net.sinks.empty()) continue;
    std::vector<std::string> caps, res;
    std::string mid = name + ":1";
    double total = 0;
    auto cap = [&](const std::string& node) {
      double c = uniform(r, 0, 4) * 0.25;
      total += c;
      if (c > 0) caps.push_back(fmt::format("{} {} {}", caps.size() + 1, node, c));
    };
    auto resistor = [&](const std::string& a, const std::string& b) {
      res.push_back(fmt::format("{} {} {} {}", res.size() + 1, a, b, kRes[uniform(r, 0, 2)]));
    };
    cap(mid);
    resistor(net.driver, mid);
    std::vector<std::string> done{mid};
    for (const auto& sk : net.sinks) {
      cap(sk);
      resistor(chance(r, 0.6) ? mid : pick(r, done), sk);
      done.push_back(sk);
    }
    s += fmt::format("\n*D_NET {} {}\n*CONN\n", name, total);
    s += fmt::format("{} {} {}\n", net.port_driver ? "*P" : "*I", net.driver, net.port_driver ? "I" : "O");
    for (std::size_t i = 0; i < net.sinks.size(); ++i)
      s += fmt::format("{} {} {}\n", net.sink_is_port[i] ? "*P" : "*I", net.sinks[i], net.sink_is_port[i] ? "O" : "I");
    s += "*CAP\n";
    for (const auto& c : caps) s += c + "\n";
    s += "*RES\n";
    for (const auto& x : res) s += x + "\n";
    s += "*END\n";
  }
  return s;
}

std::vector<std::pair<std::string, Net>> collect_nets(const std::vector<std::string>& inputs,
                                                      const std::vector<std::string>& outputs,
                                                      const std::vector<Instance>& cells,
                                                      const std::vector<CellType>& lib) {
  std::vector<std::pair<std::string, Net>> nets;
  std::unordered_map<std::string, std::size_t> index;
  auto at = [&](const std::string& n) -> Net& {
    auto [it, fresh] = index.emplace(n, nets.size());
    if (fresh) nets.push_back({n, {}});
    return nets[it->second].second;
  };
  for (const auto& p : inputs) {
    at(p).driver = p;
    at(p).port_driver = true;
  }
  for (const auto& c : cells) {
    const CellType& t = type_named(lib, c.type);
    for (const auto& [pin, net] : c.conns) {
      bool out = std::find(t.outputs.begin(), t.outputs.end(), pin) != t.outputs.end();
      Net& n = at(net);
      if (out) {
        n.driver = c.name + ":" + pin;
      } else {
        n.sinks.push_back(c.name + ":" + pin);
        n.sink_is_port.push_back(false);
      }
    }
  }
  for (const auto& p : outputs) {
    at(p).sinks.push_back(p);
    at(p).sink_is_port.push_back(true);
  }
  return nets;
}

std::string period_text(double p) { return fmt::format("{}", p); }

}  // namespace

GenDesign generate_design(std::uint64_t seed, const GenOptions& opt) {
  Rng r(seed * 0x9E3779B97F4A7C15ull + 17);
  GenDesign g;
  g.seed = seed;
  const auto lib = random_library(r);
  g.liberty = liberty_text(lib);

  const int nclk = uniform(r, 1, static_cast<int>(opt.max_clocks));
  const int nin = uniform(r, 1, 4), nout = uniform(r, 1, 4);
  const int nff = uniform(r, 1, std::max(1, static_cast<int>(opt.max_pins / 25)));
  std::vector<std::string> inputs, outputs, wires;
  for (int k = 0; k < nclk; ++k) inputs.push_back(fmt::format("clk{}", k));
  for (int k = 0; k < nin; ++k) inputs.push_back(fmt::format("in{}", k));
  for (int k = 0; k < nout; ++k) outputs.push_back(fmt::format("out{}", k));

  std::vector<Instance> cells;
  std::vector<std::string> clock_nets;
  std::size_t pins = inputs.size() + outputs.size();
  for (int k = 0; k < nclk; ++k) {
    clock_nets.push_back(fmt::format("clk{}", k));
    if (chance(r, 0.4)) {
      std::string net = fmt::format("ck{}", k);
      wires.push_back(net);
      cells.push_back({fmt::format("cb{}", k), chance(r, 0.5) ? "INV0" : "BUF0", {{"A", clock_nets.back()}, {"Y", net}}});
      clock_nets.push_back(net);
      pins += 2;
    }
  }
  pins += 3 * static_cast<std::size_t>(nff) + 2 * static_cast<std::size_t>(nout);

  struct Signal {
    std::string net;
    std::uint64_t paths;
  };
  std::vector<Signal> sigs;
  for (int k = 0; k < nin; ++k) sigs.push_back({fmt::format("in{}", k), 1});
  for (int k = 0; k < nff; ++k) {
    sigs.push_back({fmt::format("q{}", k), 1});
    wires.push_back(sigs.back().net);
  }
  const std::size_t sources = sigs.size();
  std::vector<std::string> gate_names;  // combinational cells, for exception targets

  const std::size_t budget = opt.max_pins > pins ? opt.max_pins - pins : 0;
  const std::size_t ngates = budget / 3 * static_cast<std::size_t>(uniform(r, 40, 100)) / 100;
  static const std::vector<std::string> comb = {"BUF0", "BUF1", "INV0", "INV1", "NAND0", "NAND1", "XOR0", "HA0"};
  for (std::size_t i = 0; i < ngates && pins < opt.max_pins; ++i) {
    const CellType& t = type_named(lib, pick(r, comb));
    if (pins + t.inputs.size() + t.outputs.size() > opt.max_pins) break;
    Instance c{fmt::format("g{}", i), t.name, {}};
    std::uint64_t total = 0;
    for (const auto& in : t.inputs) {
      std::size_t s = 0;
      for (int attempt = 0; attempt < 12; ++attempt) {
        const int back = std::min<int>(static_cast<int>(sigs.size()) - 1, uniform(r, 0, 8) * uniform(r, 0, 2));
        s = chance(r, 0.25) ? static_cast<std::size_t>(uniform(r, 0, static_cast<int>(sigs.size()) - 1))
                            : sigs.size() - 1 - static_cast<std::size_t>(back);
        if (total + sigs[s].paths <= opt.max_prefix_paths) break;
        s = static_cast<std::size_t>(uniform(r, 0, static_cast<int>(sources) - 1));
      }
      total += sigs[s].paths;
      c.conns.push_back({in, sigs[s].net});
    }
    for (const auto& out : t.outputs) {
      std::string net = fmt::format("n{}_{}", i, out);
      wires.push_back(net);
      c.conns.push_back({out, net});
      sigs.push_back({net, std::max<std::uint64_t>(total, 1)});
    }
    pins += t.inputs.size() + t.outputs.size();
    gate_names.push_back(c.name);
    cells.push_back(std::move(c));
  }
  auto late_signal = [&]() -> const std::string& {
    if (sigs.size() > sources && chance(r, 0.85))
      return sigs[static_cast<std::size_t>(uniform(r, static_cast<int>(sources), static_cast<int>(sigs.size()) - 1))].net;
    return pick(r, sigs).net;
  };
  std::vector<std::string> ff_names;
  for (int k = 0; k < nff; ++k) {
    Instance c{fmt::format("r{}", k), chance(r, 0.2) ? "DFFN0" : "DFF0", {}};
    c.conns = {{"CK", pick(r, clock_nets)}, {"D", late_signal()}, {"Q", fmt::format("q{}", k)}};
    ff_names.push_back(c.name);
    cells.push_back(std::move(c));
  }
  for (int k = 0; k < nout; ++k)
    cells.push_back({fmt::format("ob{}", k), "BUF1", {{"A", late_signal()}, {"Y", fmt::format("out{}", k)}}});
  g.verilog = format_verilog(inputs, outputs, wires, cells);
  if (opt.with_rc) g.spef = format_spef(r, inputs, outputs, collect_nets(inputs, outputs, cells, lib));

  // Constraints.
  static const std::vector<double> periods = {8, 10, 12, 16, 20, 24, 30, 40, 60};
  const double scale = uniform(r, 2, 6);
  std::string& sdc = g.sdc;
  std::vector<std::string> clocks;
  for (int k = 0; k < nclk; ++k) {
    const double p = pick(r, periods) * scale;
    std::string wave;
    if (chance(r, 0.3)) {
      double rise = uniform(r, 0, static_cast<int>(p)) * 0.5;
      double fall = rise + uniform(r, 1, static_cast<int>(p) - 1) * 0.5;
      wave = fmt::format(" -waveform {{{} {}}}", rise, fall);
    }
    clocks.push_back(fmt::format("clk{}", k));
    sdc += fmt::format("create_clock -name clk{} -period {}{} [get_ports clk{}]\n", k, period_text(p), wave, k);
  }
  if (chance(r, 0.4)) {
    clocks.push_back("vclk");
    sdc += fmt::format("create_clock -name vclk -period {}\n", period_text(pick(r, periods) * scale));
  }
  auto io = [&](const char* cmd, const std::string& port) {
    const double roll = std::uniform_real_distribution<double>(0, 1)(r);
    if (roll < 0.15) return;
    auto clk = [&]() -> std::string {
      if (chance(r, 0.1)) return "";
      return fmt::format(" -clock {}{}", pick(r, clocks), chance(r, 0.2) ? " -clock_fall" : "");
    };
    std::string c = clk();
    if (roll < 0.55) {
      sdc += fmt::format("{} {}{} [get_ports {}]\n", cmd, eighths(r, 0, 240), c, port);
    } else if (roll < 0.75) {
      sdc += fmt::format("{} {}{} -max [get_ports {}]\n", cmd, eighths(r, 80, 240), c, port);
      sdc += fmt::format("{} {}{} -min [get_ports {}]\n", cmd, eighths(r, 0, 80), c, port);
    } else if (roll < 0.88) {
      sdc += fmt::format("{} {}{} -rise [get_ports {}]\n", cmd, eighths(r, 0, 240), c, port);
      sdc += fmt::format("{} {}{} -fall [get_ports {}]\n", cmd, eighths(r, 0, 240), c, port);
    } else {
      sdc += fmt::format("{} {}{} [get_ports {}]\n", cmd, eighths(r, 0, 240), c, port);
      sdc += fmt::format("{} {}{} -add_delay [get_ports {}]\n", cmd, eighths(r, 0, 240), clk(), port);
    }
  };
  for (int k = 0; k < nin; ++k) io("set_input_delay", fmt::format("in{}", k));
  for (int k = 0; k < nout; ++k) io("set_output_delay", fmt::format("out{}", k));

  auto gate_pin = [&](bool output) {
    const std::string& name = pick(r, gate_names);
    const Instance& c = *std::find_if(cells.begin(), cells.end(), [&](const Instance& x) { return x.name == name; });
    const CellType& t = type_named(lib, c.type);
    const auto& pins_of = output ? t.outputs : t.inputs;
    return fmt::format("[get_pins {}/{}]", name, pick(r, pins_of));
  };
  const int nex = uniform(r, 0, static_cast<int>(opt.max_exceptions));
  for (int x = 0; x < nex; ++x) {
    std::string from, to, through;
    if (chance(r, 0.55)) {
      switch (uniform(r, 0, 3)) {
        case 0: from = fmt::format("[get_ports in{}]", uniform(r, 0, nin - 1)); break;
        case 1: from = fmt::format("[get_pins {}/CK]", pick(r, ff_names)); break;
        case 2: from = fmt::format("[get_clocks {}]", pick(r, clocks)); break;
        default: from = fmt::format("[get_cells {}]", pick(r, ff_names)); break;
      }
    }
    if (!gate_names.empty()) {
      const int segs = chance(r, 0.3) ? 0 : uniform(r, 1, 3);
      for (int s = 0; s < segs; ++s) {
        std::string objs;
        const int n = uniform(r, 1, 2);
        for (int o = 0; o < n; ++o) {
          if (o) objs += " ";
          switch (uniform(r, 0, 2)) {
            case 0: objs += gate_pin(true); break;
            case 1: objs += gate_pin(false); break;
            default: objs += fmt::format("[get_cells {}]", pick(r, gate_names)); break;
          }
        }
        through += fmt::format(" -through {}", n == 1 ? objs : "[list " + objs + "]");
      }
    }
    if (chance(r, 0.5) || (from.empty() && through.empty())) {
      switch (uniform(r, 0, 3)) {
        case 0: to = fmt::format("[get_pins {}/D]", pick(r, ff_names)); break;
        case 1: to = fmt::format("[get_ports out{}]", uniform(r, 0, nout - 1)); break;
        case 2: to = fmt::format("[get_clocks {}]", pick(r, clocks)); break;
        default: to = fmt::format("[get_cells {}]", pick(r, ff_names)); break;
      }
    }
    std::string where = (from.empty() ? "" : " -from " + from) + through + (to.empty() ? "" : " -to " + to);
    const double roll = std::uniform_real_distribution<double>(0, 1)(r);
    if (roll < 0.35) {
      sdc += fmt::format("set_false_path{}{}\n", chance(r, 0.2) ? (chance(r, 0.5) ? " -setup" : " -hold") : "", where);
    } else if (roll < 0.75) {
      const bool hold = chance(r, 0.35);
      const char* anchor = chance(r, 0.5) ? "" : (chance(r, 0.5) ? " -start" : " -end");
      sdc += fmt::format("set_multicycle_path {}{}{}{}\n", hold ? uniform(r, 1, 3) : uniform(r, 1, 4),
                         hold ? " -hold" : " -setup", anchor, where);
    } else if (roll < 0.88) {
      sdc += fmt::format("set_max_delay {}{}\n", eighths(r, 40, 800), where);
    } else {
      sdc += fmt::format("set_min_delay {}{}\n", eighths(r, -40, 160), where);
    }
  }
  return g;
}

Design build_design(const GenDesign& gen, const DelayConfig& delay, const SdfData* sdf_in) {
  LibertyLibrary lib = parse_liberty(gen.liberty, "gen.lib");
  VerilogDesign v = parse_verilog(gen.verilog, "gen.v");
  FlatNetlist nl = elaborate(v, lib, "top");
  RcStore rc(nl.num_nets());
  if (!gen.spef.empty()) rc = annotate_spef(parse_spef(gen.spef, '/', "gen.spef"), nl);
  return make_design(std::move(lib), std::move(nl), gen.sdc, std::move(rc), delay, sdf_in);
}

GenDesign generate_large(std::uint64_t seed, std::size_t ncells) {
  Rng r(seed * 0x2545F4914F6CDD1Dull + 3);
  GenDesign g;
  g.seed = seed;
  const auto lib = random_library(r);
  g.liberty = liberty_text(lib);

  const std::size_t depth = 24;
  const std::size_t nff = std::max<std::size_t>(4, ncells / 12);
  const std::size_t ngates = ncells > nff ? ncells - nff : 0;
  const std::size_t width = std::max<std::size_t>(1, ngates / depth);
  const std::size_t nin = 64, nout = 64;
  std::vector<std::string> inputs{"clk"}, outputs, wires;
  for (std::size_t k = 0; k < nin; ++k) inputs.push_back(fmt::format("in{}", k));
  for (std::size_t k = 0; k < nout; ++k) outputs.push_back(fmt::format("out{}", k));
  std::vector<Instance> cells;
  cells.reserve(ncells + nout);

  std::vector<std::string> prev;
  for (std::size_t k = 0; k < nin; ++k) prev.push_back(inputs[k + 1]);
  for (std::size_t k = 0; k < nff; ++k) {
    prev.push_back(fmt::format("q{}", k));
    wires.push_back(prev.back());
  }
  static const std::vector<std::string> comb = {"BUF0", "INV0", "INV1", "NAND0", "NAND1", "XOR0", "HA0", "HA0"};
  std::size_t made = 0;
  for (std::size_t L = 0; L < depth && made < ngates; ++L) {
    std::vector<std::string> cur;
    for (std::size_t i = 0; i < width && made < ngates; ++i, ++made) {
      const CellType& t = type_named(lib, pick(r, comb));
      Instance c{fmt::format("g{}", made), t.name, {}};
      for (const auto& in : t.inputs) c.conns.push_back({in, pick(r, prev)});
      for (const auto& out : t.outputs) {
        std::string net = fmt::format("n{}_{}", made, out);
        wires.push_back(net);
        c.conns.push_back({out, net});
        cur.push_back(net);
      }
      cells.push_back(std::move(c));
    }
    // A few long wires keep earlier layers in play.
    for (std::size_t i = 0; i < prev.size() / 16; ++i) cur.push_back(pick(r, prev));
    prev = std::move(cur);
  }
  for (std::size_t k = 0; k < nff; ++k)
    cells.push_back({fmt::format("r{}", k), "DFF0", {{"CK", "clk"}, {"D", pick(r, prev)}, {"Q", fmt::format("q{}", k)}}});
  for (std::size_t k = 0; k < nout; ++k)
    cells.push_back({fmt::format("ob{}", k), "BUF1", {{"A", pick(r, prev)}, {"Y", outputs[k]}}});
  g.verilog = format_verilog(inputs, outputs, wires, cells);
  g.spef = format_spef(r, inputs, outputs, collect_nets(inputs, outputs, cells, lib));
  g.sdc = "create_clock -name clk -period 400 [get_ports clk]\n"
          "set_input_delay 20 -clock clk [get_ports in*]\n"
          "set_output_delay 30 -clock clk [get_ports out*]\n"
          "set_false_path -from [get_ports in0] -through [get_pins g5/*] -to [get_ports out3]\n"
          "set_multicycle_path 2 -setup -to [get_pins r1*/D]\n";
  return g;
}

}  // namespace test
