#include "ministra/report.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <nlohmann/json.hpp>

#include "ministra/io.hpp"

namespace ministra {

namespace fs = std::filesystem;

std::string format_ps(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0) v = 0;  // no "-0.000"
  std::string s = fmt::format("{:.3f}", v);
  return s == "-0.000" ? "0.000" : s;
}

SdfData make_sdf(const ArcTiming& at, const TimingGraph& g, const FlatNetlist& nl, const LibertyLibrary& lib) {
  SdfData d;
  d.design = nl.design;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (g.disabled[e] || g.edge_kind[e] != EdgeKind::cell_delay_arc) continue;
    const PinId a = g.edge_from[e], b = g.edge_to[e];
    const CellId c = nl.pin_cell[a];
    const LibertyCell& cell = lib.cells[nl.cell_lib[c]];
    const TimingArc& arc = *g.arc(e, nl, lib);
    SdfIopath p;
    p.instance = nl.cell_names[c];
    p.cell_type = cell.name;
    p.from_pin = cell.pins[nl.pin_lib_pin[a]].name;
    p.to_pin = cell.pins[nl.pin_lib_pin[b]].name;
    if (is_clock_to_q(arc.kind))
      p.from_edge = active_clock_edge(arc.kind) == RiseFall::rise ? SdfEdge::posedge : SdfEdge::negedge;
    p.rise = SdfValue::early_late(at.delay[e][kEarly][kRise], at.delay[e][kLate][kRise]);
    p.fall = SdfValue::early_late(at.delay[e][kEarly][kFall], at.delay[e][kLate][kFall]);
    d.iopaths.push_back(std::move(p));
  }
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (g.disabled[e] || g.edge_kind[e] != EdgeKind::net_arc) continue;
    SdfInterconnect ic;
    ic.from = nl.pin_names[g.edge_from[e]];
    ic.to = nl.pin_names[g.edge_to[e]];
    ic.rise = SdfValue::early_late(at.delay[e][kEarly][kRise], at.delay[e][kLate][kRise]);
    ic.fall = SdfValue::early_late(at.delay[e][kEarly][kFall], at.delay[e][kLate][kFall]);
    d.interconnects.push_back(std::move(ic));
  }
  return d;
}

std::string write_sdf(const ArcTiming& at, const TimingGraph& g, const FlatNetlist& nl, const LibertyLibrary& lib) {
  return format_sdf(make_sdf(at, g, nl, lib));
}

TimingArrays collect_arrays(const TimingState& st, const PathSet* paths) {
  TimingArrays a;
  a.pin_slack_setup = pin_slacks(st, CheckMode::setup);
  a.pin_slack_hold = pin_slacks(st, CheckMode::hold);
  a.pin_arrival_late.assign(st.entries.size(), -kInf);
  a.pin_arrival_early.assign(st.entries.size(), kInf);
  for (std::size_t p = 0; p < st.entries.size(); ++p)
    for (const TagEntry& e : st.entries[p])
      for (int rf = 0; rf < 2; ++rf) {
        a.pin_arrival_late[p] = std::max(a.pin_arrival_late[p], e.arr[kLate][rf]);
        if (e.arr[kLate][rf] > -kInf) a.pin_arrival_early[p] = std::min(a.pin_arrival_early[p], e.arr[kEarly][rf]);
      }
  for (std::size_t i = 0; i < st.endpoints.size(); ++i) {
    a.endpoint_pin.push_back(st.endpoints[i].pin);
    a.endpoint_setup_slack.push_back(st.setup_slack[i]);
    a.endpoint_hold_slack.push_back(st.hold_slack[i]);
  }
  if (paths) a.paths = *paths;
  return a;
}

namespace {

void write_u8(const std::string& path, const std::vector<std::uint8_t>& v) {
  write_file(path, std::string_view(reinterpret_cast<const char*>(v.data()), v.size()));
}

std::vector<std::uint8_t> read_u8(const std::string& path) {
  std::string s = read_file_raw(path);
  return {s.begin(), s.end()};
}

constexpr int kArraysVersion = 1;

}  // namespace

void write_arrays(const std::string& dir, const TimingArrays& a) {
  fs::create_directories(dir);
  auto p = [&](const char* f) { return (fs::path(dir) / f).string(); };
  write_f64(p("pin_slack_setup.f64"), a.pin_slack_setup);
  write_f64(p("pin_slack_hold.f64"), a.pin_slack_hold);
  write_f64(p("pin_arrival_late.f64"), a.pin_arrival_late);
  write_f64(p("pin_arrival_early.f64"), a.pin_arrival_early);
  write_u32(p("endpoint_pin.u32"), a.endpoint_pin);
  write_f64(p("endpoint_setup_slack.f64"), a.endpoint_setup_slack);
  write_f64(p("endpoint_hold_slack.f64"), a.endpoint_hold_slack);
  const PathSet& ps = a.paths;
  write_u32(p("path_offsets.u32"), ps.offsets);
  write_u32(p("path_pins.u32"), ps.pins);
  write_f64(p("path_pin_arrival.f64"), ps.arrival);
  write_f64(p("path_pin_incr.f64"), ps.incr);
  write_u8(p("path_pin_edge.u8"), ps.edge);
  write_f64(p("path_slack.f64"), ps.slack);
  write_f64(p("path_required.f64"), ps.required);
  write_u32(p("path_endpoint.u32"), ps.endpoint);
  write_u32(p("path_launch_event.u32"), ps.launch);
  write_u32(p("path_capture_event.u32"), ps.capture);
  nlohmann::json m = {{"format", "ministra-timing"},
                      {"version", kArraysVersion},
                      {"pins", a.pin_slack_setup.size()},
                      {"endpoints", a.endpoint_pin.size()},
                      {"paths", ps.size()},
                      {"path_mode", ps.mode == CheckMode::setup ? "setup" : "hold"},
                      {"units", {{"time", "ps"}}},
                      {"unconstrained", "+inf"},
                      {"event", "clock_id * 2 + edge (0 rise, 1 fall)"}};
  write_file(p("manifest.json"), m.dump(2) + "\n");
}

TimingArrays read_arrays(const std::string& dir) {
  auto p = [&](const char* f) { return (fs::path(dir) / f).string(); };
  auto m = nlohmann::json::parse(read_file_raw(p("manifest.json")));
  if (m.value("format", "") != "ministra-timing" || m.value("version", 0) != kArraysVersion)
    throw Error(fmt::format("{}: unsupported timing array bundle (format {}, version {})", dir,
                            m.value("format", "?"), m.value("version", 0)));
  TimingArrays a;
  a.pin_slack_setup = read_f64(p("pin_slack_setup.f64"));
  a.pin_slack_hold = read_f64(p("pin_slack_hold.f64"));
  a.pin_arrival_late = read_f64(p("pin_arrival_late.f64"));
  a.pin_arrival_early = read_f64(p("pin_arrival_early.f64"));
  a.endpoint_pin = read_u32(p("endpoint_pin.u32"));
  a.endpoint_setup_slack = read_f64(p("endpoint_setup_slack.f64"));
  a.endpoint_hold_slack = read_f64(p("endpoint_hold_slack.f64"));
  PathSet& ps = a.paths;
  ps.offsets = read_u32(p("path_offsets.u32"));
  ps.pins = read_u32(p("path_pins.u32"));
  ps.arrival = read_f64(p("path_pin_arrival.f64"));
  ps.incr = read_f64(p("path_pin_incr.f64"));
  ps.edge = read_u8(p("path_pin_edge.u8"));
  ps.slack = read_f64(p("path_slack.f64"));
  ps.required = read_f64(p("path_required.f64"));
  ps.endpoint = read_u32(p("path_endpoint.u32"));
  ps.launch = read_u32(p("path_launch_event.u32"));
  ps.capture = read_u32(p("path_capture_event.u32"));
  ps.mode = m.value("path_mode", "setup") == "hold" ? CheckMode::hold : CheckMode::setup;
  if (ps.offsets.empty() || ps.offsets.back() != ps.pins.size() || ps.slack.size() + 1 != ps.offsets.size())
    throw Error(fmt::format("{}: path arrays are inconsistent", dir));
  return a;
}

std::string slack_csv(const TimingState& st, const FlatNetlist& nl) {
  std::string s = "endpoint,setup_slack,hold_slack\n";
  for (std::size_t i = 0; i < st.endpoints.size(); ++i)
    s += fmt::format("{},{},{}\n", nl.pin_names[st.endpoints[i].pin], format_ps(st.setup_slack[i]),
                     format_ps(st.hold_slack[i]));
  return s;
}

std::string timing_summary(const TimingState& st) {
  std::string s = fmt::format("{:<16} {:>12} {:>12} {:>12} {:>12}\n", "clock", "setup_wns", "setup_tns", "hold_wns",
                              "hold_tns");
  auto row = [&](const std::string& name, std::optional<ClockId> c) {
    WnsTns su = wns_tns(st, CheckMode::setup, c), ho = wns_tns(st, CheckMode::hold, c);
    s += fmt::format("{:<16} {:>12} {:>12} {:>12} {:>12}\n", name, format_ps(su.wns), format_ps(su.tns),
                     format_ps(ho.wns), format_ps(ho.tns));
  };
  std::vector<std::uint8_t> used(st.clocks.clocks.size(), 0);
  for (const Endpoint& ep : st.endpoints)
    for (const CaptureContext& ctx : ep.contexts) used[event_clock(ctx.event)] = 1;
  for (ClockId c = 0; c < st.clocks.clocks.size(); ++c)
    if (used[c]) row(st.clocks.name(c), c);
  row("(all)", std::nullopt);
  WnsTns su = wns_tns(st, CheckMode::setup);
  s += fmt::format("endpoints {} constrained {} unconstrained {} setup_violations {}\n", st.endpoints.size(),
                   su.endpoints, st.unconstrained, su.violations);
  return s;
}

}  // namespace ministra
