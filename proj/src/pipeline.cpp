#include "ministra/pipeline.hpp"

#include <fmt/format.h>

#include <chrono>
#include <new>
#include <ostream>

#include "ministra/log.hpp"
#include "ministra/parallel.hpp"
#include "ministra/verilog.hpp"

namespace ministra {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::size_t chunks() { return std::max<std::size_t>(1, thread_count()); }

}  // namespace

void analyze_design(Design& d, const DelayConfig& delay, const TimingOptions& options) {
  auto t0 = Clock::now();
  d.graph = build_graph(d.netlist, d.lib, d.constraints);
  d.case_result = apply_case_analysis(d.graph, d.netlist, d.lib, d.constraints);
  levelize(d.graph, &d.netlist);
  d.times.graph = since(t0);
  t0 = Clock::now();
  d.arcs = compute_all_arcs(d.graph, d.netlist, d.lib, d.constraints, d.rc, delay, d.sdf_in ? &*d.sdf_in : nullptr);
  d.times.delay = since(t0);
  t0 = Clock::now();
  d.state = analyze(d.graph, d.netlist, d.lib, d.constraints, d.arcs, options);
  d.times.propagate = since(t0);
  log::debug("graph {:.3f}s delay {:.3f}s propagate {:.3f}s", d.times.graph, d.times.delay, d.times.propagate);
}

Design make_design(LibertyLibrary lib, FlatNetlist netlist, std::string_view sdc, RcStore rc, const DelayConfig& delay,
                   const SdfData* sdf_in) {
  Design d;
  d.lib = std::move(lib);
  d.netlist = std::move(netlist);
  d.constraints = eval_sdc(sdc, d.netlist, d.lib);
  d.rc = rc.nets.empty() ? RcStore(d.netlist.num_nets()) : std::move(rc);
  if (sdf_in) d.sdf_in = *sdf_in;
  analyze_design(d, delay);
  return d;
}

Design load_design(const RunConfig& cfg) {
  Design d;
  auto t0 = Clock::now();
  std::vector<SourceText> libs;
  for (const auto& p : cfg.liberty) libs.push_back(read_source(p));
  d.lib = parse_liberty(libs);

  if (!cfg.verilog.empty()) {
    SourceText v = read_source(cfg.verilog);
    VerilogDesign vd = parse_verilog_chunked(v.bytes, chunks(), v.name);
    d.netlist = elaborate(vd, d.lib, cfg.top);
    d.source = cfg.verilog;
  } else {
    d.netlist = ingest_flat(read_netlist_bundle(cfg.netlist_bundle), d.lib);
    d.source = cfg.netlist_bundle;
  }

  if (!cfg.sdc.empty()) {
    SourceText s = read_source(cfg.sdc);
    d.constraints = eval_sdc(s.bytes, d.netlist, d.lib, s.name);
  } else {
    d.constraints.time_unit_ps = d.lib.time_unit_ps;
    d.constraints.cap_unit_ff = d.lib.cap_unit_ff;
  }

  if (!cfg.spef.empty()) {
    SourceText s = read_source(cfg.spef);
    d.rc = annotate_spef(parse_spef_chunked(s.bytes, chunks(), '/', s.name), d.netlist);
  } else if (!cfg.rc_bundle.empty()) {
    d.rc = ingest_flat_rc(read_rc_bundle(cfg.rc_bundle), d.netlist);
  } else if (!cfg.steiner_positions.empty()) {
    d.rc = build_steiner_all(d.netlist, read_source(cfg.steiner_positions).bytes, cfg.steiner);
  } else {
    d.rc = RcStore(d.netlist.num_nets());
  }

  if (!cfg.sdf_in.empty()) {
    SourceText s = read_source(cfg.sdf_in);
    d.sdf_in = parse_sdf_chunked(s.bytes, chunks(), s.name);
  }
  d.times.parse = since(t0);
  analyze_design(d, cfg.delay);
  return d;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    std::size_t sources = !cfg.verilog.empty() + !cfg.netlist_bundle.empty();
    if (cfg.liberty.empty()) throw std::invalid_argument("at least one --lib is required");
    if (sources != 1) throw std::invalid_argument("give exactly one of --verilog and --netlist-bundle");
    if (!cfg.spef.empty() + !cfg.rc_bundle.empty() + !cfg.steiner_positions.empty() > 1)
      throw std::invalid_argument("give at most one of --spef, --rc-bundle and --steiner");
    set_thread_count(cfg.threads);
    Design d = load_design(cfg);
    auto t0 = Clock::now();
    out << timing_summary(d.state);
    if (!cfg.write_sdf.empty()) write_file(cfg.write_sdf, write_sdf(d.arcs, d.graph, d.netlist, d.lib));
    PathSet paths;
    if (cfg.report_timing || !cfg.export_arrays.empty())
      paths = report_paths(d.state, d.graph, d.netlist, d.lib, d.arcs, cfg.query);
    if (cfg.report_timing) {
      out << "\n";
      out << format_paths_text(paths, d.netlist, d.state);
    }
    if (!cfg.slack_csv.empty()) write_file(cfg.slack_csv, slack_csv(d.state, d.netlist));
    if (!cfg.export_arrays.empty()) write_arrays(cfg.export_arrays, collect_arrays(d.state, &paths));
    d.times.report = since(t0);
    log::info("phases: parse {:.3f}s graph {:.3f}s delay {:.3f}s propagate {:.3f}s report {:.3f}s", d.times.parse,
              d.times.graph, d.times.delay, d.times.propagate, d.times.report);
    return 0;
  } catch (const std::invalid_argument& e) {
    err << "ERROR 1: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    err << "ERROR 2: " << e.what() << "\n";
    return 2;
  } catch (const SemanticError& e) {
    err << "ERROR 3: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "ERROR 2: " << e.what() << "\n";
    return 2;
  } catch (const std::bad_alloc&) {
    err << "ERROR 2: out of memory\n";
    return 2;
  }
}

}  // namespace ministra
