#include "ministra/delay.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <unordered_map>

#include "ministra/log.hpp"
#include "ministra/parallel.hpp"

namespace ministra {

namespace {

constexpr double kMinSlew = 1e-3;
const double kLn9 = std::log(9.0);

// Segment index and fraction along one axis; fractions outside [0, 1] extrapolate.
std::pair<std::size_t, double> locate(const std::vector<double>& axis, double x) {
  if (axis.size() < 2) return {0, 0.0};
  auto it = std::upper_bound(axis.begin(), axis.end(), x);
  std::size_t i = it == axis.begin() ? 0 : static_cast<std::size_t>(it - axis.begin()) - 1;
  i = std::min(i, axis.size() - 2);
  double span = axis[i + 1] - axis[i];
  return {i, span > 0 ? (x - axis[i]) / span : 0.0};
}

const Lut2D* pick(const std::optional<Lut2D>& want, const std::optional<Lut2D>& other) {
  if (want) return &*want;
  if (other) return &*other;
  return nullptr;
}

// y = G^-1 (w .* x) on a tree grounded at an ideal source at the root.
void tree_solve(const RcTree& t, const std::vector<double>& w, const std::vector<double>& x, std::vector<double>& acc,
                std::vector<double>& y) {
  const std::size_t n = t.order.size();
  acc.resize(n);
  y.resize(n);
  for (std::size_t i = 0; i < n; ++i) acc[i] = w[i] * x[i];
  for (std::size_t k = n; k-- > 1;) {
    auto v = t.order[k];
    acc[t.parent[v]] += acc[v];
  }
  y[t.order[0]] = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    auto v = t.order[k];
    y[v] = y[t.parent[v]] + t.res[v] * acc[v];
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

double lut_eval(const Lut2D& t, double slew, double cap) {
  if (t.values.empty()) return 0.0;
  if (t.values.size() == 1) return t.values[0];
  auto [r, fr] = locate(t.index_1, slew);
  auto [c, fc] = locate(t.index_2, cap);
  const bool two_r = t.rows() > 1, two_c = t.cols() > 1;
  double v00 = t.at(r, c);
  double v01 = two_c ? t.at(r, c + 1) : v00;
  double v10 = two_r ? t.at(r + 1, c) : v00;
  double v11 = two_r && two_c ? t.at(r + 1, c + 1) : (two_r ? v10 : v01);
  double a = v00 + (v01 - v00) * fc;
  double b = v10 + (v11 - v10) * fc;
  return a + (b - a) * fr;
}

ArcDelay cell_arc(const TimingArc& arc, const ModeEdge<double>& in_slew, double load) {
  ArcDelay out;
  for (int o = 0; o < 2; ++o) {
    const Lut2D* td = o == kRise ? pick(arc.cell_rise, arc.cell_fall) : pick(arc.cell_fall, arc.cell_rise);
    const Lut2D* ts = o == kRise ? pick(arc.rise_transition, arc.fall_transition)
                                 : pick(arc.fall_transition, arc.rise_transition);
    int inputs[2];
    int count = 0;
    if (is_clock_to_q(arc.kind)) {
      inputs[count++] = static_cast<int>(active_clock_edge(arc.kind));
    } else if (arc.sense == TimingSense::positive_unate) {
      inputs[count++] = o;
    } else if (arc.sense == TimingSense::negative_unate) {
      inputs[count++] = 1 - o;
    } else {
      inputs[count++] = 0;
      inputs[count++] = 1;
    }
    for (int m = 0; m < 2; ++m) {
      double d = m == kLate ? -kInf : kInf, s = d;
      for (int k = 0; k < count; ++k) {
        double sl = in_slew[m][inputs[k]];
        double dv = td ? lut_eval(*td, sl, load) : 0.0;
        double sv = ts ? lut_eval(*ts, sl, load) : sl;
        if (m == kLate) {
          d = std::max(d, dv);
          s = std::max(s, sv);
        } else {
          d = std::min(d, dv);
          s = std::min(s, sv);
        }
      }
      out.delay[m][o] = std::max(0.0, d);
      out.slew[m][o] = std::max(kMinSlew, s);
    }
  }
  return out;
}

ModeEdge<double> check_margin(const TimingArc& arc, const ModeEdge<double>& data_slew,
                              const ModeEdge<double>& clock_slew) {
  ModeEdge<double> out{};
  const int a = static_cast<int>(active_clock_edge(arc.kind));
  for (int m = 0; m < 2; ++m)
    for (int d = 0; d < 2; ++d) {
      const std::optional<Lut2D>& t = d == kRise ? arc.rise_constraint : arc.fall_constraint;
      out[m][d] = t ? lut_eval(*t, data_slew[m][d], clock_slew[m][a]) : 0.0;
    }
  return out;
}

ElmoreResult elmore(const RcNet& rc) { return elmore(rc, make_tree(rc)); }

ElmoreResult elmore(const RcNet& rc, const RcTree& t) {
  ElmoreResult r;
  std::vector<double> ones(rc.num_nodes(), 1.0), acc;
  tree_solve(t, rc.cap, ones, acc, r.delay);
  r.impulse.resize(r.delay.size());
  for (std::size_t i = 0; i < r.delay.size(); ++i) r.impulse[i] = kLn9 * r.delay[i];
  return r;
}

std::vector<std::vector<double>> rc_moments(const RcNet& rc, std::size_t count) {
  const std::size_t n = rc.num_nodes();
  std::vector<std::vector<double>> m(n, std::vector<double>(count, 0.0));
  if (n == 0 || count == 0) return m;
  RcTree t = make_tree(rc);
  std::vector<double> x(n, 1.0), y, acc;
  x[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) m[i][0] = 1.0;
  m[0][0] = 1.0;
  for (std::size_t k = 1; k < count; ++k) {
    tree_solve(t, rc.cap, x, acc, y);
    for (std::size_t i = 0; i < n; ++i) x[i] = -y[i];
    for (std::size_t i = 1; i < n; ++i) m[i][k] = x[i];
  }
  return m;
}

double SinkModel::moment(std::size_t k) const {
  if (order == 0) return k == 0 ? 1.0 : 0.0;
  std::vector<double> x(order, 0.0), y(order);
  x[0] = 1.0;
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t a = 0; a < order; ++a) {
      double s = 0;
      for (std::size_t b = 0; b < order; ++b) s += t[a * order + b] * x[b];
      y[a] = -s;
    }
    x.swap(y);
  }
  return x[0];
}

ReducedModel arnoldi_reduce(const RcNet& rc, std::size_t q, std::vector<std::uint32_t> nodes) {
  ReducedModel model;
  const std::size_t n = rc.num_nodes();
  model.total_cap = rc.total_cap();
  if (nodes.empty())
    for (std::uint32_t i = 1; i < n; ++i) nodes.push_back(i);
  model.nodes = nodes;
  model.sinks.resize(nodes.size());
  if (n < 2 || q == 0) return model;
  const RcTree t = make_tree(rc);
  std::vector<double> unit(n, 1.0), acc, tmp;
  auto apply_a = [&](const std::vector<double>& x, std::vector<double>& y) { tree_solve(t, rc.cap, x, acc, y); };
  auto apply_at = [&](const std::vector<double>& x, std::vector<double>& y) {
    tree_solve(t, unit, x, acc, y);
    for (std::size_t i = 0; i < n; ++i) y[i] *= rc.cap[i];
  };

  std::vector<double> r0(n, 1.0);
  r0[0] = 0.0;
  const double r0n = norm(r0);

  for (std::size_t s = 0; s < nodes.size(); ++s) {
    SinkModel& sm = model.sinks[s];
    std::vector<std::vector<double>> V, W, AV;
    std::vector<double> v(n), w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i] = r0[i] / r0n;
    w[nodes[s]] = r0n;
    std::vector<double> u, z;
    for (std::size_t k = 0; k < q; ++k) {
      V.push_back(v);
      W.push_back(w);
      apply_a(v, u);
      AV.push_back(u);
      apply_at(w, z);
      const double un = norm(u), zn = norm(z);
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t j = 0; j < V.size(); ++j) {
          double cu = dot(W[j], u), cz = dot(V[j], z);
          for (std::size_t i = 0; i < n; ++i) {
            u[i] -= cu * V[j][i];
            z[i] -= cz * W[j][i];
          }
        }
      if (k + 1 == q) break;
      const double du = norm(u), dz = norm(z), delta = dot(z, u);
      if (du <= 1e-12 * un || dz <= 1e-12 * zn || std::fabs(delta) <= 1e-14 * du * dz || un == 0 || zn == 0) break;
      const double sc = std::sqrt(std::fabs(delta));
      for (std::size_t i = 0; i < n; ++i) {
        v[i] = u[i] / sc;
        w[i] = z[i] / sc * (delta < 0 ? -1.0 : 1.0);
      }
    }
    const std::size_t m = V.size();
    model.order = std::max(model.order, m);
    Eigen::MatrixXd T(m, m);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) T(a, b) = dot(W[a], AV[b]);
    sm.order = m;
    sm.t.resize(m * m);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) sm.t[a * m + b] = T(a, b);
    // With positive off-diagonal products T is similar to a symmetric tridiagonal matrix and the
    // residues are squares of the eigenvector heads.
    bool symmetric = true;
    Eigen::VectorXd diag(m), off(m > 1 ? m - 1 : 0);
    for (std::size_t a = 0; a < m; ++a) diag[a] = T(a, a);
    for (std::size_t a = 0; a + 1 < m; ++a) {
      double p = T(a, a + 1) * T(a + 1, a);
      if (!(p > 0)) symmetric = false;
      off[a] = std::sqrt(std::max(p, 0.0));
    }
    if (symmetric) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
      es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
      if (es.info() != Eigen::Success) sm.stable = false;
      const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-30);
      for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
        double tau = es.eigenvalues()[j];
        if (tau < -1e-12 * scale) sm.stable = false;
        double head = es.eigenvectors()(0, j);
        sm.tau.push_back(std::max(0.0, tau));
        sm.residue.push_back(head * head);
      }
    } else {
      Eigen::EigenSolver<Eigen::MatrixXd> es(T);
      if (es.info() != Eigen::Success) {
        sm.stable = false;
      } else {
        Eigen::MatrixXcd S = es.eigenvectors();
        Eigen::MatrixXcd Si = S.inverse();
        const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-30);
        for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
          std::complex<double> lam = es.eigenvalues()[j], c = S(0, j) * Si(j, 0);
          if (std::fabs(lam.imag()) > 1e-9 * scale || lam.real() < -1e-12 * scale) sm.stable = false;
          sm.tau.push_back(std::max(0.0, lam.real()));
          sm.residue.push_back(c.real());
        }
      }
    }
    if (!sm.stable) model.stable = false;
  }
  return model;
}

NetResponse sink_response(const SinkModel& m, double drv_slew, const RampThresholds& th) {
  NetResponse r;
  if (!m.stable) {
    r.fallback = true;
    return r;
  }
  const double tr = drv_slew > 0 ? drv_slew / (th.high - th.low) : 0.0;
  double tmax = 0;
  for (double t : m.tau) tmax = std::max(tmax, t);
  auto step_int = [&](double t) {  // integral of the step response
    if (t <= 0) return 0.0;
    double s = 0;
    for (std::size_t j = 0; j < m.tau.size(); ++j) {
      double tau = m.tau[j];
      s += m.residue[j] * (tau > 0 ? t - tau * -std::expm1(-t / tau) : t);
    }
    return s;
  };
  auto y = [&](double t) {
    if (t <= 0) return 0.0;
    if (tr <= 1e-9) {
      double s = 0;
      for (std::size_t j = 0; j < m.tau.size(); ++j)
        s += m.residue[j] * (m.tau[j] > 0 ? -std::expm1(-t / m.tau[j]) : 1.0);
      return s;
    }
    return (step_int(t) - step_int(t - tr)) / tr;
  };
  auto cross = [&](double level, double& out) {
    double lo = 0, hi = std::max({tr, tmax, 1e-6});
    int guard = 0;
    while (y(hi) < level) {
      lo = hi;
      hi *= 2;
      if (++guard > 200) return false;
    }
    while (hi - lo > 1e-6) {
      double mid = 0.5 * (lo + hi);
      (y(mid) < level ? lo : hi) = mid;
      if (++guard > 400) break;
    }
    out = 0.5 * (lo + hi);
    return true;
  };
  double t50, tlo, thi;
  if (!cross(0.5, t50) || !cross(th.low, tlo) || !cross(th.high, thi)) {
    r.fallback = true;
    return r;
  }
  r.delay = std::max(0.0, t50 - tr / 2);
  r.slew = std::max(kMinSlew, thi - tlo);
  return r;
}

std::vector<NetResponse> arnoldi_delay(const ReducedModel& model, double drv_slew, const ElmoreResult& el,
                                       const RampThresholds& th) {
  std::vector<NetResponse> out(model.nodes.size());
  for (std::size_t s = 0; s < model.nodes.size(); ++s) {
    out[s] = sink_response(model.sinks[s], drv_slew, th);
    if (out[s].fallback) {
      auto node = model.nodes[s];
      out[s].delay = el.delay[node];
      out[s].slew = net_slew(drv_slew, el.impulse[node]);
    }
  }
  return out;
}

double net_slew(double drv_slew, double impulse) { return std::sqrt(drv_slew * drv_slew + impulse * impulse); }

ModeEdge<double> source_slew(PinId pin, const LibertyLibrary& lib, const Constraints& c) {
  const double def = lib.default_slew();
  ModeEdge<double> s{{{def, def}, {def, def}}};
  auto it = c.input_slew.find(pin);
  if (it != c.input_slew.end())
    for (int m = 0; m < 2; ++m)
      for (int e = 0; e < 2; ++e)
        if (!std::isnan(it->second[m][e])) s[m][e] = std::max(kMinSlew, it->second[m][e]);
  return s;
}

namespace {

struct NetModel {
  bool present = false;
  ElmoreResult el;
  ReducedModel red;
  std::vector<std::uint32_t> sink_slot;  // node -> index into red.sinks
};

std::string key3(std::string_view a, std::string_view b, std::string_view c) {
  std::string k;
  k.reserve(a.size() + b.size() + c.size() + 2);
  k.append(a).push_back('\x1f');
  k.append(b).push_back('\x1f');
  k.append(c);
  return k;
}

}  // namespace

ArcTiming compute_all_arcs(const TimingGraph& g, const FlatNetlist& nl, const LibertyLibrary& lib,
                           const Constraints& cons, const RcStore& rc, const DelayConfig& cfg, const SdfData* sdf) {
  ArcTiming at;
  const std::size_t ne = g.num_edges(), np = nl.num_pins(), nn = nl.num_nets();
  at.delay.assign(ne, ModeEdge<double>{});
  at.slew.assign(ne, ModeEdge<double>{});
  at.pin_slew.assign(np, ModeEdge<double>{});
  at.net_load.assign(nn, 0.0);

  auto pin_cap = [&](PinId p) -> double {
    if (nl.is_port(p)) {
      auto it = cons.port_load.find(p);
      return it != cons.port_load.end() ? it->second : 0.0;
    }
    if (nl.is_driver(p)) return 0.0;
    const LibertyCell& cell = lib.cells[nl.cell_lib[nl.pin_cell[p]]];
    return cell.pins[nl.pin_lib_pin[p]].capacitance;
  };

  std::vector<std::uint32_t> pin_node(np, kInvalidId);
  std::vector<NetModel> models(nn);
  std::atomic<std::size_t> unstable{0};
  parallel_for(nn, [&](std::size_t n) {
    double load = 0;
    for (auto k = nl.net_pin_offsets[n]; k < nl.net_pin_offsets[n + 1]; ++k) load += pin_cap(nl.net_pins[k]);
    if (!rc.has(static_cast<NetId>(n))) {
      at.net_load[n] = load;
      return;
    }
    RcNet loaded = rc.nets[n];
    for (std::uint32_t i = 0; i < loaded.num_nodes(); ++i)
      if (loaded.node_pin[i] != kInvalidId) {
        pin_node[loaded.node_pin[i]] = i;
        loaded.cap[i] += pin_cap(loaded.node_pin[i]);
      }
    at.net_load[n] = loaded.total_cap();
    NetModel& m = models[n];
    m.present = true;
    RcTree t = make_tree(loaded);
    m.el = elmore(loaded, t);
    if (cfg.model == DelayModel::arnoldi) {
      std::vector<std::uint32_t> sinks;
      for (std::uint32_t i = 1; i < loaded.num_nodes(); ++i)
        if (loaded.node_pin[i] != kInvalidId) sinks.push_back(i);
      m.sink_slot.assign(loaded.num_nodes(), kInvalidId);
      for (std::uint32_t s = 0; s < sinks.size(); ++s) m.sink_slot[sinks[s]] = s;
      if (!sinks.empty()) {
        m.red = arnoldi_reduce(loaded, std::min(cfg.order, loaded.num_nodes()), sinks);
        if (!m.red.stable) ++unstable;
      }
    }
  });

  // SDF delays replace computed ones per arc and output edge.
  std::vector<std::array<std::optional<double>, 2>> sdf_delay[2];
  if (sdf) {
    std::unordered_map<std::string, std::vector<EdgeId>> by_key;
    for (EdgeId e = 0; e < ne; ++e) {
      PinId a = g.edge_from[e], b = g.edge_to[e];
      if (g.edge_kind[e] == EdgeKind::net_arc) {
        by_key[key3("", nl.pin_names[a], nl.pin_names[b])].push_back(e);
      } else if (g.edge_kind[e] == EdgeKind::cell_delay_arc) {
        const LibertyCell& cell = lib.cells[nl.cell_lib[nl.pin_cell[a]]];
        by_key[key3(nl.cell_names[nl.pin_cell[a]], cell.pins[nl.pin_lib_pin[a]].name, cell.pins[nl.pin_lib_pin[b]].name)]
            .push_back(e);
      }
    }
    for (auto& v : sdf_delay) v.assign(ne, {});
    std::size_t unmatched = 0;
    auto apply = [&](const std::string& key, const SdfValue& rise, const SdfValue& fall) {
      auto it = by_key.find(key);
      if (it == by_key.end()) {
        ++unmatched;
        return;
      }
      for (EdgeId e : it->second) {
        const SdfValue* vals[2] = {&rise, &fall};
        for (int o = 0; o < 2; ++o) {
          if (vals[o]->empty()) continue;
          sdf_delay[kEarly][e][o] = vals[o]->early();
          sdf_delay[kLate][e][o] = vals[o]->late();
        }
      }
    };
    for (const auto& p : sdf->iopaths) apply(key3(p.instance, p.from_pin, p.to_pin), p.rise, p.fall);
    for (const auto& p : sdf->interconnects) apply(key3("", p.from, p.to), p.rise, p.fall);
    if (unmatched) log::warn("SDF: {} entries do not match any timing arc", unmatched);
  }

  std::atomic<std::size_t> fallbacks{0}, annotated{0};
  auto eval_edge = [&](EdgeId e) {
    const PinId a = g.edge_from[e], b = g.edge_to[e];
    const ModeEdge<double>& in = at.pin_slew[a];
    if (g.edge_kind[e] == EdgeKind::net_arc) {
      const NetId n = nl.pin_net[b];
      const NetModel& m = models[n];
      const std::uint32_t node = pin_node[b];
      for (int md = 0; md < 2; ++md)
        for (int rf = 0; rf < 2; ++rf) {
          double d = 0, s = in[md][rf];
          if (m.present && node != kInvalidId) {
            d = m.el.delay[node];
            s = net_slew(in[md][rf], m.el.impulse[node]);
            if (cfg.model == DelayModel::arnoldi && m.sink_slot[node] != kInvalidId) {
              NetResponse r = sink_response(m.red.sinks[m.sink_slot[node]], in[md][rf], cfg.thresholds);
              if (r.fallback) {
                ++fallbacks;
              } else {
                d = r.delay;
                s = r.slew;
              }
            }
          }
          at.delay[e][md][rf] = d;
          at.slew[e][md][rf] = std::max(kMinSlew, s);
        }
    } else {
      const TimingArc& arc = *g.arc(e, nl, lib);
      ArcDelay r = cell_arc(arc, in, at.net_load[nl.pin_net[b]]);
      at.delay[e] = r.delay;
      at.slew[e] = r.slew;
    }
    if (sdf) {
      bool any = false;
      for (int md = 0; md < 2; ++md)
        for (int rf = 0; rf < 2; ++rf)
          if (sdf_delay[md][e][rf]) {
            at.delay[e][md][rf] = std::max(0.0, *sdf_delay[md][e][rf]);
            any = true;
          }
      if (any) ++annotated;
    }
  };

  for (std::size_t L = 0; L < g.num_levels(); ++L) {
    const std::uint32_t lb = g.level_offsets[L], le = g.level_offsets[L + 1];
    parallel_for(le - lb, [&](std::size_t i) {
      const PinId v = g.level_nodes[lb + i];
      ModeEdge<double> s{{{kInf, kInf}, {-kInf, -kInf}}};
      bool any = false;
      for (auto k = g.fanin_offsets[v]; k < g.fanin_offsets[v + 1]; ++k) {
        EdgeId e = g.fanin_edges[k];
        if (!g.propagates(e)) continue;
        eval_edge(e);
        any = true;
        for (int rf = 0; rf < 2; ++rf) {
          s[kEarly][rf] = std::min(s[kEarly][rf], at.slew[e][kEarly][rf]);
          s[kLate][rf] = std::max(s[kLate][rf], at.slew[e][kLate][rf]);
        }
      }
      at.pin_slew[v] = any ? s : source_slew(v, lib, cons);
    });
  }

  std::size_t missing = 0;
  for (EdgeId e = 0; e < ne; ++e) {
    if (g.edge_kind[e] != EdgeKind::cell_check_arc || g.disabled[e]) continue;
    const TimingArc& arc = *g.arc(e, nl, lib);
    if (!arc.rise_constraint && !arc.fall_constraint) ++missing;
    at.delay[e] = check_margin(arc, at.pin_slew[g.edge_to[e]], at.pin_slew[g.edge_from[e]]);
  }
  if (missing) log::warn("{} check arc(s) have no constraint tables; margin 0", missing);
  if (unstable) log::info("{} net(s) with unstable reduced models use Elmore", unstable.load());
  at.arnoldi_fallbacks = fallbacks;
  at.sdf_annotated = annotated;
  return at;
}

}  // namespace ministra
