#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "ministra/parasitics.hpp"

namespace test {

using namespace ministra;

/// Chain root - r0 - n1 - r1 - n2 ...; caps has one entry per node including the root.
inline RcNet chain(const std::vector<double>& res, const std::vector<double>& caps) {
  RcNet rc;
  rc.cap = caps;
  rc.node_pin.assign(caps.size(), kInvalidId);
  for (std::uint32_t i = 0; i < res.size(); ++i) {
    rc.res_a.push_back(i);
    rc.res_b.push_back(i + 1);
    rc.res.push_back(res[i]);
  }
  return rc;
}

inline RcNet random_tree(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> r(0.05, 2.0), c(0.1, 5.0);
  RcNet rc;
  rc.cap.push_back(c(rng));
  rc.node_pin.push_back(kInvalidId);
  for (std::uint32_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::uint32_t> p(0, i - 1);
    rc.cap.push_back(c(rng));
    rc.node_pin.push_back(kInvalidId);
    rc.res_a.push_back(p(rng));
    rc.res_b.push_back(i);
    rc.res.push_back(r(rng));
  }
  return rc;
}

inline std::vector<std::uint32_t> path_edges(const RcTree& t, std::uint32_t v) {
  std::vector<std::uint32_t> p;
  for (; t.parent[v] != kInvalidId; v = t.parent[v]) p.push_back(v);
  return p;
}

/// Sum over nodes k of C_k times the resistance shared by root->k and root->sink.
inline std::vector<double> brute_elmore(const RcNet& rc) {
  RcTree t = make_tree(rc);
  const std::size_t n = rc.num_nodes();
  std::vector<double> out(n, 0.0);
  for (std::uint32_t s = 0; s < n; ++s) {
    auto ps = path_edges(t, s);
    for (std::uint32_t k = 0; k < n; ++k) {
      auto pk = path_edges(t, k);
      double shared = 0;
      for (auto a : ps)
        for (auto b : pk)
          if (a == b) shared += t.res[a];
      out[s] += rc.cap[k] * shared;
    }
  }
  return out;
}

/// Backward-Euler step response with a ramp of 20-80 time `slew`; returns 50% delay per node.
inline std::vector<double> transient_delay(const RcNet& rc, double slew, double step_scale = 1e-3) {
  const std::size_t n = rc.num_nodes();
  RcTree t = make_tree(rc);
  double min_rc = 1e300, max_rc = 0;
  double rsum = 0, csum = 0;
  for (std::size_t v = 1; v < n; ++v) {
    min_rc = std::min(min_rc, t.res[v] * rc.cap[v]);
    rsum += t.res[v];
  }
  for (double c : rc.cap) csum += c;
  max_rc = rsum * csum;
  const double h = step_scale * min_rc;
  const double tr = slew / 0.6;
  // Dense (G + C/h) solve; n is small.
  std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
  for (std::size_t v = 1; v < n; ++v) {
    double g = 1.0 / t.res[v];
    std::uint32_t p = t.parent[v];
    M[v][v] += g;
    if (p != 0) {
      M[p][p] += g;
      M[v][p] -= g;
      M[p][v] -= g;
    }
  }
  for (std::size_t v = 1; v < n; ++v) M[v][v] += rc.cap[v] / h;
  // LU on the (n-1) x (n-1) block.
  std::size_t m = n - 1;
  std::vector<std::vector<double>> A(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) A[i][j] = M[i + 1][j + 1];
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = k + 1; i < m; ++i) {
      A[i][k] /= A[k][k];
      for (std::size_t j = k + 1; j < m; ++j) A[i][j] -= A[i][k] * A[k][j];
    }
  std::vector<double> x(m, 0.0), prev(m, 0.0), out(n, 0.0);
  std::vector<char> done(n, 0);
  done[0] = 1;
  std::size_t left = m;
  double time = 0;
  while (left && time < 50 * max_rc + 10 * tr) {
    time += h;
    double vin = tr > 0 ? std::min(1.0, time / tr) : 1.0;
    std::vector<double> b(m);
    for (std::size_t i = 0; i < m; ++i) b[i] = rc.cap[i + 1] / h * x[i];
    for (std::size_t v = 1; v < n; ++v)
      if (t.parent[v] == 0) b[v - 1] += vin / t.res[v];
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < i; ++j) b[i] -= A[i][j] * b[j];
    for (std::size_t i = m; i-- > 0;) {
      for (std::size_t j = i + 1; j < m; ++j) b[i] -= A[i][j] * b[j];
      b[i] /= A[i][i];
    }
    prev = x;
    x = b;
    for (std::size_t i = 0; i < m; ++i)
      if (!done[i + 1] && x[i] >= 0.5) {
        double f = (0.5 - prev[i]) / (x[i] - prev[i]);
        out[i + 1] = time - h + f * h - tr / 2;
        done[i + 1] = 1;
        --left;
      }
  }
  return out;
}

}  // namespace test
