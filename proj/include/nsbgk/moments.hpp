#pragma once
/// @file moments.hpp
/// @brief Macroscopic fields of the particle distribution and the fluid-particle drag density.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "nsbgk/core.hpp"

namespace nsbgk {

/// rho_f, u_f, T_f per spatial node; vacuum nodes carry u_f = 0, T_f = t_ref and vacuum[s] = 1.
struct MacroFields {
  std::vector<double> rho;
  std::vector<double> u;  ///< interleaved [s * dim + a]
  std::vector<double> T;
  std::vector<double> drag;  ///< int (u - v) f dv, interleaved; empty unless requested
  std::vector<std::uint8_t> vacuum;

  std::size_t degenerate_count() const { return static_cast<std::size_t>(std::count(vacuum.begin(), vacuum.end(), 1)); }
};

struct NodeMoments {
  double rho = 0.0;
  std::array<double, 3> u{0.0, 0.0, 0.0};
  double T = 0.0;
};

/// Raw moments of one velocity slice (no vacuum fallback; u = T = 0 when rho = 0).
inline NodeMoments node_moments(const PhaseGrid& g, std::span<const double> fv) {
  const int d = g.dim();
  NodeMoments m;
  double mom[3] = {0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < g.n_vel(); ++j) {
    const double fw = fv[j] * g.vel_weight(j);
    m.rho += fw;
    for (int a = 0; a < d; ++a) mom[a] += g.vel(j, a) * fw;
  }
  if (m.rho == 0.0) return m;
  for (int a = 0; a < d; ++a) m.u[a] = mom[a] / m.rho;
  double e = 0.0;
  for (std::size_t j = 0; j < g.n_vel(); ++j) {
    double c2 = 0.0;
    for (int a = 0; a < d; ++a) {
      const double c = g.vel(j, a) - m.u[a];
      c2 += c * c;
    }
    e += c2 * fv[j] * g.vel_weight(j);
  }
  m.T = e / (d * m.rho);
  return m;
}

/// rho_f = sum f dv, rho_f u_f = sum v f dv, d rho_f T_f = sum |v - u_f|^2 f dv.
inline MacroFields compute_moments(const KineticState& ks, const PhaseGrid& g, double t_ref = 1.0,
                                   double floor_rel = 1e-12) {
  const std::size_t ns = g.n_space(), nv = g.n_vel();
  const int d = g.dim();
  MacroFields m;
  m.rho.resize(ns);
  m.u.assign(ns * d, 0.0);
  m.T.resize(ns);
  m.vacuum.assign(ns, 0);
  std::vector<NodeMoments> raw(ns);
  double rmax = 0.0;
  for (std::size_t s = 0; s < ns; ++s) {
    raw[s] = node_moments(g, std::span<const double>(ks.f.data() + s * nv, nv));
    rmax = std::max(rmax, raw[s].rho);
  }
  const double floor = floor_rel * (rmax + 1.0);
  for (std::size_t s = 0; s < ns; ++s) {
    m.rho[s] = raw[s].rho;
    if (raw[s].rho < floor) {
      m.vacuum[s] = 1;
      m.T[s] = t_ref;
      continue;
    }
    for (int a = 0; a < d; ++a) m.u[s * d + a] = raw[s].u[a];
    m.T[s] = raw[s].T;
  }
  return m;
}

/// F(x) = sum (u(x) - v) f(x, v) dv for a fluid velocity field u (interleaved).
inline std::vector<double> coupling_force_density(const KineticState& ks, std::span<const double> u,
                                                  const PhaseGrid& g) {
  const std::size_t ns = g.n_space(), nv = g.n_vel();
  const int d = g.dim();
  if (u.size() != ns * d) throw ValidationError("fluid velocity does not match the spatial grid");
  std::vector<double> F(ns * d, 0.0);
  for (std::size_t s = 0; s < ns; ++s) {
    const double* fv = ks.f.data() + s * nv;
    for (std::size_t j = 0; j < nv; ++j) {
      const double fw = fv[j] * g.vel_weight(j);
      for (int a = 0; a < d; ++a) F[s * d + a] += (u[s * d + a] - g.vel(j, a)) * fw;
    }
  }
  return F;
}

/// Measure of the unit ball in d dimensions.
inline double unit_ball_volume(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    default: return 4.0 * std::numbers::pi / 3.0;
  }
}

/// Constant C_d in rho_f <= C_d (int f^2 dv)^{1/2} T_f^{d/4}. Splitting the mass at |v - u_f| = R
/// (Chebyshev outside, Cauchy-Schwarz inside) and equating both parts gives
/// C_d = 2^{(d+4)/4} d^{d/4} |B_1|^{1/2}; for d = 3 this is 2^{7/4} 3^{3/4} (4 pi / 3)^{1/2}.
inline double rho_T_constant(int d) {
  return std::pow(2.0, (d + 4) / 4.0) * std::pow(static_cast<double>(d), d / 4.0) * std::sqrt(unit_ball_volume(d));
}

struct RhoTReport {
  double constant = 0.0;
  double max_margin = 0.0;       ///< max over nodes of rho_f / (C (int f^2)^{1/2} T_f^{d/4})
  std::size_t argmax = 0;
  std::vector<double> margin;    ///< per node
  std::vector<std::size_t> violations;  ///< nodes with T_f = 0 and rho_f > 0
  bool passed = true;
};

inline RhoTReport check_rho_T_relation(const KineticState& ks, const PhaseGrid& g, double tol = 1e-6) {
  const std::size_t ns = g.n_space(), nv = g.n_vel();
  const int d = g.dim();
  RhoTReport r;
  r.constant = rho_T_constant(d);
  r.margin.resize(ns, 0.0);
  for (std::size_t s = 0; s < ns; ++s) {
    std::span<const double> fv(ks.f.data() + s * nv, nv);
    const NodeMoments m = node_moments(g, fv);
    double l2 = 0.0;
    for (std::size_t j = 0; j < nv; ++j) l2 += fv[j] * fv[j] * g.vel_weight(j);
    l2 = std::sqrt(l2);
    double margin = 0.0;
    if (m.rho > 0.0) {
      if (m.T <= 0.0) {
        r.violations.push_back(s);
        margin = std::numeric_limits<double>::infinity();
      } else {
        margin = m.rho / (r.constant * l2 * std::pow(m.T, d / 4.0));
      }
    }
    r.margin[s] = margin;
    if (margin > r.max_margin) {
      r.max_margin = margin;
      r.argmax = s;
    }
  }
  r.passed = r.violations.empty() && r.max_margin <= 1.0 + tol;
  return r;
}

}  // namespace nsbgk
