#pragma once
/// @file diagnostics.hpp
/// @brief Weighted norms, modulated energy, decay fits, conservation drifts and positivity monitors.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nsbgk/core.hpp"
#include "nsbgk/moments.hpp"
#include "nsbgk/numerics.hpp"

namespace nsbgk {

// ---------------------------------------------------------------------------
// Phase-space derivatives (fourth order, periodic in x, one-sided at the velocity edges).

namespace detail {

inline std::vector<double> phase_dx(const PhaseGrid& g, std::span<const double> f, int a, int order) {
  const std::size_t nv = g.n_vel();
  std::vector<double> out(f.size());
  const double h = g.dx(a);
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    const double* m2 = f.data() + g.space_shift(s, a, -2) * nv;
    const double* m1 = f.data() + g.space_shift(s, a, -1) * nv;
    const double* c0 = f.data() + s * nv;
    const double* p1 = f.data() + g.space_shift(s, a, 1) * nv;
    const double* p2 = f.data() + g.space_shift(s, a, 2) * nv;
    double* o = out.data() + s * nv;
    if (order == 1) {
      const double inv = 1.0 / (12.0 * h);
      for (std::size_t j = 0; j < nv; ++j) o[j] = (m2[j] - 8.0 * m1[j] + 8.0 * p1[j] - p2[j]) * inv;
    } else {
      const double inv = 1.0 / (12.0 * h * h);
      for (std::size_t j = 0; j < nv; ++j)
        o[j] = (-m2[j] + 16.0 * m1[j] - 30.0 * c0[j] + 16.0 * p1[j] - p2[j]) * inv;
    }
  }
  return out;
}

inline std::vector<double> phase_dv(const PhaseGrid& g, std::span<const double> f, int a, int order) {
  const std::size_t nv = g.n_vel();
  const int n = g.nv(a);
  std::array<int, 3> e{0, 0, 0};
  e[a] = 1;
  const std::size_t stride = g.vel_flat(e);
  std::vector<double> out(f.size()), line(n), dline(n);
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    const double* fs = f.data() + s * nv;
    double* os = out.data() + s * nv;
    for (std::size_t j0 = 0; j0 < nv; ++j0) {
      if (g.vel_index(j0)[a] != 0) continue;
      for (int i = 0; i < n; ++i) line[i] = fs[j0 + i * stride];
      if (order == 1)
        num::d1_line4(line, g.dv(a), dline);
      else
        num::d2_line4(line, g.dv(a), dline);
      for (int i = 0; i < n; ++i) os[j0 + i * stride] = dline[i];
    }
  }
  return out;
}

/// Weighted squared L2 integral of a phase array: sum w(v)^2 q^2 dx^d dv^d.
inline double weighted_sq(const PhaseGrid& g, std::span<const double> q, const std::vector<double>& w) {
  const std::size_t nv = g.n_vel();
  std::vector<double> part(g.n_space());
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    double acc = 0.0;
    for (std::size_t j = 0; j < nv; ++j) {
      const double x = w[j] * q[s * nv + j];
      acc += x * x * g.vel_weight(j);
    }
    part[s] = acc;
  }
  return num::pairwise_sum(part) * g.cell_volume();
}

inline double weighted_max(const PhaseGrid& g, std::span<const double> q, const std::vector<double>& w) {
  const std::size_t nv = g.n_vel();
  double m = 0.0;
  for (std::size_t s = 0; s < g.n_space(); ++s)
    for (std::size_t j = 0; j < nv; ++j) m = std::max(m, w[j] * std::abs(q[s * nv + j]));
  return m;
}

}  // namespace detail

/// ||f||_{L^p_k} = ||exp(<v>^k) f||_{L^p} for p in {1, 2}.
inline double weighted_lp_norm(std::span<const double> f, const PhaseGrid& g, int p, double k) {
  if (p != 1 && p != 2) throw ValidationError("weighted_lp_norm supports p = 1 or p = 2");
  if (f.size() != g.size()) throw ValidationError("distribution does not match the grid");
  const std::vector<double> w = weight_table(g, k);
  if (p == 2) return std::sqrt(detail::weighted_sq(g, f, w));
  const std::size_t nv = g.n_vel();
  std::vector<double> part(g.n_space());
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    double acc = 0.0;
    for (std::size_t j = 0; j < nv; ++j) acc += w[j] * std::abs(f[s * nv + j]) * g.vel_weight(j);
    part[s] = acc;
  }
  return num::pairwise_sum(part) * g.cell_volume();
}

inline double weighted_lp_norm(const KineticState& ks, const PhaseGrid& g, int p, double k) {
  return weighted_lp_norm(ks.f, g, p, k);
}

/// ||f||_{L^inf_k}: max over nodes of exp(<v>^k) |f|.
inline double weighted_sup_norm(std::span<const double> f, const PhaseGrid& g, double k) {
  if (f.size() != g.size()) throw ValidationError("distribution does not match the grid");
  return detail::weighted_max(g, f, weight_table(g, k));
}

inline double weighted_sup_norm(const KineticState& ks, const PhaseGrid& g, double k) {
  return weighted_sup_norm(ks.f, g, k);
}

/// ||f||_{H^s_k}: square root of the sum over |alpha| + |beta| <= s of ||exp(<v>^k) dx^alpha dv^beta f||^2.
inline double weighted_sobolev_norm(std::span<const double> f, const PhaseGrid& g, int s, double k) {
  if (s < 0 || s > 2) throw ValidationError("weighted_sobolev_norm supports s in {0, 1, 2}");
  if (f.size() != g.size()) throw ValidationError("distribution does not match the grid");
  const std::vector<double> w = weight_table(g, k);
  const int d = g.dim();
  double acc = detail::weighted_sq(g, f, w);
  if (s >= 1) {
    std::vector<std::vector<double>> fx(d), fv(d);
    for (int a = 0; a < d; ++a) {
      fx[a] = detail::phase_dx(g, f, a, 1);
      fv[a] = detail::phase_dv(g, f, a, 1);
      acc += detail::weighted_sq(g, fx[a], w) + detail::weighted_sq(g, fv[a], w);
    }
    if (s == 2) {
      for (int a = 0; a < d; ++a) {
        acc += detail::weighted_sq(g, detail::phase_dx(g, f, a, 2), w);
        acc += detail::weighted_sq(g, detail::phase_dv(g, f, a, 2), w);
        for (int b = a + 1; b < d; ++b) {
          acc += detail::weighted_sq(g, detail::phase_dx(g, fx[a], b, 1), w);
          acc += detail::weighted_sq(g, detail::phase_dv(g, fv[a], b, 1), w);
        }
        for (int b = 0; b < d; ++b) acc += detail::weighted_sq(g, detail::phase_dv(g, fx[a], b, 1), w);
      }
    }
  }
  return std::sqrt(acc);
}

inline double weighted_sobolev_norm(const KineticState& ks, const PhaseGrid& g, int s, double k) {
  return weighted_sobolev_norm(ks.f, g, s, k);
}

/// ||f||_{W^{1,inf}_k}: max over |alpha| + |beta| <= 1 of the weighted sup norm of the derivative.
inline double weighted_w1inf_norm(std::span<const double> f, const PhaseGrid& g, double k) {
  if (f.size() != g.size()) throw ValidationError("distribution does not match the grid");
  const std::vector<double> w = weight_table(g, k);
  double m = detail::weighted_max(g, f, w);
  for (int a = 0; a < g.dim(); ++a) {
    m = std::max(m, detail::weighted_max(g, detail::phase_dx(g, f, a, 1), w));
    m = std::max(m, detail::weighted_max(g, detail::phase_dv(g, f, a, 1), w));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Spatial Sobolev norms for fluid fields.

/// Mixed partial derivative d^alpha of a (strided) spatial field, fourth-order periodic stencils.
inline std::vector<double> spatial_derivative(const PhaseGrid& g, std::span<const double> q,
                                              const std::array<int, 3>& alpha, int stride = 1, int comp = 0) {
  std::vector<double> cur(g.n_space());
  for (std::size_t s = 0; s < g.n_space(); ++s) cur[s] = q[s * stride + comp];
  for (int a = 0; a < g.dim(); ++a) {
    if (alpha[a] == 0) continue;
    if (alpha[a] == 1)
      cur = num::d1_periodic4(g, cur, a);
    else if (alpha[a] == 2)
      cur = num::d2_periodic4(g, cur, a);
    else if (alpha[a] == 3)
      cur = num::d3_periodic4(g, cur, a);
    else
      throw ValidationError("spatial derivatives above third order per axis are not supported");
  }
  return cur;
}

/// Multi-indices alpha with |alpha| <= s in dimension d.
inline std::vector<std::array<int, 3>> multi_indices(int d, int s) {
  std::vector<std::array<int, 3>> out;
  for (int i = 0; i <= s; ++i)
    for (int j = 0; j <= (d > 1 ? s - i : 0); ++j)
      for (int l = 0; l <= (d > 2 ? s - i - j : 0); ++l) out.push_back({i, j, l});
  return out;
}

/// ||q||^2_{H^s} of a scalar (or one component of a strided) spatial field.
inline double sobolev_sq(const PhaseGrid& g, std::span<const double> q, int s, int stride = 1, int comp = 0) {
  double acc = 0.0;
  std::vector<double> sq(g.n_space());
  for (const auto& alpha : multi_indices(g.dim(), s)) {
    const std::vector<double> dq = spatial_derivative(g, q, alpha, stride, comp);
    for (std::size_t i = 0; i < dq.size(); ++i) sq[i] = dq[i] * dq[i];
    acc += num::pairwise_sum(sq);
  }
  return acc * g.cell_volume();
}

/// ||u||^2_{H^s} summed over the components of an interleaved vector field.
inline double sobolev_sq_vector(const PhaseGrid& g, std::span<const double> u, int s) {
  double acc = 0.0;
  for (int b = 0; b < g.dim(); ++b) acc += sobolev_sq(g, u, s, g.dim(), b);
  return acc;
}

/// 4 gamma/(gamma-1)^2 ||h||^2_{H^3} + ||u||^2_{H^3}, with h = rho^{(gamma-1)/2} - 1.
inline double fluid_energy_h3(const FluidState& fl, const PhaseGrid& g, double gamma) {
  const double w = 4.0 * gamma / ((gamma - 1.0) * (gamma - 1.0));
  return w * sobolev_sq(g, fl.h, 3) + sobolev_sq_vector(g, fl.u, 3);
}

// ---------------------------------------------------------------------------
// Infima.

struct Infima {
  double sym_density = 0.0;  ///< inf (1 + h) = inf rho^{(gamma-1)/2}
  std::size_t sym_density_at = 0;
  double rho_f = 0.0;
  double T_f = 0.0;  ///< over nodes with particles; NaN if there are none
  double f_l2v = 0.0;  ///< inf_x (int f^2 dv)^{1/2}
};

inline Infima compute_infima(const KineticState& ks, const FluidState& fl, const MacroFields& m,
                             const PhaseGrid& g) {
  Infima r;
  r.sym_density = std::numeric_limits<double>::infinity();
  r.rho_f = std::numeric_limits<double>::infinity();
  r.T_f = std::numeric_limits<double>::infinity();
  r.f_l2v = std::numeric_limits<double>::infinity();
  bool any_particles = false;
  const std::size_t nv = g.n_vel();
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    if (1.0 + fl.h[s] < r.sym_density) {
      r.sym_density = 1.0 + fl.h[s];
      r.sym_density_at = s;
    }
    r.rho_f = std::min(r.rho_f, m.rho[s]);
    if (!m.vacuum[s]) {
      any_particles = true;
      r.T_f = std::min(r.T_f, m.T[s]);
    }
    double l2 = 0.0;
    for (std::size_t j = 0; j < nv; ++j) l2 += ks.f[s * nv + j] * ks.f[s * nv + j] * g.vel_weight(j);
    r.f_l2v = std::min(r.f_l2v, std::sqrt(l2));
  }
  if (!any_particles) r.T_f = std::numeric_limits<double>::quiet_NaN();
  return r;
}

// ---------------------------------------------------------------------------
// Modulated energy.

struct ModulatedEnergy {
  double L = 0.0;
  /// particle kinetic spread, fluid velocity spread, density spread, centre mismatch
  std::array<double, 4> terms{};
  std::array<double, 3> v_c{};
  std::array<double, 3> m_c{};
  double rho_c = 0.0;
  bool v_c_fallback = false;
};

/// rho_c is the mean fluid density, v_c the particle mean velocity, m_c the fluid mean velocity.
/// With no particles v_c falls back to m_c.
inline ModulatedEnergy modulated_energy(const KineticState& ks, const FluidState& fl, const PhaseGrid& g) {
  const int d = g.dim();
  const std::size_t nv = g.n_vel();
  const double dx = g.cell_volume();
  ModulatedEnergy e;

  double mass_f = 0.0, mass_r = 0.0;
  std::array<double, 3> mom_f{}, mom_r{};
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    for (std::size_t j = 0; j < nv; ++j) {
      const double fw = ks.f[s * nv + j] * g.vel_weight(j);
      mass_f += fw;
      for (int a = 0; a < d; ++a) mom_f[a] += g.vel(j, a) * fw;
    }
    mass_r += fl.rho[s];
    for (int a = 0; a < d; ++a) mom_r[a] += fl.rho[s] * fl.u[s * d + a];
  }
  mass_f *= dx;
  mass_r *= dx;
  for (int a = 0; a < d; ++a) {
    mom_f[a] *= dx;
    mom_r[a] *= dx;
  }
  e.rho_c = mass_r / g.domain_volume();
  for (int a = 0; a < d; ++a) e.m_c[a] = mass_r > 0.0 ? mom_r[a] / mass_r : 0.0;
  if (mass_f > 0.0) {
    for (int a = 0; a < d; ++a) e.v_c[a] = mom_f[a] / mass_f;
  } else {
    e.v_c = e.m_c;
    e.v_c_fallback = true;
  }

  std::vector<double> p0(g.n_space()), p1(g.n_space()), p2(g.n_space());
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    double acc = 0.0;
    for (std::size_t j = 0; j < nv; ++j) {
      double r2 = 0.0;
      for (int a = 0; a < d; ++a) r2 += (g.vel(j, a) - e.v_c[a]) * (g.vel(j, a) - e.v_c[a]);
      acc += r2 * ks.f[s * nv + j] * g.vel_weight(j);
    }
    p0[s] = acc;
    double du = 0.0;
    for (int a = 0; a < d; ++a) du += (fl.u[s * d + a] - e.m_c[a]) * (fl.u[s * d + a] - e.m_c[a]);
    p1[s] = fl.rho[s] * du;
    p2[s] = (fl.rho[s] - e.rho_c) * (fl.rho[s] - e.rho_c);
  }
  e.terms[0] = num::pairwise_sum(p0) * dx;
  e.terms[1] = num::pairwise_sum(p1) * dx;
  e.terms[2] = num::pairwise_sum(p2) * dx;
  double c = 0.0;
  for (int a = 0; a < d; ++a) c += (e.v_c[a] - e.m_c[a]) * (e.v_c[a] - e.m_c[a]);
  e.terms[3] = c;
  e.L = e.terms[0] + e.terms[1] + e.terms[2] + e.terms[3];
  return e;
}

// ---------------------------------------------------------------------------
// Exponential decay fit.

struct DecayFit {
  double amplitude = 0.0;
  double rate = 0.0;
  double residual = 0.0;  ///< RMS of the log-fit error
  std::size_t used = 0;
  std::size_t excluded = 0;  ///< non-positive samples dropped
};

/// Least-squares fit of log L = log A - rate t.
inline DecayFit decay_fit(std::span<const double> t, std::span<const double> L) {
  if (t.size() != L.size()) throw ValidationError("decay_fit: time and value series differ in length");
  std::vector<double> tt, yy;
  DecayFit r;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (L[i] > 0.0 && std::isfinite(L[i])) {
      tt.push_back(t[i]);
      yy.push_back(std::log(L[i]));
    } else {
      ++r.excluded;
    }
  }
  r.used = tt.size();
  if (r.used < 10) throw ValidationError("decay_fit needs at least 10 positive samples, got " + std::to_string(r.used));
  const double n = static_cast<double>(r.used);
  double tm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < r.used; ++i) tm += tt[i], ym += yy[i];
  tm /= n;
  ym /= n;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < r.used; ++i) {
    stt += (tt[i] - tm) * (tt[i] - tm);
    sty += (tt[i] - tm) * (yy[i] - ym);
  }
  if (!(stt > 0.0)) throw ValidationError("decay_fit needs distinct sample times");
  const double slope = sty / stt;
  const double icpt = ym - slope * tm;
  r.rate = -slope;
  r.amplitude = std::exp(icpt);
  double ss = 0.0;
  for (std::size_t i = 0; i < r.used; ++i) {
    const double e = yy[i] - (icpt + slope * tt[i]);
    ss += e * e;
  }
  r.residual = std::sqrt(ss / n);
  return r;
}

// ---------------------------------------------------------------------------
// Conservation.

struct Totals {
  double particle_mass = 0.0;
  double fluid_mass = 0.0;
  std::array<double, 3> momentum{};  ///< particles + fluid
  double momentum_scale = 0.0;  ///< sum |v| f + sum rho |u|, used to normalise momentum drift
};

inline Totals conservation_totals(const KineticState& ks, const FluidState& fl, const PhaseGrid& g) {
  const int d = g.dim();
  const std::size_t nv = g.n_vel();
  const double dx = g.cell_volume();
  Totals t;
  std::vector<double> pm(g.n_space()), fm(g.n_space()), sc(g.n_space());
  std::array<std::vector<double>, 3> mom;
  for (int a = 0; a < d; ++a) mom[a].assign(g.n_space(), 0.0);
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    double m = 0.0, scale = 0.0;
    std::array<double, 3> p{};
    for (std::size_t j = 0; j < nv; ++j) {
      const double fw = ks.f[s * nv + j] * g.vel_weight(j);
      m += fw;
      for (int a = 0; a < d; ++a) p[a] += g.vel(j, a) * fw;
      scale += std::sqrt(g.vel_norm2(j)) * std::abs(fw);
    }
    double un = 0.0;
    for (int a = 0; a < d; ++a) {
      mom[a][s] = p[a] + fl.rho[s] * fl.u[s * d + a];
      un += fl.u[s * d + a] * fl.u[s * d + a];
    }
    pm[s] = m;
    fm[s] = fl.rho[s];
    sc[s] = scale + fl.rho[s] * std::sqrt(un);
  }
  t.particle_mass = num::pairwise_sum(pm) * dx;
  t.fluid_mass = num::pairwise_sum(fm) * dx;
  for (int a = 0; a < d; ++a) t.momentum[a] = num::pairwise_sum(mom[a]) * dx;
  t.momentum_scale = num::pairwise_sum(sc) * dx;
  return t;
}

struct Drifts {
  double particle_mass = 0.0;
  double fluid_mass = 0.0;
  double momentum = 0.0;
};

/// Relative drift of `now` against the reference totals.
inline Drifts drift_between(const Totals& ref, const Totals& now) {
  Drifts d;
  auto rel = [](double a, double b) {
    if (a == b) return 0.0;
    return std::abs(b - a) / std::max(std::abs(a), std::numeric_limits<double>::min());
  };
  d.particle_mass = ref.particle_mass == 0.0 ? std::abs(now.particle_mass) : rel(ref.particle_mass, now.particle_mass);
  d.fluid_mass = rel(ref.fluid_mass, now.fluid_mass);
  double dp = 0.0;
  for (int a = 0; a < 3; ++a) dp += (now.momentum[a] - ref.momentum[a]) * (now.momentum[a] - ref.momentum[a]);
  dp = std::sqrt(dp);
  d.momentum = ref.momentum_scale > 0.0 ? dp / ref.momentum_scale : dp;
  return d;
}

/// Maximum drift over a trajectory of totals, relative to its first entry.
inline Drifts conservation_report(std::span<const Totals> traj) {
  Drifts worst;
  if (traj.empty()) return worst;
  for (const Totals& t : traj) {
    const Drifts d = drift_between(traj.front(), t);
    worst.particle_mass = std::max(worst.particle_mass, d.particle_mass);
    worst.fluid_mass = std::max(worst.fluid_mass, d.fluid_mass);
    worst.momentum = std::max(worst.momentum, d.momentum);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Positivity monitor.

enum class MonitorStatus { ok = 0, warn = 1, violated = 2 };

inline const char* to_string(MonitorStatus s) {
  switch (s) {
    case MonitorStatus::ok:
      return "ok";
    case MonitorStatus::warn:
      return "warn";
    default:
      return "violated";
  }
}

struct MonitorReport {
  MonitorStatus status = MonitorStatus::ok;
  double inf_sym_density = 0.0;
  std::size_t location = 0;
  double min_f = 0.0;
  std::size_t min_f_location = 0;
  std::string message;
};

/// inf (1 + h) below delta/2 or any negative f is a violation; inf (1 + h) in [delta/2, delta) warns.
inline MonitorReport positivity_monitor(const KineticState& ks, const FluidState& fl, const PhaseGrid& g,
                                        const SimConfig& cfg) {
  MonitorReport r;
  r.inf_sym_density = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < fl.h.size(); ++s)
    if (1.0 + fl.h[s] < r.inf_sym_density) {
      r.inf_sym_density = 1.0 + fl.h[s];
      r.location = s;
    }
  r.min_f = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ks.f.size(); ++i)
    if (ks.f[i] < r.min_f) {
      r.min_f = ks.f[i];
      r.min_f_location = i;
    }
  if (ks.f.empty()) r.min_f = 0.0;
  const std::string where = "space node " + std::to_string(r.location);
  if (!(r.inf_sym_density >= 0.5 * cfg.delta)) {
    r.status = MonitorStatus::violated;
    r.message = "inf rho^((gamma-1)/2) = " + std::to_string(r.inf_sym_density) + " below delta/2 at " + where;
  } else if (r.min_f < 0.0) {
    r.status = MonitorStatus::violated;
    r.message = "negative f = " + std::to_string(r.min_f) + " at space node " +
                std::to_string(r.min_f_location / g.n_vel()) + ", velocity node " +
                std::to_string(r.min_f_location % g.n_vel());
  } else if (r.inf_sym_density < cfg.delta) {
    r.status = MonitorStatus::warn;
    r.message = "inf rho^((gamma-1)/2) = " + std::to_string(r.inf_sym_density) + " below delta at " + where;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Per-step diagnostics row.

struct DiagnosticsRow {
  long step = 0;
  double t = 0.0;
  double f_l2k = 0.0, f_h2k = 0.0, f_linfk = 0.0, f_w1infk = 0.0;
  double fluid_h3 = 0.0;
  double inf_sym_density = 0.0, inf_rho_f = 0.0, inf_T_f = 0.0, inf_f_l2v = 0.0;
  double L = 0.0;
  std::array<double, 4> L_terms{};
  std::array<double, 3> v_c{}, m_c{};
  double rho_c = 0.0;
  Totals totals;
  Drifts drift;
  MonitorStatus monitor = MonitorStatus::ok;
  double h3_monitor_ratio = 0.0;  ///< fluid_h3 / monitor_m (0 when monitor_m is unset)
};

/// Column names of the diagnostics CSV, in order.
inline const std::vector<std::string>& diagnostics_columns() {
  static const std::vector<std::string> cols = {
      "step",          "t",           "f_L2k",       "f_H2k",          "f_Linfk",        "f_W1infk",
      "fluid_H3",      "inf_rho_sym", "inf_rho_f",   "inf_T_f",        "inf_f_L2v",      "L",
      "L_particles",   "L_fluid_vel", "L_density",   "L_centres",      "v_c_x",          "v_c_y",
      "v_c_z",         "m_c_x",       "m_c_y",       "m_c_z",          "rho_c",          "particle_mass",
      "fluid_mass",    "momentum_x",  "momentum_y",  "momentum_z",     "drift_particle_mass", "drift_fluid_mass",
      "drift_momentum", "h3_monitor_ratio", "monitor"};
  return cols;
}

inline DiagnosticsRow compute_diagnostics(const KineticState& ks, const FluidState& fl, const PhaseGrid& g,
                                          const SimConfig& cfg, const Totals& reference, long step = 0) {
  DiagnosticsRow r;
  r.step = step;
  r.t = ks.time;
  r.f_l2k = weighted_lp_norm(ks.f, g, 2, cfg.k);
  r.f_h2k = weighted_sobolev_norm(ks.f, g, 2, cfg.k);
  r.f_linfk = weighted_sup_norm(ks.f, g, cfg.k);
  r.f_w1infk = weighted_w1inf_norm(ks.f, g, cfg.k);
  r.fluid_h3 = fluid_energy_h3(fl, g, cfg.gamma);
  const MacroFields m = compute_moments(ks, g, cfg.t_ref, cfg.moment_floor);
  const Infima inf = compute_infima(ks, fl, m, g);
  r.inf_sym_density = inf.sym_density;
  r.inf_rho_f = inf.rho_f;
  r.inf_T_f = inf.T_f;
  r.inf_f_l2v = inf.f_l2v;
  const ModulatedEnergy me = modulated_energy(ks, fl, g);
  r.L = me.L;
  r.L_terms = me.terms;
  r.v_c = me.v_c;
  r.m_c = me.m_c;
  r.rho_c = me.rho_c;
  r.totals = conservation_totals(ks, fl, g);
  r.drift = drift_between(reference, r.totals);
  r.monitor = positivity_monitor(ks, fl, g, cfg).status;
  r.h3_monitor_ratio = cfg.monitor_m > 0.0 ? r.fluid_h3 / cfg.monitor_m : 0.0;
  return r;
}

}  // namespace nsbgk
