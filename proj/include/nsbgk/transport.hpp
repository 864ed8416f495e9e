#pragma once
/// @file transport.hpp
/// @brief Characteristics of dX = V, dV = rho (u - V) and the exponential semi-Lagrangian
/// kinetic step built on the Duhamel form along them.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nsbgk/core.hpp"
#include "nsbgk/maxwellian.hpp"
#include "nsbgk/moments.hpp"
#include "nsbgk/numerics.hpp"

namespace nsbgk {

/// Point (X, V) on a characteristic at time s.
struct CharState {
  std::array<double, 3> X{0.0, 0.0, 0.0};
  std::array<double, 3> V{0.0, 0.0, 0.0};
  double s = 0.0;
};

/// Time samples of the fluid density and velocity. One sample means constant in time.
struct FieldHistory {
  std::vector<double> times;
  std::vector<std::vector<double>> rho;
  std::vector<std::vector<double>> u;  ///< interleaved per sample

  static FieldHistory constant(std::vector<double> rho, std::vector<double> u) {
    FieldHistory h;
    h.times = {0.0};
    h.rho.push_back(std::move(rho));
    h.u.push_back(std::move(u));
    return h;
  }

  static FieldHistory uniform(const PhaseGrid& g, double rho, std::span<const double> u) {
    std::vector<double> uu(g.n_space() * g.dim());
    for (std::size_t s = 0; s < g.n_space(); ++s)
      for (int a = 0; a < g.dim(); ++a) uu[s * g.dim() + a] = u[a];
    return constant(std::vector<double>(g.n_space(), rho), std::move(uu));
  }

  void push(double t, std::vector<double> r, std::vector<double> uu) {
    if (!times.empty() && !(t > times.back())) throw ValidationError("field samples must be pushed in increasing time");
    times.push_back(t);
    rho.push_back(std::move(r));
    u.push_back(std::move(uu));
  }

  bool covers(double t) const {
    if (times.size() <= 1) return true;
    const double tol = 1e-12 * (1.0 + std::abs(times.back()));
    return t >= times.front() - tol && t <= times.back() + tol;
  }

  /// rho and u at position x and time t (linear in time, periodic cubic in space).
  void sample(const PhaseGrid& g, std::span<const double> x, double t, double& r, std::span<double> uo) const {
    const int d = g.dim();
    if (times.size() == 1) {
      r = num::interp_space(g, rho[0], x);
      for (int a = 0; a < d; ++a) uo[a] = num::interp_space(g, u[0], x, d, a);
      return;
    }
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t k1 = static_cast<std::size_t>(it - times.begin());
    k1 = std::clamp<std::size_t>(k1, 1, times.size() - 1);
    const std::size_t k0 = k1 - 1;
    const double th = std::clamp((t - times[k0]) / (times[k1] - times[k0]), 0.0, 1.0);
    r = (1.0 - th) * num::interp_space(g, rho[k0], x) + th * num::interp_space(g, rho[k1], x);
    for (int a = 0; a < d; ++a)
      uo[a] = (1.0 - th) * num::interp_space(g, u[k0], x, d, a) + th * num::interp_space(g, u[k1], x, d, a);
  }
};

inline double wrap_periodic(double x, double L) {
  double r = std::fmod(x, L);
  if (r < 0.0) r += L;
  if (r >= L) r -= L;
  return r;
}

/// Heun integration of dX/ds = V, dV/ds = rho(X, s) (u(X, s) - V) from z.s to t_to in
/// `steps` equal steps (t_to < z.s runs backward). Aborts when |V| exceeds vcap.
inline CharState advance_characteristic(const PhaseGrid& g, const FieldHistory& fields, CharState z, double t_to,
                                        int steps, double vcap = -1.0) {
  const int d = g.dim();
  if (steps < 1) throw ValidationError("characteristic needs at least one step");
  if (!fields.covers(z.s) || !fields.covers(t_to))
    throw ValidationError("field samples do not cover the characteristic time interval");
  if (vcap < 0.0) {
    vcap = 0.0;
    for (int a = 0; a < d; ++a) vcap = std::max(vcap, 10.0 * g.vmax(a));
  }
  const double t0 = z.s;
  const double h = (t_to - t0) / steps;
  double r1, r2;
  std::array<double, 3> u1{}, u2{}, Xp{}, Vp{}, a1{}, a2{};
  for (int n = 0; n < steps; ++n) {
    const double s = t0 + n * h;
    fields.sample(g, std::span<const double>(z.X.data(), d), s, r1, std::span<double>(u1.data(), d));
    for (int a = 0; a < d; ++a) {
      a1[a] = r1 * (u1[a] - z.V[a]);
      Xp[a] = wrap_periodic(z.X[a] + h * z.V[a], g.period(a));
      Vp[a] = z.V[a] + h * a1[a];
    }
    fields.sample(g, std::span<const double>(Xp.data(), d), s + h, r2, std::span<double>(u2.data(), d));
    for (int a = 0; a < d; ++a) {
      a2[a] = r2 * (u2[a] - Vp[a]);
      z.X[a] = wrap_periodic(z.X[a] + 0.5 * h * (z.V[a] + Vp[a]), g.period(a));
      z.V[a] += 0.5 * h * (a1[a] + a2[a]);
      if (!(std::abs(z.V[a]) <= vcap))
        throw RuntimeAbort("characteristic velocity blow-up: |V| = " + std::to_string(std::abs(z.V[a])) +
                           " exceeds " + std::to_string(vcap) + " at s = " + std::to_string(s + h));
    }
  }
  z.s = t_to;
  return z;
}

enum class Direction { forward, backward };

struct GrowthStats {
  double max_ratio = 0.0;
  std::vector<double> ratios;  ///< per sample
};

/// For each sample z = (x, v): backward runs the characteristic from time t down to 0 and
/// reports |V(0)| / (1 + |v|); forward runs from 0 up to t and reports |V(t)| / (1 + |v|).
inline GrowthStats velocity_growth_ratio(const PhaseGrid& g, const FieldHistory& fields,
                                         const std::vector<CharState>& samples, double t, int steps,
                                         Direction dir = Direction::backward, double vcap = -1.0) {
  GrowthStats st;
  st.ratios.reserve(samples.size());
  const int d = g.dim();
  for (CharState z : samples) {
    double vn = 0.0;
    for (int a = 0; a < d; ++a) vn += z.V[a] * z.V[a];
    vn = std::sqrt(vn);
    z.s = dir == Direction::backward ? t : 0.0;
    const CharState e = advance_characteristic(g, fields, z, dir == Direction::backward ? 0.0 : t, steps, vcap);
    double en = 0.0;
    for (int a = 0; a < d; ++a) en += e.V[a] * e.V[a];
    const double r = std::sqrt(en) / (1.0 + vn);
    st.ratios.push_back(r);
    st.max_ratio = std::max(st.max_ratio, r);
  }
  return st;
}

/// Coefficients frozen over one kinetic step.
struct KineticCoefficients {
  std::vector<double> rho;   ///< fluid density (drag strength)
  std::vector<double> u;     ///< fluid velocity, interleaved
  std::vector<double> nu;    ///< relaxation frequency per spatial node
  std::vector<double> gain;  ///< nu M on the phase grid; empty means no gain term
};

struct KineticStepOptions {
  double cfl = 0.5;
  bool mass_fix = true;
  bool check_cfl = true;
};

/// Largest admissible dt for the semi-Lagrangian step.
inline double kinetic_dt_limit(const PhaseGrid& g, std::span<const double> rho, std::span<const double> u,
                               double cfl) {
  const int d = g.dim();
  double lim = std::numeric_limits<double>::infinity();
  for (int a = 0; a < d; ++a) {
    lim = std::min(lim, g.dx(a) / g.vmax(a));
    double acc = 0.0;
    for (std::size_t s = 0; s < g.n_space(); ++s)
      acc = std::max(acc, std::abs(rho[s]) * (std::abs(u[s * d + a]) + g.vmax(a)));
    if (acc > 0.0) lim = std::min(lim, g.dv(a) / acc);
  }
  return cfl * lim;
}

/// (e^z - 1) / z with the limit 1 near z = 0.
inline double phi1(double z) { return std::abs(z) < 1e-10 ? 1.0 + 0.5 * z : std::expm1(z) / z; }

namespace detail {

/// Tensor cubic interpolation of a phase-space array at (x, v), clamped below at 0.
inline double interp_phase(const PhaseGrid& g, const std::vector<double>& q, std::span<const double> x,
                           std::span<const double> v) {
  std::array<std::size_t, 64> sn, vn;
  std::array<double, 64> sw, vw;
  const std::size_t nvs = num::vel_stencil(g, v, vn, vw);
  if (nvs == 0) return 0.0;
  const std::size_t nss = num::space_stencil(g, x, sn, sw);
  const std::size_t nv = g.n_vel();
  double acc = 0.0;
  for (std::size_t p = 0; p < nss; ++p) {
    const double* row = q.data() + sn[p] * nv;
    double inner = 0.0;
    for (std::size_t m = 0; m < nvs; ++m) inner += vw[m] * row[vn[m]];
    acc += sw[p] * inner;
  }
  return acc;
}

}  // namespace detail

/// One step of size dt. Backward Heun characteristic with coefficients frozen at the step
/// start; along it f' = f(foot) e^{a dt} + G dt phi1(a dt), a = d rho - nu averaged over the
/// path end points and G = nu M averaged likewise. Foot values use periodic cubic
/// interpolation in x, cubic in v (zero outside the box), clamped at 0.
inline KineticState kinetic_step(const KineticState& f, const KineticCoefficients& c, double dt, const PhaseGrid& g,
                                 const KineticStepOptions& opt = {}) {
  const int d = g.dim();
  const std::size_t ns = g.n_space(), nv = g.n_vel();
  if (f.f.size() != g.size()) throw ValidationError("kinetic array does not match the grid");
  if (c.rho.size() != ns || c.u.size() != ns * d || c.nu.size() != ns)
    throw ValidationError("kinetic coefficients do not match the spatial grid");
  const bool has_gain = !c.gain.empty();
  if (has_gain && c.gain.size() != g.size()) throw ValidationError("gain array does not match the grid");
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
  if (opt.check_cfl) {
    const double lim = kinetic_dt_limit(g, c.rho, c.u, opt.cfl);
    if (dt > lim * (1.0 + 1e-12))
      throw RuntimeAbort("kinetic CFL violated: dt = " + std::to_string(dt) + " exceeds " + std::to_string(lim));
  }

  std::vector<double> adil(ns);
  for (std::size_t s = 0; s < ns; ++s) adil[s] = d * c.rho[s] - c.nu[s];

  KineticState out(g, f.time + dt);
  std::array<double, 3> x{}, v{}, xp{}, vp{}, xf{}, vf{}, up{};
  for (std::size_t s = 0; s < ns; ++s) {
    const auto si = g.space_index(s);
    for (int a = 0; a < d; ++a) x[a] = g.x(a, si[a]);
    const double r0 = c.rho[s];
    for (std::size_t j = 0; j < nv; ++j) {
      for (int a = 0; a < d; ++a) {
        v[a] = g.vel(j, a);
        xp[a] = wrap_periodic(x[a] - dt * v[a], g.period(a));
        vp[a] = v[a] - dt * r0 * (c.u[s * d + a] - v[a]);
      }
      const double rp = num::interp_space(g, c.rho, std::span<const double>(xp.data(), d));
      for (int a = 0; a < d; ++a) up[a] = num::interp_space(g, c.u, std::span<const double>(xp.data(), d), d, a);
      for (int a = 0; a < d; ++a) {
        xf[a] = wrap_periodic(x[a] - 0.5 * dt * (v[a] + vp[a]), g.period(a));
        vf[a] = v[a] - 0.5 * dt * (r0 * (c.u[s * d + a] - v[a]) + rp * (up[a] - vp[a]));
      }
      const std::span<const double> xs(xf.data(), d), vs(vf.data(), d);
      const double foot = std::max(0.0, detail::interp_phase(g, f.f, xs, vs));
      const double a_foot = num::interp_space(g, adil, xs);
      const double aa = 0.5 * (adil[s] + a_foot);
      double val = foot * std::exp(aa * dt);
      if (has_gain) {
        const double gf = std::max(0.0, detail::interp_phase(g, c.gain, xs, vs));
        val += 0.5 * (c.gain[s * nv + j] + gf) * dt * phi1(aa * dt);
      }
      if (!std::isfinite(val))
        throw RuntimeAbort("non-finite kinetic value at space node " + std::to_string(s) + ", velocity node " +
                           std::to_string(j));
      out.f[s * nv + j] = val;
    }
  }

  if (opt.mass_fix) {
    double before = 0.0, after = 0.0;
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t j = 0; j < nv; ++j) {
        before += f.f[s * nv + j] * g.vel_weight(j);
        after += out.f[s * nv + j] * g.vel_weight(j);
      }
    if (after > 0.0 && before > 0.0) {
      const double scale = before / after;
      for (double& q : out.f) q *= scale;
    }
  }
  return out;
}

/// Coefficients for the nonlinear step: fluid (rho, u) and BGK data of the current f.
inline KineticCoefficients make_coefficients(const std::vector<double>& rho, const std::vector<double>& u,
                                             const BgkData& bgk, const PhaseGrid& g) {
  KineticCoefficients c{rho, u, bgk.nu, {}};
  c.gain.resize(g.size());
  const std::size_t nv = g.n_vel();
  for (std::size_t s = 0; s < g.n_space(); ++s)
    for (std::size_t j = 0; j < nv; ++j) c.gain[s * nv + j] = bgk.nu[s] * bgk.M[s * nv + j];
  return c;
}

/// Convenience form: moments, Maxwellian and relaxation frequency taken from f itself.
inline KineticState kinetic_step(const KineticState& f, const std::vector<double>& rho, const std::vector<double>& u,
                                 double dt, const PhaseGrid& g, const SimConfig& cfg) {
  const BgkData bgk = bgk_operator(f, g, BgkSettings::from(cfg));
  return kinetic_step(f, make_coefficients(rho, u, bgk, g), dt, g, KineticStepOptions{cfg.cfl, cfg.mass_fix, true});
}

}  // namespace nsbgk
