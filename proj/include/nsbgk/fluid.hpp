#pragma once
/// @file fluid.hpp
/// @brief Isentropic compressible Navier-Stokes on the periodic grid.
///
/// Two discretizations share the stencil and viscous-solve helpers:
///  - fluid_step: the linear symmetrized (h, u) system with frozen coefficient fields;
///  - compressible_step: the nonlinear system in conservative variables (rho, rho u),
///    which conserves mass and momentum to round-off and drives time marching.

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nsbgk/core.hpp"

namespace nsbgk {

/// h = rho^{(gamma-1)/2} - 1, pointwise. Throws on rho <= 0.
inline std::vector<double> to_symmetrized(std::span<const double> rho, double gamma) {
  std::vector<double> h(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > 0.0)) throw ValidationError("density must be positive (node " + std::to_string(i) + ")");
    h[i] = symmetrize(rho[i], gamma);
  }
  return h;
}

/// rho = (1 + h)^{2/(gamma-1)}, pointwise. Throws on 1 + h <= 0.
inline std::vector<double> from_symmetrized(std::span<const double> h, double gamma) {
  std::vector<double> rho(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(1.0 + h[i] > 0.0)) throw ValidationError("1+h must be positive (node " + std::to_string(i) + ")");
    rho[i] = desymmetrize(h[i], gamma);
  }
  return rho;
}

inline double pressure(double rho, double gamma) { return rho > 0.0 ? std::pow(rho, gamma) : 0.0; }

inline std::vector<double> pressure(std::span<const double> rho, double gamma) {
  std::vector<double> p(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) p[i] = pressure(rho[i], gamma);
  return p;
}

namespace fd {

/// Second-order central first derivative along axis a (strided field).
inline double central(const PhaseGrid& g, std::span<const double> q, std::size_t s, int a, int stride = 1,
                      int comp = 0) {
  return (q[g.space_shift(s, a, 1) * stride + comp] - q[g.space_shift(s, a, -1) * stride + comp]) /
         (2.0 * g.dx(a));
}

/// Fromm (upwind-biased, second-order) derivative for advection with speed c along axis a.
inline double fromm(const PhaseGrid& g, std::span<const double> q, std::size_t s, int a, double c, int stride = 1,
                    int comp = 0) {
  auto at = [&](int off) { return q[g.space_shift(s, a, off) * stride + comp]; };
  const double inv = 1.0 / (4.0 * g.dx(a));
  if (c >= 0.0) return (at(1) + 3.0 * at(0) - 5.0 * at(-1) + at(-2)) * inv;
  return -(at(-1) + 3.0 * at(0) - 5.0 * at(1) + at(2)) * inv;
}

/// Second-order Laplacian (sum over axes of the three-point second difference).
inline double laplacian(const PhaseGrid& g, std::span<const double> q, std::size_t s, int stride = 1, int comp = 0) {
  double acc = 0.0;
  for (int a = 0; a < g.dim(); ++a)
    acc += (q[g.space_shift(s, a, 1) * stride + comp] - 2.0 * q[s * stride + comp] +
            q[g.space_shift(s, a, -1) * stride + comp]) /
           (g.dx(a) * g.dx(a));
  return acc;
}

/// Face value at s + 1/2 along axis a, Fromm reconstruction upwinded by the sign of c.
inline double fromm_face(const PhaseGrid& g, std::span<const double> q, std::size_t s, int a, double c,
                         int stride = 1, int comp = 0) {
  auto at = [&](int off) { return q[g.space_shift(s, a, off) * stride + comp]; };
  if (c >= 0.0) return at(0) + 0.25 * (at(1) - at(-1));
  return at(1) - 0.25 * (at(2) - at(0));
}

}  // namespace fd

/// Solves (diag(w) - theta L) x = b per vector component with conjugate gradients.
/// w > 0 and -L positive semidefinite make the operator symmetric positive definite.
inline std::vector<double> solve_viscous(const PhaseGrid& g, std::span<const double> w, double theta,
                                         std::span<const double> b, std::span<const double> guess, double tol) {
  const std::size_t ns = g.n_space();
  const int d = g.dim();
  using SpMat = Eigen::SparseMatrix<double>;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(ns * (1 + 2 * d));
  for (std::size_t s = 0; s < ns; ++s) {
    double diag = w[s];
    for (int a = 0; a < d; ++a) {
      const double c = theta / (g.dx(a) * g.dx(a));
      diag += 2.0 * c;
      trip.emplace_back(static_cast<int>(s), static_cast<int>(g.space_shift(s, a, 1)), -c);
      trip.emplace_back(static_cast<int>(s), static_cast<int>(g.space_shift(s, a, -1)), -c);
    }
    trip.emplace_back(static_cast<int>(s), static_cast<int>(s), diag);
  }
  SpMat A(static_cast<int>(ns), static_cast<int>(ns));
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(static_cast<int>(10 * ns + 100));
  cg.compute(A);
  std::vector<double> x(ns * d);
  Eigen::VectorXd rhs(ns), x0(ns);
  for (int a = 0; a < d; ++a) {
    for (std::size_t s = 0; s < ns; ++s) {
      rhs(s) = b[s * d + a];
      x0(s) = guess[s * d + a];
    }
    const Eigen::VectorXd sol = cg.solveWithGuess(rhs, x0);
    if (cg.info() != Eigen::Success || !sol.allFinite())
      throw RuntimeAbort("viscous conjugate-gradient solve did not converge (component " + std::to_string(a) +
                         ", residual " + std::to_string(cg.error()) + ")");
    for (std::size_t s = 0; s < ns; ++s) x[s * d + a] = sol(s);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Linear symmetrized system.

/// One step of
///   h_t + uc . grad h + (gamma-1)/2 (1 + hc) div u = Sh
///   u_t + uc . grad u + 2 gamma/(gamma-1) (1 + hc) grad h - mu Lap u / (1 + hc)^{2/(gamma-1)} = -F + Su
/// Coefficient, forcing and source fields are given at the step start (index 0) and end
/// (index 1); empty end fields reuse the start ones. Empty sources mean zero.
struct FluidStepInputs {
  std::vector<double> h, u;
  std::vector<double> hc0, uc0, hc1, uc1;
  std::vector<double> F0, F1;
  std::vector<double> Sh0, Sh1, Su0, Su1;
  double gamma = 1.4;
  double mu = 0.1;
  double dt = 0.0;
  double delta = 0.5;
  double cfl = 0.5;
  bool implicit_viscosity = true;
  bool check_cfl = true;
  double cg_tol = 1e-12;
};

struct FluidStepResult {
  std::vector<double> h, u;
};

/// Largest admissible dt for the linear symmetrized step.
inline double fluid_dt_limit_linear(const PhaseGrid& g, std::span<const double> hc, std::span<const double> uc,
                                    double gamma, double mu, double cfl, bool implicit_viscosity) {
  const int d = g.dim();
  double rate = 0.0, visc = 0.0;
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    const double cs = std::sqrt(gamma) * std::abs(1.0 + hc[s]);
    double r = 0.0, lap = 0.0;
    for (int a = 0; a < d; ++a) {
      r += (std::abs(uc[s * d + a]) + cs) / g.dx(a);
      lap += 2.0 / (g.dx(a) * g.dx(a));
    }
    rate = std::max(rate, r);
    const double rho = desymmetrize(hc[s], gamma);
    visc = std::max(visc, mu * lap / rho);
  }
  double lim = rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
  if (!implicit_viscosity && visc > 0.0) lim = std::min(lim, 1.0 / visc);
  return cfl * lim;
}

inline FluidStepResult fluid_step(const FluidStepInputs& in, const PhaseGrid& g) {
  const std::size_t ns = g.n_space();
  const int d = g.dim();
  const std::size_t nv = ns * d;
  auto need = [&](const std::vector<double>& x, std::size_t n, const char* name, bool optional) {
    if (optional && x.empty()) return;
    if (x.size() != n) throw ValidationError(std::string("fluid input '") + name + "' does not match the grid");
  };
  need(in.h, ns, "h", false);
  need(in.u, nv, "u", false);
  need(in.hc0, ns, "hc0", false);
  need(in.uc0, nv, "uc0", false);
  need(in.hc1, ns, "hc1", true);
  need(in.uc1, nv, "uc1", true);
  need(in.F0, nv, "F0", true);
  need(in.F1, nv, "F1", true);
  need(in.Sh0, ns, "Sh0", true);
  need(in.Sh1, ns, "Sh1", true);
  need(in.Su0, nv, "Su0", true);
  need(in.Su1, nv, "Su1", true);
  if (!(in.dt > 0.0)) throw ValidationError("dt must be > 0");

  const std::vector<double>& hc1 = in.hc1.empty() ? in.hc0 : in.hc1;
  const std::vector<double>& uc1 = in.uc1.empty() ? in.uc0 : in.uc1;
  const std::vector<double>& F1 = in.F1.empty() ? in.F0 : in.F1;
  const std::vector<double>& Sh1 = in.Sh1.empty() ? in.Sh0 : in.Sh1;
  const std::vector<double>& Su1 = in.Su1.empty() ? in.Su0 : in.Su1;

  for (const auto* hc : {&in.hc0, &hc1})
    for (std::size_t s = 0; s < ns; ++s)
      if (!(1.0 + (*hc)[s] >= 0.5 * in.delta))
        throw RuntimeAbort("coefficient 1+h = " + std::to_string(1.0 + (*hc)[s]) + " below delta/2 at space node " +
                           std::to_string(s));
  for (std::size_t i = 0; i < nv; ++i)
    if (!in.F0.empty() && !std::isfinite(in.F0[i])) throw RuntimeAbort("non-finite drag forcing");
  if (in.check_cfl) {
    const double lim = std::min(
        fluid_dt_limit_linear(g, in.hc0, in.uc0, in.gamma, in.mu, in.cfl, in.implicit_viscosity),
        fluid_dt_limit_linear(g, hc1, uc1, in.gamma, in.mu, in.cfl, in.implicit_viscosity));
    if (in.dt > lim * (1.0 + 1e-12))
      throw RuntimeAbort("fluid CFL violated: dt = " + std::to_string(in.dt) + " exceeds " + std::to_string(lim));
  }

  const double kh = 0.5 * (in.gamma - 1.0);
  const double ku = 2.0 * in.gamma / (in.gamma - 1.0);
  const double pe = 2.0 / (in.gamma - 1.0);

  auto rhs = [&](const std::vector<double>& h, const std::vector<double>& u, const std::vector<double>& hc,
                 const std::vector<double>& uc, const std::vector<double>& F, const std::vector<double>& Sh,
                 const std::vector<double>& Su, std::vector<double>& Rh, std::vector<double>& Ru) {
    Rh.assign(ns, 0.0);
    Ru.assign(nv, 0.0);
    for (std::size_t s = 0; s < ns; ++s) {
      double adv = 0.0, div = 0.0;
      for (int a = 0; a < d; ++a) {
        const double c = uc[s * d + a];
        adv += c * fd::fromm(g, h, s, a, c);
        div += fd::central(g, u, s, a, d, a);
      }
      Rh[s] = -adv - kh * (1.0 + hc[s]) * div + (Sh.empty() ? 0.0 : Sh[s]);
      const double rc = std::exp(pe * std::log1p(hc[s]));
      for (int b = 0; b < d; ++b) {
        double advu = 0.0;
        for (int a = 0; a < d; ++a) {
          const double c = uc[s * d + a];
          advu += c * fd::fromm(g, u, s, a, c, d, b);
        }
        double r = -advu - ku * (1.0 + hc[s]) * fd::central(g, h, s, b);
        if (!in.implicit_viscosity) r += in.mu * fd::laplacian(g, u, s, d, b) / rc;
        if (!F.empty()) r -= F[s * d + b];
        if (!Su.empty()) r += Su[s * d + b];
        Ru[s * d + b] = r;
      }
    }
  };

  std::vector<double> Rh0, Ru0, Rh1, Ru1;
  rhs(in.h, in.u, in.hc0, in.uc0, in.F0, in.Sh0, in.Su0, Rh0, Ru0);
  std::vector<double> hs(ns), us(nv);
  for (std::size_t i = 0; i < ns; ++i) hs[i] = in.h[i] + in.dt * Rh0[i];
  for (std::size_t i = 0; i < nv; ++i) us[i] = in.u[i] + in.dt * Ru0[i];
  rhs(hs, us, hc1, uc1, F1, Sh1, Su1, Rh1, Ru1);

  FluidStepResult out;
  out.h.resize(ns);
  out.u.resize(nv);
  for (std::size_t i = 0; i < ns; ++i) out.h[i] = in.h[i] + 0.5 * in.dt * (Rh0[i] + Rh1[i]);
  for (std::size_t i = 0; i < nv; ++i) out.u[i] = in.u[i] + 0.5 * in.dt * (Ru0[i] + Ru1[i]);

  if (in.implicit_viscosity && in.mu > 0.0) {
    std::vector<double> w(ns), b(nv);
    for (std::size_t s = 0; s < ns; ++s) {
      w[s] = std::exp(pe * std::log1p(hc1[s]));
      for (int a = 0; a < d; ++a) b[s * d + a] = w[s] * out.u[s * d + a];
    }
    out.u = solve_viscous(g, w, in.dt * in.mu, b, out.u, in.cg_tol);
  }

  for (std::size_t s = 0; s < ns; ++s)
    if (!(1.0 + out.h[s] > 0.0) || !std::isfinite(out.h[s]))
      throw RuntimeAbort("fluid positivity lost: 1+h = " + std::to_string(1.0 + out.h[s]) + " at space node " +
                         std::to_string(s));
  for (std::size_t i = 0; i < nv; ++i)
    if (!std::isfinite(out.u[i])) throw RuntimeAbort("non-finite fluid velocity at space node " + std::to_string(i / d));
  return out;
}

// ---------------------------------------------------------------------------
// Nonlinear conservative system.

struct FluidParams {
  double gamma = 1.4;
  double mu = 0.1;
  double cfl = 0.5;
  bool implicit_viscosity = true;
  bool check_cfl = true;
  double cg_tol = 1e-12;

  static FluidParams from(const SimConfig& c) { return {c.gamma, c.mu, c.cfl, c.implicit_viscosity, true, c.cg_tol}; }
};

/// Largest admissible dt for compressible_step.
inline double fluid_dt_limit(const PhaseGrid& g, std::span<const double> rho, std::span<const double> u,
                             const FluidParams& p) {
  const int d = g.dim();
  double rate = 0.0, visc = 0.0;
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    const double cs = std::sqrt(p.gamma * std::pow(rho[s], p.gamma - 1.0));
    double r = 0.0, lap = 0.0;
    for (int a = 0; a < d; ++a) {
      r += (std::abs(u[s * d + a]) + cs) / g.dx(a);
      lap += 2.0 / (g.dx(a) * g.dx(a));
    }
    rate = std::max(rate, r);
    visc = std::max(visc, p.mu * lap / rho[s]);
  }
  double lim = rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
  if (!p.implicit_viscosity && visc > 0.0) lim = std::min(lim, 1.0 / visc);
  return p.cfl * lim;
}

namespace detail {

/// Flux divergence of (rho, m) for the inviscid part, plus mu Lap u when explicit.
inline void euler_rhs(const PhaseGrid& g, const std::vector<double>& rho, const std::vector<double>& m,
                      const FluidParams& p, std::vector<double>& Rr, std::vector<double>& Rm) {
  const std::size_t ns = g.n_space();
  const int d = g.dim();
  std::vector<double> u(ns * d), pr(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    for (int a = 0; a < d; ++a) u[s * d + a] = m[s * d + a] / rho[s];
    pr[s] = pressure(rho[s], p.gamma);
  }
  Rr.assign(ns, 0.0);
  Rm.assign(ns * d, 0.0);
  std::vector<double> fr(ns), fm(ns * d);
  for (int a = 0; a < d; ++a) {
    // face fluxes at s + 1/2 along axis a
    for (std::size_t s = 0; s < ns; ++s) {
      const std::size_t sp = g.space_shift(s, a, 1);
      const double uf = 0.5 * (u[s * d + a] + u[sp * d + a]);
      fr[s] = uf * fd::fromm_face(g, rho, s, a, uf);
      for (int b = 0; b < d; ++b) fm[s * d + b] = uf * fd::fromm_face(g, m, s, a, uf, d, b);
      fm[s * d + a] += 0.5 * (pr[s] + pr[sp]);
    }
    const double inv = 1.0 / g.dx(a);
    for (std::size_t s = 0; s < ns; ++s) {
      const std::size_t sm = g.space_shift(s, a, -1);
      Rr[s] -= (fr[s] - fr[sm]) * inv;
      for (int b = 0; b < d; ++b) Rm[s * d + b] -= (fm[s * d + b] - fm[sm * d + b]) * inv;
    }
  }
  if (!p.implicit_viscosity && p.mu > 0.0)
    for (std::size_t s = 0; s < ns; ++s)
      for (int b = 0; b < d; ++b) Rm[s * d + b] += p.mu * fd::laplacian(g, u, s, d, b);
}

}  // namespace detail

/// One step of rho_t + div(rho u) = 0, (rho u)_t + div(rho u u) + grad p = mu Lap u + S/dt.
/// `momentum_source` (may be empty) is the momentum density added over the step.
inline FluidState compressible_step(const FluidState& fl, std::span<const double> momentum_source,
                                    const PhaseGrid& g, const FluidParams& p, double dt) {
  const std::size_t ns = g.n_space();
  const int d = g.dim();
  if (fl.rho.size() != ns || fl.u.size() != ns * d) throw ValidationError("fluid state does not match the grid");
  if (!momentum_source.empty() && momentum_source.size() != ns * d)
    throw ValidationError("momentum source does not match the grid");
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
  if (p.check_cfl) {
    const double lim = fluid_dt_limit(g, fl.rho, fl.u, p);
    if (dt > lim * (1.0 + 1e-12))
      throw RuntimeAbort("fluid CFL violated: dt = " + std::to_string(dt) + " exceeds " + std::to_string(lim));
  }
  std::vector<double> m(ns * d);
  for (std::size_t s = 0; s < ns; ++s)
    for (int a = 0; a < d; ++a) m[s * d + a] = fl.rho[s] * fl.u[s * d + a];

  std::vector<double> Rr0, Rm0, Rr1, Rm1;
  detail::euler_rhs(g, fl.rho, m, p, Rr0, Rm0);
  std::vector<double> r1(ns), m1(ns * d);
  for (std::size_t s = 0; s < ns; ++s) {
    r1[s] = fl.rho[s] + dt * Rr0[s];
    if (!(r1[s] > 0.0))
      throw RuntimeAbort("fluid density lost positivity in the predictor at space node " + std::to_string(s));
  }
  for (std::size_t i = 0; i < ns * d; ++i) m1[i] = m[i] + dt * Rm0[i];
  detail::euler_rhs(g, r1, m1, p, Rr1, Rm1);

  std::vector<double> rho(ns), mm(ns * d);
  for (std::size_t s = 0; s < ns; ++s) {
    rho[s] = fl.rho[s] + 0.5 * dt * (Rr0[s] + Rr1[s]);
    if (!(rho[s] > 0.0) || !std::isfinite(rho[s]))
      throw RuntimeAbort("fluid density lost positivity: rho = " + std::to_string(rho[s]) + " at space node " +
                         std::to_string(s));
  }
  for (std::size_t i = 0; i < ns * d; ++i) {
    mm[i] = m[i] + 0.5 * dt * (Rm0[i] + Rm1[i]);
    if (!momentum_source.empty()) mm[i] += momentum_source[i];
  }

  std::vector<double> u(ns * d);
  for (std::size_t s = 0; s < ns; ++s)
    for (int a = 0; a < d; ++a) u[s * d + a] = mm[s * d + a] / rho[s];
  if (p.implicit_viscosity && p.mu > 0.0) u = solve_viscous(g, rho, dt * p.mu, mm, u, p.cg_tol);
  for (std::size_t i = 0; i < ns * d; ++i)
    if (!std::isfinite(u[i])) throw RuntimeAbort("non-finite fluid velocity at space node " + std::to_string(i / d));

  FluidState out;
  out.h.resize(ns);
  for (std::size_t s = 0; s < ns; ++s) out.h[s] = symmetrize(rho[s], p.gamma);
  out.rho = std::move(rho);
  out.u = std::move(u);
  out.time = fl.time + dt;
  return out;
}

}  // namespace nsbgk
