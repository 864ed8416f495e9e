#pragma once
/// @file initial_data.hpp
/// @brief Grid resolution and initial states built from a SimConfig.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nsbgk/core.hpp"
#include "nsbgk/maxwellian.hpp"

namespace nsbgk {

/// Grid spec with vmax filled in when vmax_auto is set: 8 max(1, sqrt(T_max), |u_f|_max).
inline GridSpec resolve_grid_spec(const SimConfig& cfg) {
  GridSpec s = cfg.grid;
  if (cfg.vmax_auto) {
    const double tmax = cfg.init_T * (1.0 + std::abs(cfg.amp_T));
    const double umax = std::abs(cfg.init_u_f) + std::abs(cfg.amp_uf);
    const double v = 8.0 * std::max({1.0, std::sqrt(tmax), umax});
    for (int a = 0; a < 3; ++a) s.vmax[a] = v;
  }
  return s;
}

inline PhaseGrid make_grid(const SimConfig& cfg) { return build_phase_grid(resolve_grid_spec(cfg)); }

/// Pointwise macroscopic profiles for the kinetic and fluid parts.
struct InitialProfiles {
  std::vector<double> rho, u;          ///< fluid
  std::vector<double> rho_f, u_f, T_f; ///< particles
};

namespace detail {

/// Smooth periodic perturbation shape in [-1, 1]: random Fourier modes 1..modes per axis.
struct RandomShape {
  std::vector<std::array<double, 3>> coef;  // sin, cos amplitude and axis
  std::vector<int> mode;
  double norm = 1.0;

  RandomShape(std::mt19937_64& rng, int dim, int modes) {
    std::normal_distribution<double> N(0.0, 1.0);
    for (int a = 0; a < dim; ++a)
      for (int m = 1; m <= modes; ++m) {
        coef.push_back({N(rng) / m, N(rng) / m, static_cast<double>(a)});
        mode.push_back(m);
      }
    double s = 0.0;
    for (const auto& c : coef) s += std::abs(c[0]) + std::abs(c[1]);
    norm = s > 0.0 ? s : 1.0;
  }

  double operator()(const PhaseGrid& g, const std::array<int, 3>& idx) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < coef.size(); ++i) {
      const int a = static_cast<int>(coef[i][2]);
      const double th = 2.0 * std::numbers::pi * mode[i] * g.x(a, idx[a]) / g.period(a);
      acc += coef[i][0] * std::sin(th) + coef[i][1] * std::cos(th);
    }
    return acc / norm;
  }
};

}  // namespace detail

inline InitialProfiles initial_profiles(const SimConfig& cfg, const PhaseGrid& g) {
  const int d = g.dim();
  const std::size_t ns = g.n_space();
  InitialProfiles p;
  p.rho.assign(ns, cfg.init_rho);
  p.u.assign(ns * d, 0.0);
  p.rho_f.assign(ns, cfg.init_rho_f);
  p.u_f.assign(ns * d, 0.0);
  p.T_f.assign(ns, cfg.init_T);
  for (std::size_t s = 0; s < ns; ++s) {
    p.u[s * d] = cfg.init_u;
    p.u_f[s * d] = cfg.init_u_f;
  }
  if (cfg.init == "equilibrium") return p;

  if (cfg.init == "perturbed") {
    const int m = std::max(1, cfg.init_mode);
    for (std::size_t s = 0; s < ns; ++s) {
      const auto idx = g.space_index(s);
      double sn = 0.0, cs = 0.0;
      for (int a = 0; a < d; ++a) {
        const double th = 2.0 * std::numbers::pi * m * g.x(a, idx[a]) / g.period(a);
        sn += std::sin(th) / d;
        cs += std::cos(th) / d;
      }
      p.rho[s] *= 1.0 + cfg.amp_rho * sn;
      p.rho_f[s] *= 1.0 + cfg.amp_f * cs;
      p.T_f[s] *= 1.0 + cfg.amp_T * cs;
      for (int a = 0; a < d; ++a) {
        p.u[s * d + a] += cfg.amp_u * (a == 0 ? cs : sn);
        p.u_f[s * d + a] += cfg.amp_uf * (a == 0 ? sn : cs);
      }
    }
    return p;
  }

  if (cfg.init == "random_smooth") {
    std::mt19937_64 rng(cfg.seed);
    const int m = std::max(1, cfg.init_mode);
    const detail::RandomShape srho(rng, d, m), sf(rng, d, m), sT(rng, d, m);
    std::vector<detail::RandomShape> su, suf;
    for (int a = 0; a < d; ++a) su.emplace_back(rng, d, m);
    for (int a = 0; a < d; ++a) suf.emplace_back(rng, d, m);
    for (std::size_t s = 0; s < ns; ++s) {
      const auto idx = g.space_index(s);
      p.rho[s] *= 1.0 + cfg.amp_rho * srho(g, idx);
      p.rho_f[s] *= 1.0 + cfg.amp_f * sf(g, idx);
      p.T_f[s] *= 1.0 + cfg.amp_T * sT(g, idx);
      for (int a = 0; a < d; ++a) {
        p.u[s * d + a] += cfg.amp_u * su[a](g, idx);
        p.u_f[s * d + a] += cfg.amp_uf * suf[a](g, idx);
      }
    }
    return p;
  }
  throw ValidationError("init must be one of equilibrium, perturbed, random_smooth (got '" + cfg.init + "')");
}

}  // namespace nsbgk
