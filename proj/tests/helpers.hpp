#pragma once
// Shared fixtures for the unit and acceptance tests: grids and random inputs.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nsbgk/core.hpp"

namespace testkit {

using nsbgk::GridSpec;
using nsbgk::KineticState;
using nsbgk::PhaseGrid;

inline PhaseGrid grid1d(int nx = 64, double vmax = 8.0, int nv = 64, double period = 1.0,
                        nsbgk::Quadrature rule = nsbgk::Quadrature::midpoint) {
  GridSpec s;
  s.dim = 1;
  s.period = {period, 1.0, 1.0};
  s.cells = {nx, 1, 1};
  s.vmax = {vmax, 1.0, 1.0};
  s.vcells = {nv, 8, 8};
  s.rule = rule;
  return PhaseGrid::build(s);
}

inline PhaseGrid grid_nd(int d, int nx, double vmax, int nv, double period = 1.0) {
  GridSpec s;
  s.dim = d;
  s.period = {period, period, period};
  s.cells = {nx, nx, nx};
  s.vmax = {vmax, vmax, vmax};
  s.vcells = {nv, nv, nv};
  return PhaseGrid::build(s);
}

/// Continuous Gaussian in velocity, written out independently of the library.
inline double gauss(double rho, const double* u, double T, std::span<const double> v) {
  const int d = static_cast<int>(v.size());
  double c2 = 0.0;
  for (int a = 0; a < d; ++a) c2 += (v[a] - u[a]) * (v[a] - u[a]);
  return rho * std::exp(-c2 / (2.0 * T)) / std::pow(2.0 * std::numbers::pi * T, 0.5 * d);
}

/// Smooth nonnegative f: a spatially modulated two-bump mixture with random parameters.
inline KineticState random_smooth_f(const PhaseGrid& g, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  KineticState ks(g);
  const int d = g.dim();
  double amp[2], ph[2], u0[2][3], T0[2], rho0[2];
  int mode[2];
  for (int b = 0; b < 2; ++b) {
    amp[b] = 0.6 * U(rng);
    ph[b] = 2.0 * std::numbers::pi * U(rng);
    mode[b] = 1 + static_cast<int>(2.0 * U(rng));
    T0[b] = 0.3 + 1.2 * U(rng);
    rho0[b] = scale * (0.2 + U(rng));
    for (int a = 0; a < 3; ++a) u0[b][a] = -1.0 + 2.0 * U(rng);
  }
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    const auto idx = g.space_index(s);
    double phase = 0.0;
    for (int a = 0; a < d; ++a) phase += 2.0 * std::numbers::pi * g.x(a, idx[a]) / g.period(a);
    for (std::size_t j = 0; j < g.n_vel(); ++j) {
      double val = 0.0;
      for (int b = 0; b < 2; ++b) {
        const double r = rho0[b] * (1.0 + amp[b] * std::sin(mode[b] * phase + ph[b]));
        double ub[3];
        for (int a = 0; a < 3; ++a) ub[a] = u0[b][a] * (1.0 + 0.3 * std::cos(phase + ph[b]));
        val += gauss(r, ub, T0[b], g.vel(j));
      }
      ks.f[s * g.n_vel() + j] = val;
    }
  }
  return ks;
}

/// iid uniform nonnegative values; rough in v but still a valid density.
inline KineticState random_rough_f(const PhaseGrid& g, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> U(0.0, scale);
  KineticState ks(g);
  for (double& x : ks.f) x = U(rng);
  return ks;
}

inline double max_abs(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace testkit
