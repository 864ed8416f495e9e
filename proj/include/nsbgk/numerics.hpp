#pragma once
/// @file numerics.hpp
/// @brief Summation, interpolation and finite-difference helpers shared by the solver modules.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "nsbgk/core.hpp"

namespace nsbgk::num {

/// Pairwise (tree) summation; the reduction order depends only on the length.
inline double pairwise_sum(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x.first(h)) + pairwise_sum(x.subspan(h));
}

/// Four-point Lagrange stencil: value = sum_m w[m] * q[base + m - 1].
struct CubicStencil {
  int base = 0;
  std::array<double, 4> w{};
};

/// Stencil for a position p measured in grid units (node i sits at p = i).
inline CubicStencil cubic_stencil(double p) {
  CubicStencil st;
  const double fl = std::floor(p);
  const double t = p - fl;
  st.base = static_cast<int>(fl);
  st.w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
  st.w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  st.w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
  st.w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
  return st;
}

inline int wrap(int i, int n) {
  int r = i % n;
  return r < 0 ? r + n : r;
}

/// Periodic cubic interpolation of a scalar spatial field at physical position x.
inline double interp_space(const PhaseGrid& g, std::span<const double> q, std::span<const double> x,
                           int stride = 1, int comp = 0) {
  std::array<CubicStencil, 3> st;
  for (int a = 0; a < g.dim(); ++a) st[a] = cubic_stencil(x[a] / g.dx(a));
  double acc = 0.0;
  std::array<int, 3> idx{0, 0, 0};
  const int m1 = g.dim() > 1 ? 4 : 1, m2 = g.dim() > 2 ? 4 : 1;
  for (int i0 = 0; i0 < 4; ++i0) {
    idx[0] = wrap(st[0].base + i0 - 1, g.nx(0));
    for (int i1 = 0; i1 < m1; ++i1) {
      double w01 = st[0].w[i0];
      if (g.dim() > 1) {
        idx[1] = wrap(st[1].base + i1 - 1, g.nx(1));
        w01 *= st[1].w[i1];
      }
      for (int i2 = 0; i2 < m2; ++i2) {
        double w = w01;
        if (g.dim() > 2) {
          idx[2] = wrap(st[2].base + i2 - 1, g.nx(2));
          w *= st[2].w[i2];
        }
        acc += w * q[g.space_flat(idx) * stride + comp];
      }
    }
  }
  return acc;
}

/// Spatial stencil entries (flat node, weight) for periodic cubic interpolation at x.
inline std::size_t space_stencil(const PhaseGrid& g, std::span<const double> x, std::array<std::size_t, 64>& node,
                                 std::array<double, 64>& weight) {
  std::array<CubicStencil, 3> st;
  for (int a = 0; a < g.dim(); ++a) st[a] = cubic_stencil(x[a] / g.dx(a));
  std::size_t n = 0;
  std::array<int, 3> idx{0, 0, 0};
  const int m1 = g.dim() > 1 ? 4 : 1, m2 = g.dim() > 2 ? 4 : 1;
  for (int i0 = 0; i0 < 4; ++i0) {
    idx[0] = wrap(st[0].base + i0 - 1, g.nx(0));
    for (int i1 = 0; i1 < m1; ++i1) {
      if (g.dim() > 1) idx[1] = wrap(st[1].base + i1 - 1, g.nx(1));
      for (int i2 = 0; i2 < m2; ++i2) {
        if (g.dim() > 2) idx[2] = wrap(st[2].base + i2 - 1, g.nx(2));
        double w = st[0].w[i0];
        if (g.dim() > 1) w *= st[1].w[i1];
        if (g.dim() > 2) w *= st[2].w[i2];
        node[n] = g.space_flat(idx);
        weight[n] = w;
        ++n;
      }
    }
  }
  return n;
}

/// Velocity stencil entries for cubic interpolation at velocity v. Nodes outside the
/// grid carry zero value and are dropped; a point outside [-vmax, vmax] yields zero entries.
inline std::size_t vel_stencil(const PhaseGrid& g, std::span<const double> v, std::array<std::size_t, 64>& node,
                               std::array<double, 64>& weight) {
  std::array<CubicStencil, 3> st;
  for (int a = 0; a < g.dim(); ++a) {
    if (std::abs(v[a]) > g.vmax(a)) return 0;
    st[a] = cubic_stencil((v[a] - g.v(a, 0)) / g.dv(a));
  }
  std::size_t n = 0;
  std::array<int, 3> idx{0, 0, 0};
  const int m1 = g.dim() > 1 ? 4 : 1, m2 = g.dim() > 2 ? 4 : 1;
  for (int i0 = 0; i0 < 4; ++i0) {
    idx[0] = st[0].base + i0 - 1;
    if (idx[0] < 0 || idx[0] >= g.nv(0)) continue;
    for (int i1 = 0; i1 < m1; ++i1) {
      if (g.dim() > 1) {
        idx[1] = st[1].base + i1 - 1;
        if (idx[1] < 0 || idx[1] >= g.nv(1)) continue;
      }
      for (int i2 = 0; i2 < m2; ++i2) {
        if (g.dim() > 2) {
          idx[2] = st[2].base + i2 - 1;
          if (idx[2] < 0 || idx[2] >= g.nv(2)) continue;
        }
        double w = st[0].w[i0];
        if (g.dim() > 1) w *= st[1].w[i1];
        if (g.dim() > 2) w *= st[2].w[i2];
        node[n] = g.vel_flat(idx);
        weight[n] = w;
        ++n;
      }
    }
  }
  return n;
}

// ---------------------------------------------------------------------------
// Finite differences on the periodic spatial grid. Fields are scalar arrays over
// spatial nodes, optionally strided (vector fields).

/// Fourth-order central first derivative along axis a.
inline std::vector<double> d1_periodic4(const PhaseGrid& g, std::span<const double> q, int a, int stride = 1,
                                        int comp = 0) {
  std::vector<double> out(g.n_space());
  const double inv = 1.0 / (12.0 * g.dx(a));
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    const double qm2 = q[g.space_shift(s, a, -2) * stride + comp];
    const double qm1 = q[g.space_shift(s, a, -1) * stride + comp];
    const double qp1 = q[g.space_shift(s, a, 1) * stride + comp];
    const double qp2 = q[g.space_shift(s, a, 2) * stride + comp];
    out[s] = (qm2 - 8.0 * qm1 + 8.0 * qp1 - qp2) * inv;
  }
  return out;
}

/// Fourth-order central second derivative along axis a.
inline std::vector<double> d2_periodic4(const PhaseGrid& g, std::span<const double> q, int a) {
  std::vector<double> out(g.n_space());
  const double inv = 1.0 / (12.0 * g.dx(a) * g.dx(a));
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    const double qm2 = q[g.space_shift(s, a, -2)];
    const double qm1 = q[g.space_shift(s, a, -1)];
    const double qp1 = q[g.space_shift(s, a, 1)];
    const double qp2 = q[g.space_shift(s, a, 2)];
    out[s] = (-qm2 + 16.0 * qm1 - 30.0 * q[s] + 16.0 * qp1 - qp2) * inv;
  }
  return out;
}

/// Fourth-order central third derivative along axis a.
inline std::vector<double> d3_periodic4(const PhaseGrid& g, std::span<const double> q, int a) {
  std::vector<double> out(g.n_space());
  const double inv = 1.0 / (8.0 * g.dx(a) * g.dx(a) * g.dx(a));
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    const double qm3 = q[g.space_shift(s, a, -3)];
    const double qm2 = q[g.space_shift(s, a, -2)];
    const double qm1 = q[g.space_shift(s, a, -1)];
    const double qp1 = q[g.space_shift(s, a, 1)];
    const double qp2 = q[g.space_shift(s, a, 2)];
    const double qp3 = q[g.space_shift(s, a, 3)];
    out[s] = (qm3 - 8.0 * qm2 + 13.0 * qm1 - 13.0 * qp1 + 8.0 * qp2 - qp3) * inv;
  }
  return out;
}

/// Fourth-order first derivative of a non-periodic line of samples (one-sided near the ends).
inline void d1_line4(std::span<const double> q, double h, std::span<double> out) {
  const int n = static_cast<int>(q.size());
  const double inv = 1.0 / (12.0 * h);
  for (int i = 0; i < n; ++i) {
    if (i >= 2 && i <= n - 3) {
      out[i] = (q[i - 2] - 8.0 * q[i - 1] + 8.0 * q[i + 1] - q[i + 2]) * inv;
    } else if (i == 0) {
      out[i] = (-25.0 * q[0] + 48.0 * q[1] - 36.0 * q[2] + 16.0 * q[3] - 3.0 * q[4]) * inv;
    } else if (i == 1) {
      out[i] = (-3.0 * q[0] - 10.0 * q[1] + 18.0 * q[2] - 6.0 * q[3] + q[4]) * inv;
    } else if (i == n - 2) {
      out[i] = (3.0 * q[n - 1] + 10.0 * q[n - 2] - 18.0 * q[n - 3] + 6.0 * q[n - 4] - q[n - 5]) * inv;
    } else {
      out[i] = (25.0 * q[n - 1] - 48.0 * q[n - 2] + 36.0 * q[n - 3] - 16.0 * q[n - 4] + 3.0 * q[n - 5]) * inv;
    }
  }
}

/// Fourth-order second derivative of a non-periodic line of samples.
inline void d2_line4(std::span<const double> q, double h, std::span<double> out) {
  const int n = static_cast<int>(q.size());
  const double inv = 1.0 / (12.0 * h * h);
  for (int i = 0; i < n; ++i) {
    if (i >= 2 && i <= n - 3) {
      out[i] = (-q[i - 2] + 16.0 * q[i - 1] - 30.0 * q[i] + 16.0 * q[i + 1] - q[i + 2]) * inv;
    } else if (i == 0) {
      out[i] = (45.0 * q[0] - 154.0 * q[1] + 214.0 * q[2] - 156.0 * q[3] + 61.0 * q[4] - 10.0 * q[5]) * inv;
    } else if (i == 1) {
      out[i] = (10.0 * q[0] - 15.0 * q[1] - 4.0 * q[2] + 14.0 * q[3] - 6.0 * q[4] + q[5]) * inv;
    } else if (i == n - 2) {
      out[i] = (10.0 * q[n - 1] - 15.0 * q[n - 2] - 4.0 * q[n - 3] + 14.0 * q[n - 4] - 6.0 * q[n - 5] + q[n - 6]) *
               inv;
    } else {
      out[i] = (45.0 * q[n - 1] - 154.0 * q[n - 2] + 214.0 * q[n - 3] - 156.0 * q[n - 4] + 61.0 * q[n - 5] -
                10.0 * q[n - 6]) *
               inv;
    }
  }
}

}  // namespace nsbgk::num
