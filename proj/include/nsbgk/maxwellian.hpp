#pragma once
/// @file maxwellian.hpp
/// @brief Discrete local Maxwellian with exact discrete moments, the BGK operator,
/// and diagnostics of the Maxwellian map (weighted envelope, Lipschitz ratio).

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "nsbgk/core.hpp"
#include "nsbgk/moments.hpp"

namespace nsbgk {

/// Arguments of the local Maxwellian per spatial node.
struct MaxwellianParams {
  std::vector<double> rho;
  std::vector<double> u;  ///< interleaved [s * dim + a]
  std::vector<double> T;

  static MaxwellianParams from_moments(const MacroFields& m) {
    MaxwellianParams p{m.rho, m.u, m.T};
    for (std::size_t s = 0; s < m.vacuum.size(); ++s)
      if (m.vacuum[s]) p.rho[s] = 0.0;
    return p;
  }

  static MaxwellianParams uniform(const PhaseGrid& g, double rho, std::span<const double> u, double T) {
    MaxwellianParams p;
    p.rho.assign(g.n_space(), rho);
    p.T.assign(g.n_space(), T);
    p.u.resize(g.n_space() * g.dim());
    for (std::size_t s = 0; s < g.n_space(); ++s)
      for (int a = 0; a < g.dim(); ++a) p.u[s * g.dim() + a] = u[a];
    return p;
  }
};

/// rho (2 pi T)^{-d/2} exp(-|u - v|^2 / (2T)).
inline double maxwellian_value(double rho, std::span<const double> u, double T, std::span<const double> v) {
  const int d = static_cast<int>(v.size());
  double c2 = 0.0;
  for (int a = 0; a < d; ++a) c2 += (u[a] - v[a]) * (u[a] - v[a]);
  return rho * std::pow(2.0 * std::numbers::pi * T, -0.5 * d) * std::exp(-c2 / (2.0 * T));
}

/// Newton settings for the moment-matching fit.
struct ProjectionSettings {
  double tol = 1e-13;
  int max_iter = 50;
};

namespace detail {

/// Fits M_j = rho exp(l0 + l.xi_j + c |xi_j|^2), xi = (v - u)/sqrt(T), so that the discrete
/// mass, momentum and energy of M equal those of the continuous Maxwellian (rho, u, T).
/// Damped Newton on the convex dual; returns false when the fit does not converge.
inline bool project_node(const PhaseGrid& g, double rho, std::span<const double> u, double T, std::span<double> out,
                         const ProjectionSettings& ps) {
  const int d = g.dim();
  const int K = d + 2;
  const std::size_t nv = g.n_vel();
  using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 5, 1>;
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 5, 5>;

  const double sT = std::sqrt(T);
  thread_local std::vector<double> phi;
  thread_local std::vector<double> ex;
  phi.resize(nv * K);
  ex.resize(nv);
  for (std::size_t j = 0; j < nv; ++j) {
    double r2 = 0.0;
    phi[j * K] = 1.0;
    for (int a = 0; a < d; ++a) {
      const double xi = (g.vel(j, a) - u[a]) / sT;
      phi[j * K + 1 + a] = xi;
      r2 += xi * xi;
    }
    phi[j * K + K - 1] = r2;
  }
  Vec target = Vec::Zero(K);
  target(0) = 1.0;
  target(K - 1) = static_cast<double>(d);

  Vec lam = Vec::Zero(K);
  lam(0) = -0.5 * d * std::log(2.0 * std::numbers::pi * T);
  lam(K - 1) = -0.5;

  auto evaluate = [&](const Vec& l, Vec& grad, double& obj) {
    grad = -target;
    double z = 0.0;
    for (std::size_t j = 0; j < nv; ++j) {
      double e = 0.0;
      for (int c = 0; c < K; ++c) e += l(c) * phi[j * K + c];
      ex[j] = std::exp(e);
      const double we = g.vel_weight(j) * ex[j];
      z += we;
      for (int c = 0; c < K; ++c) grad(c) += we * phi[j * K + c];
    }
    obj = z - l.dot(target);
    return std::isfinite(obj) && grad.allFinite();
  };

  Vec grad(K);
  double obj = 0.0;
  if (!evaluate(lam, grad, obj)) return false;
  bool converged = grad.cwiseAbs().maxCoeff() <= ps.tol;
  for (int it = 0; it < ps.max_iter && !converged; ++it) {
    Mat H = Mat::Zero(K, K);
    for (std::size_t j = 0; j < nv; ++j) {
      const double we = g.vel_weight(j) * ex[j];
      for (int r = 0; r < K; ++r)
        for (int c = 0; c <= r; ++c) H(r, c) += we * phi[j * K + r] * phi[j * K + c];
    }
    H = H.selfadjointView<Eigen::Lower>();
    Eigen::LDLT<Mat> ldlt(H);
    if (ldlt.info() != Eigen::Success) return false;
    const Vec step = ldlt.solve(-grad);
    if (!step.allFinite()) return false;

    double t = 1.0;
    Vec trial(K), tgrad(K);
    double tobj = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      trial = lam + t * step;
      if (evaluate(trial, tgrad, tobj) &&
          (tobj <= obj + 1e-4 * t * grad.dot(step) || tgrad.cwiseAbs().maxCoeff() < grad.cwiseAbs().maxCoeff())) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) return false;
    lam = trial;
    grad = tgrad;
    obj = tobj;
    converged = grad.cwiseAbs().maxCoeff() <= ps.tol;
  }
  if (!converged) return false;
  // Polish: full Newton steps while the residual keeps shrinking.
  for (int it = 0; it < 3; ++it) {
    Mat H = Mat::Zero(K, K);
    for (std::size_t j = 0; j < nv; ++j) {
      const double we = g.vel_weight(j) * ex[j];
      for (int r = 0; r < K; ++r)
        for (int c = 0; c <= r; ++c) H(r, c) += we * phi[j * K + r] * phi[j * K + c];
    }
    H = H.selfadjointView<Eigen::Lower>();
    const Vec step = Eigen::LDLT<Mat>(H).solve(-grad);
    Vec trial = lam + step, tgrad(K);
    double tobj = 0.0;
    const std::vector<double> keep = ex;
    if (!step.allFinite() || !evaluate(trial, tgrad, tobj) ||
        !(tgrad.cwiseAbs().maxCoeff() < grad.cwiseAbs().maxCoeff())) {
      ex = keep;
      break;
    }
    lam = trial;
    grad = tgrad;
  }
  for (std::size_t j = 0; j < nv; ++j) out[j] = rho * ex[j];
  return true;
}

}  // namespace detail

/// Discrete Maxwellian whose discrete moments equal (rho, rho u, d rho T + rho |u|^2) exactly.
/// Throws RuntimeAbort naming the node when T <= 0 at an active node or the fit fails.
inline std::vector<double> discrete_maxwellian(const MaxwellianParams& p, const PhaseGrid& g,
                                               const ProjectionSettings& ps = {}) {
  const std::size_t ns = g.n_space(), nv = g.n_vel();
  const int d = g.dim();
  if (p.rho.size() != ns || p.T.size() != ns || p.u.size() != ns * d)
    throw ValidationError("Maxwellian parameters do not match the spatial grid");
  std::vector<double> M(ns * nv, 0.0);
  for (std::size_t s = 0; s < ns; ++s) {
    if (p.rho[s] == 0.0) continue;
    if (!(p.rho[s] > 0.0)) throw RuntimeAbort("Maxwellian density is negative at space node " + std::to_string(s));
    if (!(p.T[s] > 0.0))
      throw RuntimeAbort("Maxwellian temperature must be positive at space node " + std::to_string(s) +
                         " (T = " + std::to_string(p.T[s]) + ")");
    std::span<const double> u(p.u.data() + s * d, d);
    if (!detail::project_node(g, p.rho[s], u, p.T[s], std::span<double>(M.data() + s * nv, nv), ps))
      throw RuntimeAbort("conservative Maxwellian projection failed at space node " + std::to_string(s) +
                         " (T = " + std::to_string(p.T[s]) + ", dv^2 = " + std::to_string(g.dv(0) * g.dv(0)) + ")");
  }
  return M;
}

/// nu(rho_f) = rho_f^alpha.
inline double collision_frequency(double rho_f, double alpha) { return std::pow(rho_f, alpha); }

struct BgkSettings {
  double alpha = 1.0;
  double t_ref = 1.0;
  double floor_rel = 1e-12;
  double cold_factor = 0.25;
  ProjectionSettings projection{};

  static BgkSettings from(const SimConfig& c) { return {c.alpha, c.t_ref, c.moment_floor, c.cold_factor, {}}; }
};

/// Everything the BGK relaxation needs at one instant.
struct BgkData {
  MacroFields macro;
  std::vector<double> nu;               ///< per spatial node; 0 on vacuum and cold nodes
  std::vector<std::uint8_t> cold;       ///< T_f below cold_factor * dv^2
  std::vector<double> M;                ///< discrete Maxwellian (zero where nu = 0)
  std::vector<double> Q;                ///< nu (M - f)
};

/// Smallest velocity spacing; the resolution limit for the Maxwellian fit.
inline double min_dv(const PhaseGrid& g) {
  double m = g.dv(0);
  for (int a = 1; a < g.dim(); ++a) m = std::min(m, g.dv(a));
  return m;
}

/// Q = rho_f^alpha (M(f) - f); zero on vacuum nodes and on nodes too cold to resolve.
inline BgkData bgk_operator(const KineticState& ks, const PhaseGrid& g, const BgkSettings& bs) {
  BgkData b;
  b.macro = compute_moments(ks, g, bs.t_ref, bs.floor_rel);
  const std::size_t ns = g.n_space(), nv = g.n_vel();
  const double t_cold = bs.cold_factor * min_dv(g) * min_dv(g);
  b.nu.assign(ns, 0.0);
  b.cold.assign(ns, 0);
  MaxwellianParams p = MaxwellianParams::from_moments(b.macro);
  for (std::size_t s = 0; s < ns; ++s) {
    if (b.macro.vacuum[s]) continue;
    if (b.macro.T[s] < t_cold) {
      b.cold[s] = 1;
      p.rho[s] = 0.0;
      continue;
    }
    b.nu[s] = collision_frequency(b.macro.rho[s], bs.alpha);
  }
  b.M = discrete_maxwellian(p, g, bs.projection);
  b.Q.assign(ns * nv, 0.0);
  for (std::size_t s = 0; s < ns; ++s) {
    if (b.nu[s] == 0.0) continue;
    for (std::size_t j = 0; j < nv; ++j) b.Q[s * nv + j] = b.nu[s] * (b.M[s * nv + j] - ks.f[s * nv + j]);
  }
  return b;
}

inline BgkData bgk_operator(const KineticState& ks, const PhaseGrid& g, double alpha) {
  BgkSettings bs;
  bs.alpha = alpha;
  return bgk_operator(ks, g, bs);
}

/// exp(<v>^k) M / [rho (2 pi T)^{-d/2} exp(-|u - v|^2 / (4T))] for the continuous Maxwellian.
inline double envelope_ratio_analytic(std::span<const double> v, std::span<const double> u, double T, double k) {
  double c2 = 0.0;
  for (std::size_t a = 0; a < v.size(); ++a) c2 += (u[a] - v[a]) * (u[a] - v[a]);
  return std::exp(std::pow(japanese_bracket(v), k) - c2 / (4.0 * T));
}

struct EnvelopeReport {
  double max_ratio = 0.0;
  std::size_t arg_space = 0, arg_vel = 0;
  std::size_t active_nodes = 0;
};

/// Scans exp(<v>^k) M(f) against the Gaussian envelope with doubled variance over all
/// active nodes. A finite maximum is the empirical envelope constant.
inline EnvelopeReport maxwellian_envelope_check(const KineticState& ks, const PhaseGrid& g, double k,
                                                const BgkSettings& bs = {}) {
  const BgkData b = bgk_operator(ks, g, bs);
  const std::size_t ns = g.n_space(), nv = g.n_vel();
  const int d = g.dim();
  EnvelopeReport r;
  for (std::size_t s = 0; s < ns; ++s) {
    if (b.macro.vacuum[s] || b.cold[s]) continue;
    ++r.active_nodes;
    const double rho = b.macro.rho[s], T = b.macro.T[s];
    const double pref = rho * std::pow(2.0 * std::numbers::pi * T, -0.5 * d);
    for (std::size_t j = 0; j < nv; ++j) {
      double c2 = 0.0;
      for (int a = 0; a < d; ++a) {
        const double c = b.macro.u[s * d + a] - g.vel(j, a);
        c2 += c * c;
      }
      const double env = pref * std::exp(-c2 / (4.0 * T));
      const double ratio = weight_value(g.vel(j), k) * b.M[s * nv + j] / env;
      if (ratio > r.max_ratio) {
        r.max_ratio = ratio;
        r.arg_space = s;
        r.arg_vel = j;
      }
    }
  }
  return r;
}

/// Bounds rho + |u| + T <= c1 and rho + T >= c2 required of both arguments.
struct HypothesisBox {
  double c1 = 10.0;
  double c2 = 0.1;
};

struct LipschitzReport {
  double ratio = 0.0;
  bool hypothesis_ok = true;
  std::string warning;
};

/// ||M(f) - M(g)||_{L^2_k} / ||f - g||_{L^2_k}; the hypothesis box is checked and reported.
inline LipschitzReport maxwellian_lipschitz_probe(const KineticState& f, const KineticState& gk, const PhaseGrid& g,
                                                  double k, const HypothesisBox& box = {},
                                                  const BgkSettings& bs = {}) {
  LipschitzReport r;
  const std::size_t ns = g.n_space(), nv = g.n_vel();
  const int d = g.dim();
  const BgkData bf = bgk_operator(f, g, bs);
  const BgkData bg = bgk_operator(gk, g, bs);
  for (const BgkData* b : {&bf, &bg}) {
    for (std::size_t s = 0; s < ns && r.hypothesis_ok; ++s) {
      double un = 0.0;
      for (int a = 0; a < d; ++a) un += b->macro.u[s * d + a] * b->macro.u[s * d + a];
      const double rho = b->macro.rho[s];
      const double T = b->macro.vacuum[s] ? 0.0 : b->macro.T[s];
      if (rho + std::sqrt(un) + T > box.c1 || rho + T < box.c2 || b->cold[s]) {
        r.hypothesis_ok = false;
        r.warning = "moments leave the hypothesis box at space node " + std::to_string(s);
      }
    }
  }
  const std::vector<double> w = weight_table(g, k);
  double num = 0.0, den = 0.0;
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t j = 0; j < nv; ++j) {
      const std::size_t i = s * nv + j;
      const double ww = w[j] * w[j] * g.vel_weight(j);
      num += ww * (bf.M[i] - bg.M[i]) * (bf.M[i] - bg.M[i]);
      den += ww * (f.f[i] - gk.f[i]) * (f.f[i] - gk.f[i]);
    }
  r.ratio = den == 0.0 ? 0.0 : std::sqrt(num / den);
  return r;
}

}  // namespace nsbgk
