// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "nsbgk/nsbgk.hpp"
#include "oracles.hpp"

using namespace nsbgk;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Tolerances.
constexpr double kCancelTol = 1e-12;      // moments of Q per node, relative to max|f| V_max^2
constexpr double kFixedPointTol = 1e-12;  // ||Q(M)||_inf
constexpr double kLemmaSlack = 1e-6;      // margin <= 1 + slack
constexpr double kCharRelTol = 1e-4;      // V(t) against v e^{-t}
constexpr double kOrderTarget = 4.0, kOrderBand = 0.3;
constexpr double kFlatTol = 0.05;         // velocity-growth ratio spread
constexpr double kEqDriftTol = 1e-8;
constexpr double kMomentumDriftTol = 1e-6;
constexpr double kMmsOrder = 1.9;
constexpr double kViscousRateTol = 0.02;
constexpr double kContraction = 0.5, kPicardTol = 1e-8;
constexpr int kPicardIters = 8;
constexpr double kDecayDrop = 10.0, kDecayResidual = 0.15;
constexpr double kNormSlack = 1e-12;
constexpr double kRoundTripTol = 1e-15;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

std::string sci(double x) { return fmt("%.3e", x); }

PhaseGrid grid1(int nx, double vmax, int nv, double period = 1.0) {
  GridSpec s;
  s.dim = 1;
  s.cells = {nx, 1, 1};
  s.vmax = {vmax, 1.0, 1.0};
  s.vcells = {nv, 8, 8};
  s.period = {period, 1.0, 1.0};
  return build_phase_grid(s);
}

SimConfig load(const char* name) { return parse_config(std::string(NSBGK_CONFIG_DIR) + "/" + name); }

/// Random nonnegative f: per node a mixture of Gaussians with random noise; some nodes are rough.
KineticState random_density(const PhaseGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int d = g.dim();
  KineticState ks(g);
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    const bool rough = U(rng) < 0.25;
    double rho[2], u[2][3], T[2];
    for (int b = 0; b < 2; ++b) {
      rho[b] = 0.1 + U(rng);
      T[b] = 0.3 + 1.5 * U(rng);
      for (int a = 0; a < 3; ++a) u[b][a] = -1.5 + 3.0 * U(rng);
    }
    for (std::size_t j = 0; j < g.n_vel(); ++j) {
      double val = 0.0;
      for (int b = 0; b < 2; ++b) {
        double c2 = 0.0;
        for (int a = 0; a < d; ++a) c2 += (g.vel(j, a) - u[b][a]) * (g.vel(j, a) - u[b][a]);
        val += rho[b] * std::exp(-c2 / (2.0 * T[b])) / std::pow(kTwoPi * T[b], 0.5 * d);
      }
      ks.f[s * g.n_vel() + j] = rough ? val * U(rng) * 2.0 : val * (0.8 + 0.4 * U(rng));
    }
  }
  return ks;
}

/// Sign-changing smooth phase-space field for norm identities.
std::vector<double> random_field(const PhaseGrid& g, std::mt19937_64& rng, double k) {
  std::normal_distribution<double> N(0.0, 1.0);
  const double a0 = N(rng), a1 = N(rng), a2 = N(rng), c0 = N(rng), c1 = N(rng), w = 0.3 + std::abs(N(rng));
  std::vector<double> f(g.size());
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    const double x = g.x(0, s);
    for (std::size_t j = 0; j < g.n_vel(); ++j) {
      const double v = g.vel(j, 0);
      const double env = std::exp(-std::pow(1.0 + v * v, 0.5 * k) - w * v * v);
      f[s * g.n_vel() + j] =
          env * (a0 + a1 * std::sin(kTwoPi * x) + a2 * std::cos(2.0 * kTwoPi * x)) * (c0 + c1 * v);
    }
  }
  return f;
}

struct Sums {
  long double pm = 0, fm = 0, p = 0, scale = 0;
};

/// Particle mass, fluid mass and total momentum by direct summation (1D).
Sums direct_sums(const SystemState& st, const PhaseGrid& g) {
  Sums r;
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    for (std::size_t j = 0; j < g.n_vel(); ++j) {
      const long double fw = static_cast<long double>(st.f.f[s * g.n_vel() + j]) * g.vel_weight(j);
      r.pm += fw;
      r.p += fw * g.vel(j, 0);
      r.scale += fw * std::abs(g.vel(j, 0));
    }
    r.fm += st.fluid.rho[s];
    r.p += static_cast<long double>(st.fluid.rho[s]) * st.fluid.u[s];
    r.scale += static_cast<long double>(st.fluid.rho[s]) * std::abs(st.fluid.u[s]);
  }
  const long double dx = g.dx(0);
  r.pm *= dx, r.fm *= dx, r.p *= dx, r.scale *= dx;
  return r;
}

// 1. Moments of Q vanish.
Outcome bgk_cancellation() {
  const PhaseGrid g = grid1(64, 8.0, 64);
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const KineticState ks = random_density(g, rng);
    const BgkData b = bgk_operator(ks, g, 1.0);
    double fmax = 0.0;
    for (double x : ks.f) fmax = std::max(fmax, std::abs(x));
    const double scale = fmax * g.vmax(0) * g.vmax(0);
    for (std::size_t s = 0; s < g.n_space(); ++s) {
      long double m0 = 0, m1 = 0, m2 = 0;
      for (std::size_t j = 0; j < g.n_vel(); ++j) {
        const long double q = static_cast<long double>(b.Q[s * g.n_vel() + j]) * g.vel_weight(j);
        const double v = g.vel(j, 0);
        m0 += q, m1 += q * v, m2 += q * v * v;
      }
      for (long double m : {m0, m1, m2}) worst = std::max(worst, static_cast<double>(std::abs(m)) / scale);
    }
  }
  return {worst <= kCancelTol, "max |moment of Q| / (max|f| V^2) = " + sci(worst) + " over 100 inputs"};
}

// 2. Discrete Maxwellian is a fixed point.
Outcome maxwellian_fixed_point() {
  const PhaseGrid g = grid1(64, 8.0, 64);
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> R(0.5, 3.0), Uu(-2.0, 2.0), T(0.3, 3.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double u[1] = {Uu(rng)};
    const KineticState ks(discrete_maxwellian(MaxwellianParams::uniform(g, R(rng), u, T(rng)), g), 0.0);
    for (double q : bgk_operator(ks, g, 1.0).Q) worst = std::max(worst, std::abs(q));
  }
  return {worst <= kFixedPointTol, "max ||Q(M)||_inf = " + sci(worst) + " over 20 (rho, u, T)"};
}

// 3. rho_f <= C (int f^2)^{1/2} T_f^{d/4}.
double lemma_margin(const PhaseGrid& g, const KineticState& ks, double C, double& lib_gap) {
  const RhoTReport lib = check_rho_T_relation(ks, g);
  double worst = 0.0;
  lib_gap = 0.0;
  const int d = g.dim();
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    std::span<const double> fv(ks.f.data() + s * g.n_vel(), g.n_vel());
    const oracle::Moments m = oracle::moments(g, fv);
    long double l2 = 0;
    for (std::size_t j = 0; j < g.n_vel(); ++j) l2 += static_cast<long double>(fv[j]) * fv[j] * g.vel_weight(j);
    const double margin = static_cast<double>(m.rho / (C * std::sqrt(l2) * std::pow(m.T, d / 4.0L)));
    worst = std::max(worst, margin);
    lib_gap = std::max(lib_gap, std::abs(margin - lib.margin[s]));
  }
  return worst;
}

Outcome rho_T_lemma() {
  // C_0 is the Cauchy-Schwarz constant on the unit ball: |B_1|^{1/2}.
  const double C3 = std::pow(2.0, 1.75) * std::pow(3.0, 0.75) * std::sqrt(4.0 * std::numbers::pi / 3.0);
  // Same split in d = 1: 2^{5/4} |B_1|^{1/2} with |B_1| = 2.
  const double C1 = std::pow(2.0, 1.25) * std::sqrt(2.0);
  GridSpec s3;
  s3.dim = 3;
  s3.cells = {8, 8, 8};
  s3.vcells = {16, 16, 16};
  s3.vmax = {6.0, 6.0, 6.0};
  const PhaseGrid g3 = build_phase_grid(s3);
  const PhaseGrid g1 = grid1(64, 8.0, 64);
  std::mt19937_64 rng(303);
  double w3 = 0.0, w1 = 0.0, gap = 0.0, gi = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    w3 = std::max(w3, lemma_margin(g3, random_density(g3, rng), C3, gi));
    gap = std::max(gap, gi);
    w1 = std::max(w1, lemma_margin(g1, random_density(g1, rng), C1, gi));
    gap = std::max(gap, gi);
  }
  const bool constants = std::abs(rho_T_constant(3) - C3) <= 1e-13 * C3 && std::abs(rho_T_constant(1) - C1) <= 1e-13 * C1;
  return {w3 <= 1.0 + kLemmaSlack && w1 <= 1.0 + kLemmaSlack && gap <= 1e-9 && constants,
          "max margin d=3 " + fmt("%.4f", w3) + ", d=1 " + fmt("%.4f", w1) + " (50 inputs each); library gap " +
              sci(gap)};
}

// 4. Characteristics.
Outcome characteristics() {
  const PhaseGrid g = grid1(16, 8.0, 32);
  const double u0[1] = {0.0};
  const FieldHistory F = FieldHistory::uniform(g, 1.0, u0);
  CharState z;
  z.X[0] = 0.1;
  z.V[0] = 2.0;
  double err[2], rel = 0.0;
  for (int l = 0; l < 2; ++l) {
    const int steps = 1000 << l;
    const CharState e = advance_characteristic(g, F, z, 1.0, steps);
    double xr, vr;
    oracle::damped_characteristic(1.0, 0.0, 0.1, 2.0, 1.0, xr, vr);
    err[l] = std::abs(e.V[0] - vr);
    if (l == 0) rel = err[0] / std::abs(vr);
  }
  const double ratio = err[0] / err[1];

  // backward growth |V(0)| / (1 + |v|) over the speed shells 1..16
  std::vector<CharState> zs;
  for (int v = 1; v <= 16; ++v)
    for (double sg : {-1.0, 1.0}) {
      CharState p;
      p.X[0] = 0.3;
      p.V[0] = sg * v;
      zs.push_back(p);
    }
  const GrowthStats gs = velocity_growth_ratio(g, F, zs, 1.0, 1000);
  const auto [lo, hi] = std::minmax_element(gs.ratios.begin(), gs.ratios.end());
  const double spread = *hi / *lo - 1.0;
  const bool a = rel <= kCharRelTol && std::abs(ratio - kOrderTarget) <= kOrderBand;
  const bool b = spread <= kFlatTol;
  return {a && b, std::string(a ? "characteristics ok" : "characteristics FAILED") + " (rel err " + sci(rel) +
                      ", halving ratio " + fmt("%.3f", ratio) + "); growth ratio spread over |v|=1..16 " +
                      fmt("%.1f%%", 100.0 * spread) + (b ? " within 5%" : " exceeds 5%") + " (ratio range " +
                      fmt("%.3f", *lo) + ".." + fmt("%.3f", *hi) + ")"};
}

// 5. Conservation.
Outcome conservation() {
  std::string detail;
  bool ok = true;
  {
    const SimConfig cfg = load("equilibrium.ini");
    const PhaseGrid g = make_grid(cfg);
    const SimulationResult r = run_simulation(cfg, g, make_initial_state(cfg, g));
    const Sums a = direct_sums(make_initial_state(cfg, g), g), b = direct_sums(r.final_state, g);
    const double dpm = static_cast<double>(std::abs(b.pm - a.pm) / a.pm);
    const double dfm = static_cast<double>(std::abs(b.fm - a.fm) / a.fm);
    const double dp = static_cast<double>(std::abs(b.p - a.p) / a.scale);
    ok = ok && r.time_grid.steps == 100 && dpm <= kEqDriftTol && dfm <= kEqDriftTol && dp <= kEqDriftTol;
    detail += "equilibrium " + std::to_string(r.time_grid.steps) + " steps: mass " + sci(dpm) + "/" + sci(dfm) +
              ", momentum " + sci(dp);
  }
  {
    const SimConfig cfg = load("random_smooth.ini");
    const PhaseGrid g = make_grid(cfg);
    const SimulationResult r = run_simulation(cfg, g, make_initial_state(cfg, g));
    const Sums a = direct_sums(make_initial_state(cfg, g), g), b = direct_sums(r.final_state, g);
    const double dp = static_cast<double>(std::abs(b.p - a.p) / a.scale);
    ok = ok && r.final_state.time == 1.0 && dp <= kMomentumDriftTol;
    detail += "; random smooth t=1: momentum " + sci(dp);
  }
  return {ok, detail};
}

// 6. Fluid solver.
struct MmsError {
  double h, u;
};

MmsError mms_run(int nx) {
  const double gamma = 1.4, mu = 0.1, t_end = 0.2;
  const double kh = 0.5 * (gamma - 1.0), ku = 2.0 * gamma / (gamma - 1.0), pe = 2.0 / (gamma - 1.0);
  const PhaseGrid g = grid1(nx, 8.0, 8);
  const double dx = g.dx(0);
  const int steps = static_cast<int>(std::ceil(t_end / (0.5 * dx * dx)));
  const double dt = t_end / steps;
  auto he = [](double x, double t) { return 0.1 * std::sin(kTwoPi * x + t); };
  auto ue = [](double x, double t) { return 0.2 * std::cos(kTwoPi * x - t); };
  auto hc = [](double x, double t) { return 0.05 * std::cos(kTwoPi * x) * (1.0 + t); };
  auto uc = [](double x, double t) { return 0.3 + 0.1 * std::sin(kTwoPi * x + 2.0 * t); };
  auto F = [](double x) { return 0.1 * std::sin(kTwoPi * x); };
  const std::size_t n = g.n_space();
  auto fill = [&](double t, std::vector<double>& ch, std::vector<double>& cu, std::vector<double>& Sh,
                  std::vector<double>& Su) {
    ch.resize(n), cu.resize(n), Sh.resize(n), Su.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
      const double x = g.x(0, s);
      ch[s] = hc(x, t);
      cu[s] = uc(x, t);
      const double h_t = 0.1 * std::cos(kTwoPi * x + t), h_x = 0.1 * kTwoPi * std::cos(kTwoPi * x + t);
      const double u_t = 0.2 * std::sin(kTwoPi * x - t), u_x = -0.2 * kTwoPi * std::sin(kTwoPi * x - t);
      const double u_xx = -0.2 * kTwoPi * kTwoPi * std::cos(kTwoPi * x - t);
      Sh[s] = h_t + cu[s] * h_x + kh * (1.0 + ch[s]) * u_x;
      Su[s] = u_t + cu[s] * u_x + ku * (1.0 + ch[s]) * h_x - mu * u_xx / std::pow(1.0 + ch[s], pe) + F(x);
    }
  };
  FluidStepInputs in;
  in.gamma = gamma;
  in.mu = mu;
  in.dt = dt;
  in.h.resize(n), in.u.resize(n), in.F0.resize(n);
  for (std::size_t s = 0; s < n; ++s) in.h[s] = he(g.x(0, s), 0.0), in.u[s] = ue(g.x(0, s), 0.0), in.F0[s] = F(g.x(0, s));
  for (int k = 0; k < steps; ++k) {
    fill(k * dt, in.hc0, in.uc0, in.Sh0, in.Su0);
    fill((k + 1) * dt, in.hc1, in.uc1, in.Sh1, in.Su1);
    const FluidStepResult r = fluid_step(in, g);
    in.h = r.h;
    in.u = r.u;
  }
  MmsError e{0.0, 0.0};
  for (std::size_t s = 0; s < n; ++s) {
    e.h = std::max(e.h, std::abs(in.h[s] - he(g.x(0, s), t_end)));
    e.u = std::max(e.u, std::abs(in.u[s] - ue(g.x(0, s), t_end)));
  }
  return e;
}

Outcome fluid_solver() {
  const MmsError e32 = mms_run(32), e64 = mms_run(64);
  const double oh = std::log2(e32.h / e64.h), ou = std::log2(e32.u / e64.u);

  // shear wave u = (A sin(2 pi y / L), 0) in the coupled-run fluid solver
  GridSpec s;
  s.dim = 2;
  s.cells = {32, 32, 1};
  s.vcells = {8, 8, 8};
  const PhaseGrid g = build_phase_grid(s);
  FluidParams p;
  p.mu = 0.05;
  const double rate = p.mu * kTwoPi * kTwoPi;
  const double t_end = 1.0 / rate;
  const int steps = 400;
  std::vector<double> u(g.n_space() * 2, 0.0);
  for (std::size_t i = 0; i < g.n_space(); ++i) u[i * 2] = 1e-3 * std::sin(kTwoPi * g.x(1, g.space_index(i)[1]));
  FluidState fl = FluidState::from_density(std::vector<double>(g.n_space(), 1.0), u, p.gamma);
  for (int n = 0; n < steps; ++n) fl = compressible_step(fl, {}, g, p, t_end / steps);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) num += fl.u[i] * u[i], den += u[i] * u[i];
  const double measured = -std::log(num / den) / t_end;
  const double rel = std::abs(measured / rate - 1.0);
  return {oh >= kMmsOrder && ou >= kMmsOrder && rel <= kViscousRateTol,
          "MMS order h " + fmt("%.3f", oh) + ", u " + fmt("%.3f", ou) + "; shear decay rate " + fmt("%.4f", measured) +
              " vs " + fmt("%.4f", rate) + " (" + fmt("%.2f%%", 100.0 * rel) + ")"};
}

// 7. Picard contraction.
Outcome picard() {
  const SimConfig cfg = load("small_data.ini");
  const PhaseGrid g = make_grid(cfg);
  const SystemState init = make_initial_state(cfg, g);
  bool ok = true;
  std::string detail;
  std::vector<std::vector<double>> ratios;
  for (double T : {0.1, 0.2, 0.4, 0.8}) {
    const PicardResult r = picard_solve(cfg, g, init, T, kPicardIters, kPicardTol);
    std::vector<double> rs;
    for (const auto& it : r.trace.iterates) rs.push_back(it.ratio);
    ratios.push_back(rs);
    if (T == 0.1) {
      bool zero = true, contract = true;
      for (const auto& it : r.trace.iterates) {
        zero = zero && it.E.front() == 0.0;
        if (it.n >= 2) contract = contract && it.ratio <= kContraction;
      }
      const bool conv = r.trace.converged && r.trace.iterates.back().sup_E <= kPicardTol;
      ok = ok && zero && contract && conv;
      detail += "T=0.1: E(0)=0 " + std::string(zero ? "yes" : "no") + ", " + std::to_string(r.trace.iterates.size()) +
                " iterates, sup E " + sci(r.trace.iterates.back().sup_E) + ", max r(n>=2) ";
      double rmax = 0.0;
      for (std::size_t i = 1; i < rs.size(); ++i) rmax = std::max(rmax, rs[i]);
      detail += fmt("%.4f", rmax);
    }
  }
  bool mono = true;
  detail += "; r^2 over T=0.1..0.8:";
  for (std::size_t n = 1; n <= 2; ++n)
    for (std::size_t k = 0; k < ratios.size(); ++k) {
      if (ratios[k].size() <= n) {
        mono = false;
        continue;
      }
      if (n == 1) detail += " " + fmt("%.4f", ratios[k][n]);
      if (k > 0 && ratios[k - 1].size() > n && !(ratios[k][n] > ratios[k - 1][n])) mono = false;
    }
  detail += mono ? " (r^2, r^3 increasing)" : " (not monotone)";
  return {ok && mono, detail};
}

// 8. Modulated-energy decay.
Outcome decay() {
  const SimConfig cfg = load("decay.json");
  const PhaseGrid g = make_grid(cfg);
  const SimulationResult r = run_simulation(cfg, g, make_initial_state(cfg, g));
  std::vector<double> t, logL;
  int warned = 0;
  for (const auto& row : r.rows) {
    if (row.L > 0.0) t.push_back(row.t), logL.push_back(std::log(row.L));
    warned += row.monitor != MonitorStatus::ok;
  }
  double slope, icpt;
  oracle::linear_fit(t, logL, slope, icpt);
  double ss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) ss += std::pow(logL[i] - icpt - slope * t[i], 2);
  const double resid = std::sqrt(ss / t.size());
  std::vector<double> tt, LL;
  for (const auto& row : r.rows) tt.push_back(row.t), LL.push_back(row.L);
  const DecayFit lib = decay_fit(tt, LL);
  const double drop = r.rows.front().L / r.rows.back().L;
  const bool agree = std::abs(lib.rate + slope) <= 1e-8 * std::abs(slope);
  return {drop >= kDecayDrop && resid <= kDecayResidual && -slope > 0.0 && agree,
          "L drop " + fmt("%.1f", drop) + "x over t=" + fmt("%g", cfg.t_final) + ", rate " + fmt("%.4f", -slope) +
              ", log-fit residual " + fmt("%.4f", resid) + ", monitor warnings " + std::to_string(warned)};
}

// 9. Norm identities.
Outcome norms() {
  const PhaseGrid g = grid1(32, 6.0, 32);
  const double k = 1.5;
  std::vector<double> w(g.size());
  for (std::size_t s = 0; s < g.n_space(); ++s)
    for (std::size_t j = 0; j < g.n_vel(); ++j) {
      const double v = g.vel(j, 0);
      w[s * g.n_vel() + j] = 0.7 * std::exp(-std::pow(1.0 + v * v, 0.5 * k));
    }
  const double vol = g.period(0) * 2.0 * g.vmax(0);
  const double c1 = std::abs(weighted_lp_norm(w, g, 1, k) / (0.7 * vol) - 1.0);
  const double c2 = std::abs(weighted_lp_norm(w, g, 2, k) / (0.7 * std::sqrt(vol)) - 1.0);
  const double cs = std::abs(weighted_sup_norm(w, g, k) / 0.7 - 1.0);
  const bool cancel = c1 <= kNormSlack && c2 <= kNormSlack && cs <= kNormSlack;

  std::vector<std::function<double(const std::vector<double>&)>> ns = {
      [&](const std::vector<double>& f) { return weighted_lp_norm(f, g, 1, k); },
      [&](const std::vector<double>& f) { return weighted_lp_norm(f, g, 2, k); },
      [&](const std::vector<double>& f) { return weighted_sup_norm(f, g, k); },
      [&](const std::vector<double>& f) { return weighted_sobolev_norm(f, g, 1, k); },
      [&](const std::vector<double>& f) { return weighted_sobolev_norm(f, g, 2, k); },
      [&](const std::vector<double>& f) { return weighted_w1inf_norm(f, g, k); }};
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> C(-5.0, 5.0);
  double tri = 0.0, hom = 0.0, mono = 0.0;
  for (int pair = 0; pair < 200; ++pair) {
    const auto a = random_field(g, rng, k), b = random_field(g, rng, k);
    const double c = C(rng);
    std::vector<double> sum(g.size()), sc(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) sum[i] = a[i] + b[i], sc[i] = c * a[i];
    for (const auto& n : ns) {
      const double na = n(a), nb = n(b);
      tri = std::max(tri, (n(sum) - na - nb) / (na + nb));
      hom = std::max(hom, std::abs(n(sc) - std::abs(c) * na) / (std::abs(c) * na));
    }
    const double s0 = weighted_sobolev_norm(a, g, 0, k), s1 = weighted_sobolev_norm(a, g, 1, k),
                 s2 = weighted_sobolev_norm(a, g, 2, k);
    mono = std::max({mono, (s0 - s1) / s1, (s1 - s2) / s2});
  }
  return {cancel && tri <= kNormSlack && hom <= kNormSlack && mono <= kNormSlack,
          "weight cancellation " + sci(std::max({c1, c2, cs})) + ", triangle excess " + sci(tri) + ", homogeneity " +
              sci(hom) + ", s-monotonicity " + sci(mono) + " (200 pairs)"};
}

// 10. Determinism and snapshot round trip.
Outcome determinism_io() {
  const SimConfig cfg = load("small_data.ini");
  const PhaseGrid g = make_grid(cfg);
  const SystemState init = make_initial_state(cfg, g);
  const SimulationResult a = run_simulation(cfg, g, init), b = run_simulation(cfg, g, init);
  const fs::path dir = fs::temp_directory_path() / "nsbgk_acceptance_io";
  fs::remove_all(dir);
  write_file(dir / "a.csv", diagnostics_csv(a.rows));
  write_file(dir / "b.csv", diagnostics_csv(b.rows));
  const bool same = read_file(dir / "a.csv") == read_file(dir / "b.csv");

  write_snapshot(dir / "snap", a.final_state, g, cfg, a.time_grid.steps);
  const Snapshot s = read_snapshot(dir / "snap");
  fs::remove_all(dir);
  const KineticState& f0 = a.final_state.f;
  const double k = cfg.k;
  std::vector<std::pair<double, double>> pairs = {
      {weighted_lp_norm(f0, g, 1, k), weighted_lp_norm(s.f, g, 1, k)},
      {weighted_lp_norm(f0, g, 2, k), weighted_lp_norm(s.f, g, 2, k)},
      {weighted_sup_norm(f0, g, k), weighted_sup_norm(s.f, g, k)},
      {weighted_sobolev_norm(f0, g, 2, k), weighted_sobolev_norm(s.f, g, 2, k)},
      {weighted_w1inf_norm(f0.f, g, k), weighted_w1inf_norm(s.f.f, g, k)},
      {fluid_energy_h3(a.final_state.fluid, g, cfg.gamma), fluid_energy_h3(s.fluid, g, cfg.gamma)},
      {modulated_energy(f0, a.final_state.fluid, g).L, modulated_energy(s.f, s.fluid, g).L}};
  double worst = 0.0;
  for (const auto& [x, y] : pairs) worst = std::max(worst, std::abs(x - y) / std::abs(x));
  return {same && worst <= kRoundTripTol,
          std::string(same ? "diagnostics CSV byte-identical" : "diagnostics CSV differs") + " (" +
              std::to_string(a.rows.size()) + " rows); snapshot norm drift " + sci(worst)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {{1, "BGK cancellation", bgk_cancellation},
                                      {2, "Maxwellian fixed point", maxwellian_fixed_point},
                                      {3, "rho_f / T_f inequality", rho_T_lemma},
                                      {4, "characteristics", characteristics},
                                      {5, "conservation", conservation},
                                      {6, "fluid solver", fluid_solver},
                                      {7, "Picard contraction", picard},
                                      {8, "modulated-energy decay", decay},
                                      {9, "norm suite", norms},
                                      {10, "determinism and I/O", determinism_io}};
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
