#pragma once
/// @file stepper.hpp
/// @brief Time marching of the coupled system and the Picard linearization with its Cauchy monitor.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "nsbgk/core.hpp"
#include "nsbgk/diagnostics.hpp"
#include "nsbgk/fluid.hpp"
#include "nsbgk/initial_data.hpp"
#include "nsbgk/maxwellian.hpp"
#include "nsbgk/moments.hpp"
#include "nsbgk/transport.hpp"

namespace nsbgk {

struct SystemState {
  KineticState f;
  FluidState fluid;
  MacroFields macro;  ///< moments of f
  double time = 0.0;

  void refresh(const PhaseGrid& g, const SimConfig& cfg) {
    macro = compute_moments(f, g, cfg.t_ref, cfg.moment_floor);
    f.time = time;
    fluid.time = time;
  }
};

inline SystemState make_state(KineticState f, FluidState fluid, const PhaseGrid& g, const SimConfig& cfg,
                              double t = 0.0) {
  SystemState st{std::move(f), std::move(fluid), {}, t};
  st.refresh(g, cfg);
  return st;
}

/// Initial state from the config's init block; particles start as discrete Maxwellians.
inline SystemState make_initial_state(const SimConfig& cfg, const PhaseGrid& g) {
  const InitialProfiles p = initial_profiles(cfg, g);
  MaxwellianParams mp{p.rho_f, p.u_f, p.T_f};
  KineticState f(discrete_maxwellian(mp, g), 0.0);
  FluidState fl = FluidState::from_density(p.rho, p.u, cfg.gamma);
  return make_state(std::move(f), std::move(fl), g, cfg);
}

/// Largest dt admitted by both the kinetic and the fluid CFL conditions.
inline double coupled_dt_limit(const SystemState& st, const PhaseGrid& g, const SimConfig& cfg) {
  return std::min(kinetic_dt_limit(g, st.fluid.rho, st.fluid.u, cfg.cfl),
                  fluid_dt_limit(g, st.fluid.rho, st.fluid.u, FluidParams::from(cfg)));
}

/// Uniform step count and size covering [0, horizon]. An explicit cfg.dt is rounded down to fit.
struct TimeGrid {
  double dt = 0.0;
  long steps = 0;
};

inline TimeGrid plan_steps(const SystemState& init, const PhaseGrid& g, const SimConfig& cfg, double horizon) {
  TimeGrid tg;
  if (horizon <= 0.0) return tg;
  const double raw = cfg.dt > 0.0 ? cfg.dt : coupled_dt_limit(init, g, cfg);
  if (!(raw > 0.0) || !std::isfinite(raw)) throw RuntimeAbort("no admissible time step for the initial state");
  tg.steps = std::max(1L, static_cast<long>(std::ceil(horizon / raw - 1e-9)));
  tg.dt = horizon / static_cast<double>(tg.steps);
  return tg;
}

/// Momentum density added to the fluid over one step. The drag part is -dt rho F; a correction
/// proportional to rho rho_f makes the fluid gain exactly the momentum the particles lose.
inline std::vector<double> drag_momentum_source(const FluidState& fl, const MacroFields& macro,
                                                std::span<const double> F, const std::array<double, 3>& dP_particles,
                                                double dt, const PhaseGrid& g) {
  const int d = g.dim();
  const std::size_t ns = g.n_space();
  std::vector<double> S(ns * d);
  std::array<double, 3> tot{};
  double wsum = 0.0;
  for (std::size_t s = 0; s < ns; ++s) {
    for (int a = 0; a < d; ++a) {
      S[s * d + a] = -dt * fl.rho[s] * F[s * d + a];
      tot[a] += S[s * d + a];
    }
    wsum += fl.rho[s] * macro.rho[s];
  }
  if (wsum > 0.0) {
    const double dV = g.cell_volume();
    for (int a = 0; a < d; ++a) {
      const double c = (-dP_particles[a] - tot[a] * dV) / (wsum * dV);
      for (std::size_t s = 0; s < ns; ++s) S[s * d + a] += c * fl.rho[s] * macro.rho[s];
    }
  }
  return S;
}

inline std::array<double, 3> particle_momentum(const KineticState& ks, const PhaseGrid& g) {
  const int d = g.dim();
  const std::size_t nv = g.n_vel();
  std::array<double, 3> p{};
  for (int a = 0; a < d; ++a) {
    std::vector<double> part(g.n_space());
    for (std::size_t s = 0; s < g.n_space(); ++s) {
      double acc = 0.0;
      for (std::size_t j = 0; j < nv; ++j) acc += g.vel(j, a) * ks.f[s * nv + j] * g.vel_weight(j);
      part[s] = acc;
    }
    p[a] = num::pairwise_sum(part) * g.cell_volume();
  }
  return p;
}

/// One step: moments and drag of the current state, kinetic step with frozen (rho, u),
/// fluid step with the drag source, cache refresh.
inline SystemState coupled_step(const SystemState& st, double dt, const PhaseGrid& g, const SimConfig& cfg) {
  const bool particles = std::any_of(st.f.f.begin(), st.f.f.end(), [](double x) { return x != 0.0; });
  const FluidParams fp = FluidParams::from(cfg);
  SystemState out;
  out.time = st.time + dt;
  if (!particles) {
    out.f = KineticState(g, out.time);
    out.fluid = compressible_step(st.fluid, {}, g, fp, dt);
  } else {
    const BgkData bgk = bgk_operator(st.f, g, BgkSettings::from(cfg));
    const std::vector<double> F = coupling_force_density(st.f, st.fluid.u, g);
    out.f = kinetic_step(st.f, make_coefficients(st.fluid.rho, st.fluid.u, bgk, g), dt, g,
                         KineticStepOptions{cfg.cfl, cfg.mass_fix, true});
    const auto p0 = particle_momentum(st.f, g), p1 = particle_momentum(out.f, g);
    std::array<double, 3> dP{};
    for (int a = 0; a < 3; ++a) dP[a] = p1[a] - p0[a];
    const std::vector<double> S = drag_momentum_source(st.fluid, bgk.macro, F, dP, dt, g);
    out.fluid = compressible_step(st.fluid, S, g, fp, dt);
  }
  out.refresh(g, cfg);
  return out;
}

// ---------------------------------------------------------------------------
// Time marching.

/// Raised when a run stops early; carries the last good state for dumping.
class SimulationAbort : public RuntimeAbort {
 public:
  SimulationAbort(const std::string& what, SystemState last, long step, std::vector<DiagnosticsRow> rows = {})
      : RuntimeAbort(what), last_(std::move(last)), step_(step), rows_(std::move(rows)) {}
  const SystemState& last() const { return last_; }
  long step() const { return step_; }
  /// Diagnostics rows up to and including the last good step.
  const std::vector<DiagnosticsRow>& rows() const { return rows_; }

 private:
  SystemState last_;
  long step_;
  std::vector<DiagnosticsRow> rows_;
};

struct SimulationResult {
  SystemState final_state;
  std::vector<DiagnosticsRow> rows;
  std::vector<double> snapshot_times;
  TimeGrid time_grid;
};

using SnapshotSink = std::function<void(const SystemState&, long step)>;

/// Steps from init.time to cfg.t_final. Emits a diagnostics row per step (including step 0) and a snapshot at
/// step 0, every cfg.snapshot_every steps and at the end.
inline SimulationResult run_simulation(const SimConfig& cfg, const PhaseGrid& g, const SystemState& init,
                                       const SnapshotSink& sink = {}) {
  cfg.validate();
  SimulationResult res;
  if (init.time > cfg.t_final) throw ValidationError("initial time lies beyond t_final");
  res.time_grid = plan_steps(init, g, cfg, cfg.t_final - init.time);
  const Totals ref = conservation_totals(init.f, init.fluid, g);
  SystemState st = init;
  auto emit = [&](long n) {
    res.snapshot_times.push_back(st.time);
    if (sink) sink(st, n);
  };
  res.rows.push_back(compute_diagnostics(st.f, st.fluid, g, cfg, ref, 0));
  emit(0);
  for (long n = 1; n <= res.time_grid.steps; ++n) {
    try {
      const double lim = coupled_dt_limit(st, g, cfg);
      if (res.time_grid.dt > lim * (1.0 + 1e-12))
        throw RuntimeAbort("CFL violated at t = " + std::to_string(st.time) + ": dt = " +
                           std::to_string(res.time_grid.dt) + " exceeds " + std::to_string(lim));
      SystemState next = coupled_step(st, res.time_grid.dt, g, cfg);
      next.time = n == res.time_grid.steps ? cfg.t_final : init.time + static_cast<double>(n) * res.time_grid.dt;
      next.f.time = next.fluid.time = next.time;
      const MonitorReport mon = positivity_monitor(next.f, next.fluid, g, cfg);
      if (mon.status == MonitorStatus::violated) throw RuntimeAbort("positivity monitor: " + mon.message);
      st = std::move(next);
    } catch (const SimulationAbort&) {
      throw;
    } catch (const RuntimeAbort& e) {
      throw SimulationAbort(std::string(e.what()) + " (step " + std::to_string(n) + ")", st, n - 1, res.rows);
    }
    res.rows.push_back(compute_diagnostics(st.f, st.fluid, g, cfg, ref, n));
    if ((cfg.snapshot_every > 0 && n % cfg.snapshot_every == 0) || n == res.time_grid.steps) emit(n);
  }
  res.final_state = std::move(st);
  return res;
}

// ---------------------------------------------------------------------------
// Picard iteration.

/// States of one iterate at the shared time samples.
struct Trajectory {
  std::vector<double> times;
  std::vector<KineticState> f;
  std::vector<FluidState> fluid;

  std::size_t size() const { return times.size(); }
  std::size_t bytes() const {
    std::size_t b = 0;
    for (const auto& k : f) b += k.f.size() * sizeof(double);
    for (const auto& q : fluid) b += (q.rho.size() + q.h.size() + q.u.size()) * sizeof(double);
    return b;
  }
};

struct CauchyValue {
  double E = 0.0, D = 0.0;
  double E_f = 0.0, E_h = 0.0, E_u = 0.0;
};

/// E = ||f_a - f_b||^2_{L^2_{k-eps}} + ||h_a - h_b||^2_{H^1} + ||u_a - u_b||^2_{H^1},
/// D = (c mu / 2) ||grad(u_a - u_b)||^2_{H^1}.
inline CauchyValue cauchy_terms(const KineticState& fa, const FluidState& la, const KineticState& fb,
                                const FluidState& lb, const PhaseGrid& g, const SimConfig& cfg) {
  if (fa.f.size() != g.size() || fb.f.size() != g.size() || la.h.size() != g.n_space() ||
      lb.h.size() != g.n_space() || la.u.size() != lb.u.size())
    throw ValidationError("cauchy_functional: iterates do not share the grid");
  const int d = g.dim();
  CauchyValue c;
  std::vector<double> df(g.size()), dh(g.n_space()), du(g.n_space() * d);
  for (std::size_t i = 0; i < df.size(); ++i) df[i] = fa.f[i] - fb.f[i];
  for (std::size_t i = 0; i < dh.size(); ++i) dh[i] = la.h[i] - lb.h[i];
  for (std::size_t i = 0; i < du.size(); ++i) du[i] = la.u[i] - lb.u[i];
  const double nf = weighted_lp_norm(df, g, 2, cfg.k - cfg.epsilon);
  c.E_f = nf * nf;
  c.E_h = sobolev_sq(g, dh, 1);
  c.E_u = sobolev_sq_vector(g, du, 1);
  c.E = c.E_f + c.E_h + c.E_u;
  double grad = 0.0;
  for (int b = 0; b < d; ++b)
    for (int a = 0; a < d; ++a) {
      std::array<int, 3> e{0, 0, 0};
      e[a] = 1;
      grad += sobolev_sq(g, spatial_derivative(g, du, e, d, b), 1);
    }
  c.D = 0.5 * cfg.cauchy_c * cfg.mu * grad;
  return c;
}

/// Cauchy functional between two iterates at time sample `index`.
inline CauchyValue cauchy_functional(const Trajectory& a, const Trajectory& b, std::size_t index, const PhaseGrid& g,
                                     const SimConfig& cfg) {
  if (a.size() != b.size() || index >= a.size())
    throw ValidationError("cauchy_functional: trajectories do not share time samples");
  if (a.times[index] != b.times[index]) throw ValidationError("cauchy_functional: time samples differ");
  return cauchy_terms(a.f[index], a.fluid[index], b.f[index], b.fluid[index], g, cfg);
}

struct IterateRecord {
  int n = 0;                  ///< the iterate compared with its predecessor
  std::vector<double> E, D;   ///< per time sample
  double sup_E = 0.0;
  double ratio = std::numeric_limits<double>::quiet_NaN();  ///< sup E^n / sup E^{n-1}
};

struct IterationTrace {
  std::vector<double> times;
  std::vector<IterateRecord> iterates;
  bool converged = false;
  bool non_contraction = false;
  std::string report;          ///< human-readable notes (non-contraction, memory warnings)
  double peak_memory_mb = 0.0;
};

struct PicardResult {
  Trajectory iterate;  ///< last computed iterate
  IterationTrace trace;
};

/// Appends an iterate record, filling its contraction ratio and flagging three consecutive
/// ratios >= 1 as non-contraction.
inline void record_iterate(IterationTrace& tr, IterateRecord rec) {
  if (!tr.iterates.empty()) {
    const double last = tr.iterates.back().sup_E;
    rec.ratio = last > 0.0 ? rec.sup_E / last : (rec.sup_E > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    int run = 0;
    for (std::size_t i = tr.iterates.size(); i-- > 1 && tr.iterates[i].ratio >= 1.0;) ++run;
    if (rec.ratio >= 1.0 && run + 1 >= 3 && !tr.non_contraction) {
      tr.non_contraction = true;
      tr.report += "non-contraction: ratio >= 1 for 3 consecutive iterates ending at n = " + std::to_string(rec.n) + "\n";
    }
  }
  tr.iterates.push_back(std::move(rec));
}

/// Iterate 0: the initial data frozen in time.
inline Trajectory frozen_trajectory(const SystemState& init, const std::vector<double>& times) {
  Trajectory t;
  t.times = times;
  for (double tt : times) {
    KineticState f = init.f;
    f.time = tt;
    FluidState fl = init.fluid;
    fl.time = tt;
    t.f.push_back(std::move(f));
    t.fluid.push_back(std::move(fl));
  }
  return t;
}

/// Solves the three linear problems of one Picard sweep on the shared time grid, with every
/// coefficient read from the previous iterate.
inline Trajectory picard_sweep(const Trajectory& prev, const SystemState& init, const PhaseGrid& g,
                               const SimConfig& cfg) {
  const std::size_t N = prev.size();
  Trajectory next;
  next.times = prev.times;
  next.f.reserve(N);
  next.fluid.reserve(N);
  next.f.push_back(init.f);
  next.fluid.push_back(init.fluid);
  next.f.back().time = next.fluid.back().time = prev.times[0];
  const BgkSettings bs = BgkSettings::from(cfg);
  std::vector<double> F_here = coupling_force_density(prev.f[0], prev.fluid[0].u, g);
  for (std::size_t k = 0; k + 1 < N; ++k) {
    const double dt = prev.times[k + 1] - prev.times[k];
    const BgkData bgk = bgk_operator(prev.f[k], g, bs);
    KineticState fk = kinetic_step(next.f[k], make_coefficients(prev.fluid[k].rho, prev.fluid[k].u, bgk, g), dt, g,
                                   KineticStepOptions{cfg.cfl, false, true});
    fk.time = prev.times[k + 1];

    std::vector<double> F_next = coupling_force_density(prev.f[k + 1], prev.fluid[k + 1].u, g);
    FluidStepInputs in;
    in.h = next.fluid[k].h;
    in.u = next.fluid[k].u;
    in.hc0 = prev.fluid[k].h;
    in.uc0 = prev.fluid[k].u;
    in.hc1 = prev.fluid[k + 1].h;
    in.uc1 = prev.fluid[k + 1].u;
    in.F0 = F_here;
    in.F1 = F_next;
    in.gamma = cfg.gamma;
    in.mu = cfg.mu;
    in.dt = dt;
    in.delta = cfg.delta;
    in.cfl = cfg.cfl;
    in.implicit_viscosity = cfg.implicit_viscosity;
    in.cg_tol = cfg.cg_tol;
    const FluidStepResult r = fluid_step(in, g);
    next.f.push_back(std::move(fk));
    next.fluid.push_back(FluidState::from_symmetrized(r.h, r.u, cfg.gamma, prev.times[k + 1]));
    F_here = std::move(F_next);
  }
  return next;
}

/// Picard iteration on [0, horizon]. Stops when sup_t E^{n} < tol or after n_max sweeps.
inline PicardResult picard_solve(const SimConfig& cfg, const PhaseGrid& g, const SystemState& init, double horizon,
                                 int n_max, double tol) {
  cfg.validate();
  if (!(horizon > 0.0)) throw ValidationError("picard horizon must be > 0");
  if (n_max < 1) throw ValidationError("picard max iterations must be >= 1");
  const TimeGrid tg = plan_steps(init, g, cfg, horizon);
  std::vector<double> times(tg.steps + 1);
  for (long k = 0; k <= tg.steps; ++k) times[k] = k == tg.steps ? horizon : static_cast<double>(k) * tg.dt;

  PicardResult res;
  res.trace.times = times;
  Trajectory prev = frozen_trajectory(init, times);
  for (int n = 1; n <= n_max; ++n) {
    Trajectory next = picard_sweep(prev, init, g, cfg);
    const double mb = static_cast<double>(prev.bytes() + next.bytes()) / (1024.0 * 1024.0);
    res.trace.peak_memory_mb = std::max(res.trace.peak_memory_mb, mb);
    if (mb > cfg.memory_cap_mb && res.trace.report.find("memory") == std::string::npos)
      res.trace.report += "warning: stored trajectories use " + std::to_string(mb) + " MB, above memory_cap_mb\n";

    IterateRecord rec;
    rec.n = n;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const CauchyValue c = cauchy_functional(next, prev, k, g, cfg);
      rec.E.push_back(c.E);
      rec.D.push_back(c.D);
      rec.sup_E = std::max(rec.sup_E, c.E);
    }
    record_iterate(res.trace, std::move(rec));
    prev = std::move(next);
    if (res.trace.iterates.back().sup_E < tol) {
      res.trace.converged = true;
      break;
    }
  }
  res.iterate = std::move(prev);
  return res;
}

}  // namespace nsbgk
