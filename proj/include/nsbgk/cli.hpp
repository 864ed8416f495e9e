#pragma once
/// @file cli.hpp
/// @brief Command-line front end: run, iterate, diagnose, decay and check.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nsbgk/io.hpp"

namespace nsbgk::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kRuntime = 2 };

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", x);
  return buf;
}

inline std::string step_dir(long n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "step_%08ld", n);
  return buf;
}

inline PhaseGrid check_grid(double vmax, int nv, int nx = 8) {
  GridSpec s;
  s.dim = 1;
  s.cells = {nx, 1, 1};
  s.vmax = {vmax, 1.0, 1.0};
  s.vcells = {nv, 8, 8};
  return build_phase_grid(s);
}

/// Nonnegative two-bump mixture with multiplicative noise at every node.
inline KineticState random_f(const PhaseGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  KineticState ks(g);
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    double rho[2], u[2], T[2];
    for (int b = 0; b < 2; ++b) rho[b] = 0.2 + U(rng), u[b] = -1.5 + 3.0 * U(rng), T[b] = 0.3 + 1.2 * U(rng);
    for (std::size_t j = 0; j < g.n_vel(); ++j) {
      double val = 0.0;
      for (int b = 0; b < 2; ++b) {
        const double c = g.vel(j, 0) - u[b];
        val += rho[b] * std::exp(-c * c / (2.0 * T[b])) / std::sqrt(2.0 * std::numbers::pi * T[b]);
      }
      ks.f[s * g.n_vel() + j] = val * (0.5 + U(rng));
    }
  }
  return ks;
}

}  // namespace detail

/// Built-in invariant suite on seeded random inputs.
inline std::vector<CheckLine> run_invariant_checks(std::uint64_t seed, int count) {
  std::vector<CheckLine> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);

  {  // collision invariants of Q
    const PhaseGrid g = detail::check_grid(8.0, 64);
    double worst = 0.0;
    for (int t = 0; t < count; ++t) {
      const KineticState ks = detail::random_f(g, rng);
      const BgkData b = bgk_operator(ks, g, 1.0);
      double fmax = 0.0;
      for (double x : ks.f) fmax = std::max(fmax, std::abs(x));
      const double scale = fmax * g.vmax(0) * g.vmax(0);
      for (std::size_t s = 0; s < g.n_space(); ++s) {
        double m[3] = {0.0, 0.0, 0.0};
        for (std::size_t j = 0; j < g.n_vel(); ++j) {
          const double q = b.Q[s * g.n_vel() + j] * g.vel_weight(j);
          m[0] += q, m[1] += q * g.vel(j, 0), m[2] += q * g.vel_norm2(j);
        }
        for (double x : m) worst = std::max(worst, std::abs(x) / scale);
      }
    }
    out.push_back({"bgk_cancellation", worst <= 1e-12, "max scaled moment of Q " + detail::sci(worst)});
  }

  {  // Maxwellian is a fixed point of Q
    const PhaseGrid g = detail::check_grid(16.0, 128, 4);
    double worst = 0.0;
    for (int t = 0; t < count; ++t) {
      const double rho = 0.5 + 2.5 * U(rng), T = 0.3 + 2.7 * U(rng);
      const double u[1] = {-2.0 + 4.0 * U(rng)};
      const KineticState ks(discrete_maxwellian(MaxwellianParams::uniform(g, rho, u, T), g), 0.0);
      for (double q : bgk_operator(ks, g, 1.0).Q) worst = std::max(worst, std::abs(q));
    }
    out.push_back({"maxwellian_fixed_point", worst <= 1e-12, "max |Q(M)| " + detail::sci(worst)});
  }

  {  // norm identities
    const PhaseGrid g = detail::check_grid(6.0, 32, 16);
    const double k = 1.5;
    std::vector<std::function<double(std::span<const double>)>> norms = {
        [&](std::span<const double> f) { return weighted_lp_norm(f, g, 1, k); },
        [&](std::span<const double> f) { return weighted_lp_norm(f, g, 2, k); },
        [&](std::span<const double> f) { return weighted_sup_norm(f, g, k); },
        [&](std::span<const double> f) { return weighted_sobolev_norm(f, g, 1, k); },
        [&](std::span<const double> f) { return weighted_sobolev_norm(f, g, 2, k); },
        [&](std::span<const double> f) { return weighted_w1inf_norm(f, g, k); }};
    double tri = 0.0, hom = 0.0, mono = 0.0;
    for (int t = 0; t < count; ++t) {
      const KineticState a = detail::random_f(g, rng), b = detail::random_f(g, rng);
      std::vector<double> sum(g.size()), sc(g.size());
      const double c = -3.0 + 6.0 * U(rng);
      for (std::size_t i = 0; i < g.size(); ++i) sum[i] = a.f[i] - b.f[i], sc[i] = c * a.f[i];
      for (const auto& n : norms) {
        const double na = n(a.f), nb = n(b.f);
        tri = std::max(tri, (n(sum) - na - nb) / (na + nb));
        hom = std::max(hom, std::abs(n(sc) - std::abs(c) * na) / (std::abs(c) * na));
      }
      const double s0 = weighted_sobolev_norm(a.f, g, 0, k), s1 = weighted_sobolev_norm(a.f, g, 1, k),
                   s2 = weighted_sobolev_norm(a.f, g, 2, k);
      mono = std::max({mono, (s0 - s1) / s1, (s1 - s2) / s2});
    }
    out.push_back({"norm_triangle", tri <= 1e-12, "worst excess " + detail::sci(tri)});
    out.push_back({"norm_homogeneity", hom <= 1e-12, "worst relative defect " + detail::sci(hom)});
    out.push_back({"norm_s_monotone", mono <= 1e-12, "worst relative defect " + detail::sci(mono)});
  }

  {  // conservation and determinism of a short coupled run
    SimConfig cfg;
    cfg.grid = detail::check_grid(8.0, 32, 16).spec();
    cfg.init = "random_smooth";
    cfg.amp_rho = cfg.amp_u = cfg.amp_T = 0.3;
    cfg.amp_f = cfg.amp_uf = 0.5;
    cfg.init_mode = 2;
    cfg.seed = seed;
    cfg.t_final = 0.1;
    const PhaseGrid g = make_grid(cfg);
    const SystemState init = make_initial_state(cfg, g);
    const SimulationResult a = run_simulation(cfg, g, init), b = run_simulation(cfg, g, init);
    std::vector<Totals> traj;
    for (const auto& r : a.rows) traj.push_back(r.totals);
    const Drifts d = conservation_report(traj);
    out.push_back({"conservation_mass", d.particle_mass <= 1e-8 && d.fluid_mass <= 1e-8,
                   "particle " + detail::sci(d.particle_mass) + ", fluid " + detail::sci(d.fluid_mass)});
    out.push_back({"conservation_momentum", d.momentum <= 1e-6, "relative drift " + detail::sci(d.momentum)});
    out.push_back({"determinism", diagnostics_csv(a.rows) == diagnostics_csv(b.rows),
                   std::to_string(a.rows.size()) + " diagnostics rows compared"});

    const fs::path dir = fs::temp_directory_path() / ("nsbgk_check_" + std::to_string(seed));
    write_snapshot(dir, a.final_state, g, cfg, a.time_grid.steps);
    const Snapshot s = read_snapshot(dir);
    fs::remove_all(dir);
    const bool same = s.f.f == a.final_state.f.f && s.fluid.rho == a.final_state.fluid.rho &&
                      s.fluid.h == a.final_state.fluid.h && s.fluid.u == a.final_state.fluid.u;
    out.push_back({"snapshot_round_trip", same, same ? "bit-identical" : "arrays differ"});
  }
  return out;
}

namespace detail {

inline void dump_abort(const fs::path& out_dir, const SimulationAbort& e, const PhaseGrid& g, const SimConfig& cfg,
                       long step_offset, std::ostream& err) {
  const fs::path dir = out_dir / "abort";
  write_snapshot(dir, e.last(), g, cfg, step_offset + e.step());
  write_file(dir / "diagnostics.csv", diagnostics_csv(e.rows()));
  write_file(dir / "reason.txt", std::string(e.what()) + "\n");
  err << "runtime abort: " << e.what() << "\nlast good state written to " << dir.string() << "\n";
}

struct RunOptions {
  std::string config, out, resume;
  std::optional<int> snapshot_every;
  std::optional<double> t_final;
};

inline int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  if (o.config.empty() && o.resume.empty()) throw ValidationError("run needs --config or --resume");
  SimConfig cfg;
  SystemState init;
  long offset = 0;
  std::optional<PhaseGrid> grid;
  if (!o.resume.empty()) {
    const Snapshot s = read_snapshot(o.resume);
    cfg = o.config.empty() ? s.cfg : parse_config(o.config);
    if (o.t_final) cfg.t_final = *o.t_final;
    grid.emplace(make_grid(cfg));
    if (!grid->same_shape(make_grid(s.cfg)))
      throw ValidationError("resume: grid of the config does not match the snapshot in " + o.resume);
    init = make_state(s.f, s.fluid, *grid, cfg, s.time);
    offset = s.step;
  } else {
    cfg = parse_config(o.config);
    if (o.t_final) cfg.t_final = *o.t_final;
    grid.emplace(make_grid(cfg));
    init = make_initial_state(cfg, *grid);
  }
  if (o.snapshot_every) cfg.snapshot_every = *o.snapshot_every;
  cfg.validate();
  const PhaseGrid& g = *grid;
  const fs::path dir(o.out);
  fs::create_directories(dir);
  auto sink = [&](const SystemState& st, long n) {
    write_snapshot(dir / "snapshots" / step_dir(offset + n), st, g, cfg, offset + n);
  };
  try {
    SimulationResult r = run_simulation(cfg, g, init, sink);
    for (auto& row : r.rows) row.step += offset;
    write_file(dir / "diagnostics.csv", diagnostics_csv(r.rows));
    const auto& last = r.rows.back();
    out << "run: " << r.time_grid.steps << " steps of dt = " << sci(r.time_grid.dt) << " to t = "
        << format_double(r.final_state.time) << "\n"
        << "drift: particle mass " << sci(last.drift.particle_mass) << ", fluid mass "
        << sci(last.drift.fluid_mass) << ", momentum " << sci(last.drift.momentum) << "\n"
        << "wrote " << (dir / "diagnostics.csv").string() << " and " << r.snapshot_times.size()
        << " snapshot(s)\n";
  } catch (const SimulationAbort& e) {
    dump_abort(dir, e, g, cfg, offset, err);
    return kRuntime;
  }
  return kOk;
}

struct IterateOptions {
  std::string config, out;
  std::optional<double> horizon, tol;
  std::optional<int> max_iters;
};

inline int cmd_iterate(const IterateOptions& o, std::ostream& out, std::ostream&) {
  const SimConfig cfg = parse_config(o.config);
  const PhaseGrid g = make_grid(cfg);
  const double horizon = o.horizon.value_or(cfg.picard_horizon);
  const int n_max = o.max_iters.value_or(cfg.picard_max_iters);
  const double tol = o.tol.value_or(cfg.picard_tol);
  const PicardResult r = picard_solve(cfg, g, make_initial_state(cfg, g), horizon, n_max, tol);
  const fs::path dir(o.out);
  write_file(dir / "iteration_trace.csv", iteration_trace_csv(r.trace));
  write_file(dir / "cauchy_samples.csv", cauchy_samples_csv(r.trace));
  write_snapshot(dir / "final", r.iterate.f.back(), r.iterate.fluid.back(), g, cfg, r.iterate.times.back(),
                 static_cast<long>(r.iterate.size()) - 1);
  out << "iterate: horizon " << format_double(horizon) << ", " << r.trace.times.size() << " time samples\n";
  out << "  n        sup_E        r\n";
  for (const auto& it : r.trace.iterates) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%3d  %11.4e  %11.4e\n", it.n, it.sup_E, it.ratio);
    out << buf;
  }
  out << (r.trace.converged ? "converged" : "not converged") << " (tol " << sci(tol) << ")\n";
  if (!r.trace.report.empty()) out << r.trace.report << (r.trace.report.back() == '\n' ? "" : "\n");
  out << "wrote " << (dir / "iteration_trace.csv").string() << "\n";
  return kOk;
}

struct DiagnoseOptions {
  std::string snapshot, reference, out;
};

inline int cmd_diagnose(const DiagnoseOptions& o, std::ostream& out, std::ostream& err) {
  const Snapshot s = read_snapshot(o.snapshot);
  const PhaseGrid g = make_grid(s.cfg);
  Totals ref = conservation_totals(s.f, s.fluid, g);
  if (!o.reference.empty()) {
    const Snapshot r = read_snapshot(o.reference);
    if (!make_grid(r.cfg).same_shape(g))
      throw ValidationError("reference snapshot " + o.reference + " has a different grid");
    ref = conservation_totals(r.f, r.fluid, g);
  }
  const ValidationReport rep = validate_state(s.f, s.fluid, g, s.cfg);
  if (!rep.ok()) err << "warning: state checks failed\n" << rep.summary();
  const std::vector<DiagnosticsRow> rows = {compute_diagnostics(s.f, s.fluid, g, s.cfg, ref, s.step)};
  const std::string csv = diagnostics_csv(rows);
  if (o.out.empty()) {
    out << csv;
  } else {
    write_file(o.out, csv);
    out << "wrote " << o.out << "\n";
  }
  return kOk;
}

struct DecayOptions {
  std::string config, out;
  std::optional<double> t_final;
};

inline int cmd_decay(const DecayOptions& o, std::ostream& out, std::ostream& err) {
  SimConfig cfg = parse_config(o.config);
  if (o.t_final) cfg.t_final = *o.t_final;
  cfg.validate();
  const PhaseGrid g = make_grid(cfg);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  SimulationResult r;
  try {
    r = run_simulation(cfg, g, make_initial_state(cfg, g));
  } catch (const SimulationAbort& e) {
    dump_abort(dir, e, g, cfg, 0, err);
    return kRuntime;
  }
  write_file(dir / "diagnostics.csv", diagnostics_csv(r.rows));
  std::vector<double> t, L;
  long warned = 0;
  for (const auto& row : r.rows) {
    t.push_back(row.t);
    L.push_back(row.L);
    warned += row.monitor != MonitorStatus::ok;
  }
  const DecayFit fit = decay_fit(t, L);
  const double factor = L.front() / L.back();
  json j = {{"t_final", cfg.t_final},
            {"steps", r.time_grid.steps},
            {"L_initial", L.front()},
            {"L_final", L.back()},
            {"decrease_factor", factor},
            {"fit", {{"amplitude", fit.amplitude}, {"rate", fit.rate}, {"residual", fit.residual},
                     {"samples_used", fit.used}, {"samples_excluded", fit.excluded}}},
            {"monitor_warnings", warned},
            {"status", warned ? "reported only: monitors warned" : "monitors ok"}};
  write_file(dir / "decay.json", j.dump(2) + "\n");
  out << "decay: L " << sci(L.front()) << " -> " << sci(L.back()) << " (factor " << sci(factor) << ")\n"
      << "fit: L ~ " << sci(fit.amplitude) << " exp(-" << sci(fit.rate) << " t), residual " << sci(fit.residual)
      << "\n";
  if (warned) out << "note: positivity monitor warned on " << warned << " rows; decay is reported, not asserted\n";
  out << "wrote " << (dir / "decay.json").string() << "\n";
  return kOk;
}

inline int cmd_check(std::uint64_t seed, int count, std::ostream& out) {
  bool all = true;
  for (const auto& c : run_invariant_checks(seed, count)) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    all = all && c.pass;
  }
  return all ? kOk : kRuntime;
}

}  // namespace detail

/// Parses argv and runs one subcommand. Returns the process exit code.
inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Coupled Navier-Stokes / BGK solver with drag coupling", "nsbgk"};
  app.require_subcommand(1);

  detail::RunOptions ro;
  auto* run = app.add_subcommand("run", "Time-march a configuration and write diagnostics and snapshots");
  run->add_option("--config", ro.config, "Configuration file (flat JSON or key = value)");
  run->add_option("--out", ro.out, "Output directory")->required();
  run->add_option("--snapshot-every", ro.snapshot_every, "Snapshot interval in steps (0: first and last only)");
  run->add_option("--resume", ro.resume, "Snapshot directory to continue from");
  run->add_option("--t-final", ro.t_final, "Override the final time");

  detail::IterateOptions io;
  auto* iter = app.add_subcommand("iterate", "Run the Picard iteration and write its Cauchy trace");
  iter->add_option("--config", io.config, "Configuration file")->required();
  iter->add_option("--out", io.out, "Output directory")->required();
  iter->add_option("--horizon", io.horizon, "Time horizon T (default picard_horizon)");
  iter->add_option("--max-iters", io.max_iters, "Maximum number of iterates (default picard_max_iters)");
  iter->add_option("--tol", io.tol, "Stop when sup_t E^n falls below this (default picard_tol)");

  detail::DiagnoseOptions dg;
  auto* diag = app.add_subcommand("diagnose", "Recompute all diagnostics from a snapshot");
  diag->add_option("--snapshot", dg.snapshot, "Snapshot directory")->required();
  diag->add_option("--reference", dg.reference, "Snapshot used as the drift reference (default: itself)");
  diag->add_option("--out", dg.out, "CSV file to write (default: stdout)");

  detail::DecayOptions dc;
  auto* decay = app.add_subcommand("decay", "Long run of the modulated energy with an exponential fit");
  decay->add_option("--config", dc.config, "Configuration file")->required();
  decay->add_option("--out", dc.out, "Output directory")->required();
  decay->add_option("--t-final", dc.t_final, "Override the final time");

  std::uint64_t seed = 1;
  int count = 20;
  auto* check = app.add_subcommand("check", "Run the built-in invariant suite on random inputs");
  check->add_option("--seed", seed, "Random seed");
  check->add_option("--count", count, "Random samples per check")->check(CLI::Range(1, 100000));

  if (argc <= 1) {
    err << app.help();
    return kValidation;
  }
  const std::string first = argv[1];
  if (!first.empty() && first[0] != '-' && !app.get_subcommand_no_throw(first)) {
    err << "error: unknown subcommand '" << first << "'\n\n" << app.help();
    return kValidation;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    CLI::App* sub = nullptr;
    for (auto* s : {run, iter, diag, decay, check})
      if (s->parsed()) sub = s;
    err << (sub ? sub->help() : app.help());
    return kValidation;
  }

  try {
    if (run->parsed()) return detail::cmd_run(ro, out, err);
    if (iter->parsed()) return detail::cmd_iterate(io, out, err);
    if (diag->parsed()) return detail::cmd_diagnose(dg, out, err);
    if (decay->parsed()) return detail::cmd_decay(dc, out, err);
    if (check->parsed()) return detail::cmd_check(seed, count, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const RuntimeAbort& e) {
    err << "runtime abort: " << e.what() << "\n";
    return kRuntime;
  }
  err << app.help();
  return kValidation;
}

}  // namespace nsbgk::cli
