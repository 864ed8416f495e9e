#pragma once
/// @file core.hpp
/// @brief Phase-space grid, configuration, state containers and the velocity weight.
///
/// Layout conventions used throughout the library:
///  - spatial nodes are x_i = i * dx on a periodic box, flattened row-major (last axis fastest);
///  - velocity nodes are flattened row-major in the same way;
///  - a kinetic array is indexed [space * n_vel + vel];
///  - vector-valued spatial fields are interleaved [space * dim + component].

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsbgk {

/// Invalid input (configuration, shapes, files). Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A run can no longer continue (CFL, positivity, NaN, solver failure). Maps to CLI exit code 2.
class RuntimeAbort : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Quadrature { midpoint, trapezoid };

inline const char* to_string(Quadrature q) { return q == Quadrature::midpoint ? "midpoint" : "trapezoid"; }

/// Grid parameters as read from a configuration file.
struct GridSpec {
  int dim = 1;
  std::array<double, 3> period{1.0, 1.0, 1.0};
  std::array<int, 3> cells{64, 64, 64};
  std::array<double, 3> vmax{8.0, 8.0, 8.0};
  std::array<int, 3> vcells{64, 64, 64};
  Quadrature rule = Quadrature::midpoint;
};

/// Periodic spatial grid times a truncated, symmetric velocity grid.
class PhaseGrid {
public:
  static PhaseGrid build(const GridSpec& spec) {
    if (spec.dim < 1 || spec.dim > 3)
      throw ValidationError("dim must be 1, 2 or 3 (got " + std::to_string(spec.dim) + ")");
    PhaseGrid g;
    g.spec_ = spec;
    g.dim_ = spec.dim;
    g.n_space_ = 1;
    g.n_vel_ = 1;
    for (int a = 0; a < g.dim_; ++a) {
      if (spec.cells[a] < 4)
        throw ValidationError("spatial cells per axis must be >= 4 (axis " + std::to_string(a) + ")");
      if (!(spec.period[a] > 0.0) || !std::isfinite(spec.period[a]))
        throw ValidationError("period must be positive (axis " + std::to_string(a) + ")");
      if (!(spec.vmax[a] > 0.0) || !std::isfinite(spec.vmax[a]))
        throw ValidationError("vmax must be positive (axis " + std::to_string(a) + ")");
      if (spec.vcells[a] < 8)
        throw ValidationError("velocity cells per axis must be >= 8 (axis " + std::to_string(a) + ")");
      if (spec.vcells[a] % 2 != 0)
        throw ValidationError("velocity grid must be symmetric: velocity cells must be even (axis " +
                              std::to_string(a) + " has " + std::to_string(spec.vcells[a]) + ")");
      g.dx_[a] = spec.period[a] / spec.cells[a];
      g.dv_[a] = 2.0 * spec.vmax[a] / spec.vcells[a];
      g.nx_[a] = spec.cells[a];
      g.nv_[a] = spec.rule == Quadrature::midpoint ? spec.vcells[a] : spec.vcells[a] + 1;
      g.n_space_ *= static_cast<std::size_t>(g.nx_[a]);
      g.n_vel_ *= static_cast<std::size_t>(g.nv_[a]);

      g.xnodes_[a].resize(g.nx_[a]);
      for (int i = 0; i < g.nx_[a]; ++i) g.xnodes_[a][i] = i * g.dx_[a];

      // Nodes are built from the centre outwards so that v(-j) == -v(j) bit-exactly.
      const int n = g.nv_[a];
      g.vnodes_[a].resize(n);
      g.vweights_[a].assign(n, g.dv_[a]);
      if (spec.rule == Quadrature::midpoint) {
        for (int j = 0; j < n / 2; ++j) {
          const double v = (j + 0.5) * g.dv_[a];
          g.vnodes_[a][n / 2 + j] = v;
          g.vnodes_[a][n / 2 - 1 - j] = -v;
        }
      } else {
        const int c = n / 2;
        g.vnodes_[a][c] = 0.0;
        for (int j = 1; j <= c; ++j) {
          g.vnodes_[a][c + j] = j * g.dv_[a];
          g.vnodes_[a][c - j] = -j * g.dv_[a];
        }
        g.vweights_[a].front() *= 0.5;
        g.vweights_[a].back() *= 0.5;
      }
    }
    for (int a = g.dim_; a < 3; ++a) {
      g.nx_[a] = 1;
      g.nv_[a] = 1;
      g.dx_[a] = 1.0;
      g.dv_[a] = 1.0;
    }

    g.vel_coords_.resize(g.n_vel_ * g.dim_);
    g.vel_weights_.resize(g.n_vel_);
    for (std::size_t j = 0; j < g.n_vel_; ++j) {
      const auto idx = g.vel_index(j);
      double w = 1.0;
      for (int a = 0; a < g.dim_; ++a) {
        g.vel_coords_[j * g.dim_ + a] = g.vnodes_[a][idx[a]];
        w *= g.vweights_[a][idx[a]];
      }
      g.vel_weights_[j] = w;
    }
    g.cell_volume_ = 1.0;
    g.domain_volume_ = 1.0;
    for (int a = 0; a < g.dim_; ++a) {
      g.cell_volume_ *= g.dx_[a];
      g.domain_volume_ *= spec.period[a];
    }
    return g;
  }

  int dim() const { return dim_; }
  const GridSpec& spec() const { return spec_; }
  Quadrature rule() const { return spec_.rule; }

  double dx(int a) const { return dx_[a]; }
  double dv(int a) const { return dv_[a]; }
  double period(int a) const { return spec_.period[a]; }
  double vmax(int a) const { return spec_.vmax[a]; }
  int nx(int a) const { return nx_[a]; }
  int nv(int a) const { return nv_[a]; }
  double x(int a, int i) const { return xnodes_[a][i]; }
  double v(int a, int j) const { return vnodes_[a][j]; }
  const std::vector<double>& x_nodes(int a) const { return xnodes_[a]; }
  const std::vector<double>& v_nodes(int a) const { return vnodes_[a]; }
  const std::vector<double>& v_axis_weights(int a) const { return vweights_[a]; }

  std::size_t n_space() const { return n_space_; }
  std::size_t n_vel() const { return n_vel_; }
  std::size_t size() const { return n_space_ * n_vel_; }

  /// Quadrature weight of flat velocity node j (product of per-axis weights).
  double vel_weight(std::size_t j) const { return vel_weights_[j]; }
  const std::vector<double>& vel_weights() const { return vel_weights_; }
  /// Velocity coordinate a of flat velocity node j.
  double vel(std::size_t j, int a) const { return vel_coords_[j * dim_ + a]; }
  std::span<const double> vel(std::size_t j) const {
    return {vel_coords_.data() + j * dim_, static_cast<std::size_t>(dim_)};
  }
  double vel_norm2(std::size_t j) const {
    double s = 0.0;
    for (int a = 0; a < dim_; ++a) s += vel(j, a) * vel(j, a);
    return s;
  }

  /// dx^d.
  double cell_volume() const { return cell_volume_; }
  /// |T^d|.
  double domain_volume() const { return domain_volume_; }

  std::array<int, 3> space_index(std::size_t s) const { return unflatten(s, nx_); }
  std::size_t space_flat(const std::array<int, 3>& i) const { return flatten(i, nx_); }
  std::array<int, 3> vel_index(std::size_t j) const { return unflatten(j, nv_); }
  std::size_t vel_flat(const std::array<int, 3>& i) const { return flatten(i, nv_); }

  /// Flat index of the velocity node mirrored through the origin.
  std::size_t vel_mirror(std::size_t j) const {
    auto idx = vel_index(j);
    for (int a = 0; a < dim_; ++a) idx[a] = nv_[a] - 1 - idx[a];
    return vel_flat(idx);
  }

  /// Spatial neighbour of s shifted by `offset` cells along axis a, with periodic wrap.
  std::size_t space_shift(std::size_t s, int a, int offset) const {
    auto idx = space_index(s);
    int i = (idx[a] + offset) % nx_[a];
    if (i < 0) i += nx_[a];
    idx[a] = i;
    return space_flat(idx);
  }

  bool same_shape(const PhaseGrid& o) const {
    if (dim_ != o.dim_ || spec_.rule != o.spec_.rule) return false;
    for (int a = 0; a < dim_; ++a)
      if (nx_[a] != o.nx_[a] || nv_[a] != o.nv_[a] || spec_.period[a] != o.spec_.period[a] ||
          spec_.vmax[a] != o.spec_.vmax[a])
        return false;
    return true;
  }

private:
  static std::array<int, 3> unflatten(std::size_t f, const std::array<int, 3>& n) {
    std::array<int, 3> i{0, 0, 0};
    i[2] = static_cast<int>(f % n[2]);
    f /= n[2];
    i[1] = static_cast<int>(f % n[1]);
    f /= n[1];
    i[0] = static_cast<int>(f);
    return i;
  }
  static std::size_t flatten(const std::array<int, 3>& i, const std::array<int, 3>& n) {
    return (static_cast<std::size_t>(i[0]) * n[1] + i[1]) * n[2] + i[2];
  }

  GridSpec spec_;
  int dim_ = 1;
  std::array<double, 3> dx_{}, dv_{};
  std::array<int, 3> nx_{1, 1, 1}, nv_{1, 1, 1};
  std::size_t n_space_ = 0, n_vel_ = 0;
  std::array<std::vector<double>, 3> xnodes_, vnodes_, vweights_;
  std::vector<double> vel_coords_, vel_weights_;
  double cell_volume_ = 1.0, domain_volume_ = 1.0;
};

inline PhaseGrid build_phase_grid(const GridSpec& spec) { return PhaseGrid::build(spec); }

/// <v> = (1 + |v|^2)^{1/2}.
inline double japanese_bracket(std::span<const double> v) {
  double s = 1.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

/// Velocity weight exp(<v>^k).
inline double weight_value(std::span<const double> v, double k) {
  double s = 1.0;
  for (double c : v) s += c * c;
  return std::exp(std::pow(s, 0.5 * k));
}

/// Per-velocity-node weights exp(<v>^k) on a grid.
inline std::vector<double> weight_table(const PhaseGrid& g, double k) {
  std::vector<double> w(g.n_vel());
  for (std::size_t j = 0; j < g.n_vel(); ++j) w[j] = weight_value(g.vel(j), k);
  return w;
}

/// 1 + h = rho^{(gamma-1)/2}; returns h.
inline double symmetrize(double rho, double gamma) {
  return std::expm1(0.5 * (gamma - 1.0) * std::log(rho));
}

/// Inverse of symmetrize: rho = (1 + h)^{2/(gamma-1)}.
inline double desymmetrize(double h, double gamma) {
  return std::exp(2.0 / (gamma - 1.0) * std::log1p(h));
}

/// Solver and model parameters. Defaults are the values documented in README.md.
struct SimConfig {
  GridSpec grid;
  bool vmax_auto = false;  ///< choose vmax = 8 max(1, sqrt(T), |u|) from the initial data

  double gamma = 1.4;
  double mu = 0.1;
  double alpha = 1.0;
  double k = 1.5;
  double epsilon = 0.5;
  double delta = 0.5;
  double dt = 0.0;  ///< 0 selects the CFL-limited step at t = 0
  double t_final = 1.0;
  double cfl = 0.5;

  double t_ref = 1.0;            ///< fallback temperature on vacuum nodes
  double moment_floor = 1e-12;   ///< vacuum threshold relative to (max rho_f + 1)
  double cold_factor = 0.25;     ///< nodes with T_f < cold_factor * dv^2 do not relax
  double lemma_tol = 1e-6;       ///< slack for the rho_f/T_f inequality check

  // Lower-bound and theorem monitors (disabled when <= 0).
  double eps1 = 0.0;
  double lower_a = 0.1;
  double monitor_m = 0.0;
  double theta1 = 0.0;

  bool implicit_viscosity = true;
  bool mass_fix = true;
  double cg_tol = 1e-12;

  int picard_max_iters = 8;
  double picard_tol = 1e-8;
  double picard_horizon = 0.1;
  double cauchy_c = 1.0;
  double memory_cap_mb = 512.0;

  int snapshot_every = 0;

  // Initial data.
  std::string init = "equilibrium";
  double init_rho = 1.0;
  double init_u = 0.0;
  double init_rho_f = 1.0;
  double init_u_f = 0.0;
  double init_T = 1.0;
  double amp_rho = 0.0;
  double amp_u = 0.0;
  double amp_f = 0.0;
  double amp_uf = 0.0;
  double amp_T = 0.0;
  int init_mode = 1;
  std::uint64_t seed = 1;

  /// Throws ValidationError naming the first offending key.
  void validate() const {
    auto fail = [](const std::string& m) { throw ValidationError(m); };
    if (!(gamma > 1.0)) fail("gamma must be > 1");
    if (!(mu > 0.0)) fail("mu must be > 0");
    if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must lie in the closed interval [0,1]");
    if (!(k > 1.0 && k < 2.0)) fail("k must lie in the open interval (1,2)");
    if (!(epsilon > 0.0 && epsilon < k)) fail("epsilon must lie in the open interval (0,k)");
    if (!(delta > 0.0)) fail("delta must be > 0");
    if (!(dt >= 0.0)) fail("dt must be > 0 (or 0 for automatic selection)");
    if (!(t_final >= 0.0)) fail("t_final must be >= 0");
    if (!(cfl > 0.0 && cfl <= 1.0)) fail("cfl must lie in (0,1]");
    if (!(t_ref > 0.0)) fail("t_ref must be > 0");
    if (!(moment_floor > 0.0)) fail("moment_floor must be > 0");
    if (!(cold_factor >= 0.0)) fail("cold_factor must be >= 0");
    if (!(cg_tol > 0.0 && cg_tol <= 1e-10)) fail("cg_tol must lie in (0, 1e-10]");
    if (picard_max_iters < 1) fail("picard_max_iters must be >= 1");
    if (!(picard_tol > 0.0)) fail("picard_tol must be > 0");
    if (!(picard_horizon > 0.0)) fail("picard_horizon must be > 0");
    if (!(cauchy_c > 0.0)) fail("cauchy_c must be > 0");
    if (snapshot_every < 0) fail("snapshot_every must be >= 0");
    if (!(init_rho > 0.0)) fail("init_rho must be > 0");
    if (!(init_rho_f >= 0.0)) fail("init_rho_f must be >= 0");
    if (!(init_T > 0.0)) fail("init_T must be > 0");
    if (init_mode < 1) fail("init_mode must be >= 1");
    if (!(std::abs(amp_rho) < 1.0)) fail("amp_rho must satisfy |amp_rho| < 1");
    if (!(std::abs(amp_f) <= 1.0)) fail("amp_f must satisfy |amp_f| <= 1");
    if (!(std::abs(amp_T) < 1.0)) fail("amp_T must satisfy |amp_T| < 1");
    if (init != "equilibrium" && init != "perturbed" && init != "random_smooth")
      fail("init must be one of equilibrium, perturbed, random_smooth");
  }
};

/// Particle distribution sampled on the phase grid.
struct KineticState {
  std::vector<double> f;
  double time = 0.0;

  KineticState() = default;
  explicit KineticState(const PhaseGrid& g, double t = 0.0) : f(g.size(), 0.0), time(t) {}
  KineticState(std::vector<double> values, double t) : f(std::move(values)), time(t) {}

  double& operator()(const PhaseGrid& g, std::size_t s, std::size_t j) { return f[s * g.n_vel() + j]; }
  double operator()(const PhaseGrid& g, std::size_t s, std::size_t j) const { return f[s * g.n_vel() + j]; }
};

/// Fluid density, symmetrized density and velocity on the spatial grid.
struct FluidState {
  std::vector<double> rho;
  std::vector<double> h;
  std::vector<double> u;  ///< interleaved [s * dim + a]
  double time = 0.0;

  /// Builds a consistent state from density and velocity. Throws on rho <= 0.
  static FluidState from_density(std::vector<double> rho, std::vector<double> u, double gamma, double t = 0.0) {
    FluidState s;
    s.h.resize(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
      if (!(rho[i] > 0.0)) throw ValidationError("fluid density must be positive (node " + std::to_string(i) + ")");
      s.h[i] = symmetrize(rho[i], gamma);
    }
    s.rho = std::move(rho);
    s.u = std::move(u);
    s.time = t;
    return s;
  }

  static FluidState from_symmetrized(std::vector<double> h, std::vector<double> u, double gamma, double t = 0.0) {
    FluidState s;
    s.rho.resize(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (!(1.0 + h[i] > 0.0)) throw ValidationError("1+h must be positive (node " + std::to_string(i) + ")");
      s.rho[i] = desymmetrize(h[i], gamma);
    }
    s.h = std::move(h);
    s.u = std::move(u);
    s.time = t;
    return s;
  }
};

/// One line of a validation report.
struct CheckEntry {
  std::string name;
  bool passed = true;
  double extremum = 0.0;      ///< offending (or extreme) value
  std::size_t index = 0;      ///< flat index of the extremum
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckEntry> entries;

  bool ok() const {
    return std::all_of(entries.begin(), entries.end(), [](const CheckEntry& e) { return e.passed; });
  }
  const CheckEntry* find(const std::string& name) const {
    for (const auto& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  }
  std::string summary() const {
    std::ostringstream os;
    for (const auto& e : entries)
      os << (e.passed ? "ok   " : "FAIL ") << e.name << " extremum=" << e.extremum << " index=" << e.index
         << (e.detail.empty() ? "" : " (" + e.detail + ")") << "\n";
    return os.str();
  }
};

/// Checks the structural invariants of a state against the configured thresholds.
/// Shape mismatches throw; invariant failures become report entries.
inline ValidationReport validate_state(const KineticState& ks, const FluidState& fl, const PhaseGrid& g,
                                       const SimConfig& cfg) {
  const std::size_t ns = g.n_space();
  if (ks.f.size() != g.size())
    throw ValidationError("kinetic array has " + std::to_string(ks.f.size()) + " values, grid needs " +
                          std::to_string(g.size()));
  if (fl.rho.size() != ns || fl.h.size() != ns || fl.u.size() != ns * g.dim())
    throw ValidationError("fluid arrays do not match the spatial grid");

  ValidationReport rep;
  {
    CheckEntry e{"f_finite", true, 0.0, 0, ""};
    for (std::size_t i = 0; i < ks.f.size(); ++i)
      if (!std::isfinite(ks.f[i])) {
        e.passed = false;
        e.extremum = ks.f[i];
        e.index = i;
        break;
      }
    rep.entries.push_back(e);
  }
  {
    CheckEntry e{"f_nonnegative", true, 0.0, 0, ""};
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ks.f.size(); ++i)
      if (ks.f[i] < mn) {
        mn = ks.f[i];
        e.index = i;
      }
    e.extremum = ks.f.empty() ? 0.0 : mn;
    e.passed = !(mn < 0.0);
    if (!e.passed) e.detail = "space node " + std::to_string(e.index / g.n_vel()) + ", velocity node " +
                              std::to_string(e.index % g.n_vel());
    rep.entries.push_back(e);
  }
  {
    CheckEntry e{"rho_positive", true, 0.0, 0, ""};
    auto it = std::min_element(fl.rho.begin(), fl.rho.end());
    e.extremum = *it;
    e.index = static_cast<std::size_t>(it - fl.rho.begin());
    e.passed = *it > 0.0 && std::isfinite(*it);
    rep.entries.push_back(e);
  }
  {
    CheckEntry e{"h_consistent", true, 0.0, 0, ""};
    double worst = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
      if (!(fl.rho[i] > 0.0)) continue;
      const double lhs = 1.0 + fl.h[i];
      const double rhs = std::pow(fl.rho[i], 0.5 * (cfg.gamma - 1.0));
      const double err = std::abs(lhs - rhs) / std::abs(lhs);
      if (!(err <= worst)) {
        worst = err;
        e.index = i;
      }
    }
    e.extremum = worst;
    e.passed = worst <= 1e-12;
    rep.entries.push_back(e);
  }
  {
    // inf rho^{(gamma-1)/2} > delta
    CheckEntry e{"density_floor", true, 0.0, 0, ""};
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ns; ++i) {
      const double q = 1.0 + fl.h[i];
      if (q < mn) {
        mn = q;
        e.index = i;
      }
    }
    e.extremum = mn;
    e.passed = mn > cfg.delta;
    e.detail = "inf rho^((gamma-1)/2) vs delta=" + std::to_string(cfg.delta);
    rep.entries.push_back(e);
  }
  if (cfg.eps1 > 0.0) {
    // f >= eps1 exp(-(1+a) <v>^k)
    CheckEntry e{"f_lower_bound", true, 0.0, 0, ""};
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < g.n_vel(); ++j) {
      const double bound = cfg.eps1 * std::exp(-(1.0 + cfg.lower_a) * std::pow(japanese_bracket(g.vel(j)), cfg.k));
      for (std::size_t s = 0; s < ns; ++s) {
        const double r = ks(g, s, j) / bound;
        if (r < worst) {
          worst = r;
          e.index = s * g.n_vel() + j;
        }
      }
    }
    e.extremum = worst;
    e.passed = worst >= 1.0;
    e.detail = "min f / (eps1 exp(-(1+a)<v>^k))";
    rep.entries.push_back(e);
  }
  {
    // Truncation proxy: mass carried by the outermost velocity layer.
    CheckEntry e{"velocity_edge_mass", true, 0.0, 0, ""};
    double total = 0.0, edge = 0.0;
    for (std::size_t j = 0; j < g.n_vel(); ++j) {
      const auto idx = g.vel_index(j);
      bool on_edge = false;
      for (int a = 0; a < g.dim(); ++a)
        if (idx[a] == 0 || idx[a] == g.nv(a) - 1) on_edge = true;
      for (std::size_t s = 0; s < ns; ++s) {
        const double m = std::abs(ks(g, s, j)) * g.vel_weight(j);
        total += m;
        if (on_edge) edge += m;
      }
    }
    e.extremum = total > 0.0 ? edge / total : 0.0;
    e.passed = e.extremum < 1e-10;
    e.detail = "fraction of particle mass on the velocity boundary layer";
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace nsbgk
