#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "nsbgk/fluid.hpp"

using namespace nsbgk;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

FluidStepInputs frozen_inputs(const PhaseGrid& g, double gamma, double mu, double dt) {
  FluidStepInputs in;
  in.h.assign(g.n_space(), 0.0);
  in.u.assign(g.n_space() * g.dim(), 0.0);
  in.hc0 = in.h;
  in.uc0 = in.u;
  in.gamma = gamma;
  in.mu = mu;
  in.dt = dt;
  return in;
}

double total(const std::vector<double>& q) {
  double acc = 0.0;
  for (double x : q) acc += x;
  return acc;
}

}  // namespace

TEST(Symmetrize, Examples) {
  const std::vector<double> two{2.0}, one{1.0};
  EXPECT_NEAR(to_symmetrized(two, 3.0)[0], 1.0, 1e-15);
  EXPECT_EQ(to_symmetrized(one, 1.4)[0], 0.0);
  EXPECT_EQ(to_symmetrized(one, 2.7)[0], 0.0);
  EXPECT_NEAR(to_symmetrized(two, 1.4)[0], 0.148698, 5e-7);
  EXPECT_NEAR(to_symmetrized(two, 1.4)[0], std::pow(2.0, 0.2) - 1.0, 1e-15);
}

TEST(Symmetrize, RoundTripAndErrors) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.05, 20.0);
  std::vector<double> rho(500);
  for (double& r : rho) r = U(rng);
  for (double gamma : {1.1, 1.4, 5.0 / 3.0, 3.0}) {
    const auto back = from_symmetrized(to_symmetrized(rho, gamma), gamma);
    for (std::size_t i = 0; i < rho.size(); ++i) EXPECT_NEAR(back[i] / rho[i], 1.0, 1e-13);
  }
  const std::vector<double> bad{1.0, 0.0}, badh{0.0, -1.0};
  EXPECT_THROW(to_symmetrized(bad, 1.4), ValidationError);
  EXPECT_THROW(from_symmetrized(badh, 1.4), ValidationError);
}

TEST(Pressure, Examples) {
  EXPECT_EQ(pressure(1.0, 1.4), 1.0);
  EXPECT_NEAR(pressure(2.0, 1.4), 2.639016, 5e-7);
  EXPECT_EQ(pressure(0.0, 1.4), 0.0);
}

TEST(FluidStep, ConstantStateIsExact) {
  const PhaseGrid g = testkit::grid_nd(2, 8, 8.0, 8);
  FluidStepInputs in = frozen_inputs(g, 1.4, 0.1, 1e-3);
  in.h.assign(g.n_space(), 0.3);
  in.hc0 = in.h;
  const FluidStepResult r = fluid_step(in, g);
  for (double h : r.h) EXPECT_EQ(h, 0.3);
  for (double u : r.u) EXPECT_EQ(u, 0.0);
}

TEST(FluidStep, ViscousShearWaveDecay) {
  // u = (sin(2 pi y), 0) is divergence free, so the frozen linear system reduces to the heat equation.
  const PhaseGrid g = testkit::grid_nd(2, 32, 8.0, 8);
  const double mu = 0.05;
  const double tau = 1.0 / (mu * kTwoPi * kTwoPi);
  const int steps = 400;
  FluidStepInputs in = frozen_inputs(g, 1.4, mu, tau / steps);
  for (std::size_t s = 0; s < g.n_space(); ++s) in.u[s * 2] = std::sin(kTwoPi * g.x(1, g.space_index(s)[1]));
  const std::vector<double> u0 = in.u;
  for (int n = 0; n < steps; ++n) {
    const FluidStepResult r = fluid_step(in, g);
    in.h = r.h;
    in.u = r.u;
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u0.size(); ++i) {
    num += in.u[i] * u0[i];
    den += u0[i] * u0[i];
  }
  EXPECT_NEAR(num / den / std::exp(-1.0), 1.0, 0.02);
  for (double h : in.h) EXPECT_NEAR(h, 0.0, 1e-12);
}

TEST(FluidStep, ExplicitAndImplicitViscosityConvergeTogether) {
  const PhaseGrid g = testkit::grid1d(32);
  const double mu = 0.05, t_end = 0.2;
  auto gap = [&](int steps) {
    FluidStepInputs a = frozen_inputs(g, 1.4, mu, t_end / steps);
    for (std::size_t s = 0; s < g.n_space(); ++s) a.u[s] = 0.1 * std::sin(kTwoPi * g.x(0, s));
    FluidStepInputs b = a;
    b.implicit_viscosity = false;
    for (int n = 0; n < steps; ++n) {
      auto ra = fluid_step(a, g), rb = fluid_step(b, g);
      a.h = ra.h, a.u = ra.u, b.h = rb.h, b.u = rb.u;
    }
    std::vector<double> diff(a.u.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = a.u[i] - b.u[i];
    return testkit::max_abs(diff);
  };
  const double g1 = gap(100), g2 = gap(200);
  EXPECT_LT(g1, 2e-3 * 0.1);
  EXPECT_NEAR(g1 / g2, 2.0, 0.3);
}

namespace {

struct MmsError {
  double h, u;
};

// Manufactured solution for the linear symmetrized system with prescribed coefficients.
MmsError mms_run(int nx) {
  const double gamma = 1.4, mu = 0.1, t_end = 0.2;
  const double kh = 0.5 * (gamma - 1.0), ku = 2.0 * gamma / (gamma - 1.0), pe = 2.0 / (gamma - 1.0);
  const PhaseGrid g = testkit::grid1d(nx);
  const double dx = g.dx(0);
  const int steps = static_cast<int>(std::ceil(t_end / (0.5 * dx * dx)));
  const double dt = t_end / steps;

  auto he = [](double x, double t) { return 0.1 * std::sin(kTwoPi * x + t); };
  auto he_x = [](double x, double t) { return 0.1 * kTwoPi * std::cos(kTwoPi * x + t); };
  auto he_t = [](double x, double t) { return 0.1 * std::cos(kTwoPi * x + t); };
  auto ue = [](double x, double t) { return 0.2 * std::cos(kTwoPi * x - t); };
  auto ue_x = [](double x, double t) { return -0.2 * kTwoPi * std::sin(kTwoPi * x - t); };
  auto ue_xx = [](double x, double t) { return -0.2 * kTwoPi * kTwoPi * std::cos(kTwoPi * x - t); };
  auto ue_t = [](double x, double t) { return 0.2 * std::sin(kTwoPi * x - t); };
  auto hc = [](double x, double t) { return 0.05 * std::cos(kTwoPi * x) * (1.0 + t); };
  auto uc = [](double x, double t) { return 0.3 + 0.1 * std::sin(kTwoPi * x + 2.0 * t); };
  auto F = [](double x) { return 0.1 * std::sin(kTwoPi * x); };

  const std::size_t n = g.n_space();
  auto fill = [&](double t, std::vector<double>& c_h, std::vector<double>& c_u, std::vector<double>& Sh,
                  std::vector<double>& Su) {
    c_h.resize(n), c_u.resize(n), Sh.resize(n), Su.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
      const double x = g.x(0, s);
      c_h[s] = hc(x, t);
      c_u[s] = uc(x, t);
      Sh[s] = he_t(x, t) + c_u[s] * he_x(x, t) + kh * (1.0 + c_h[s]) * ue_x(x, t);
      Su[s] = ue_t(x, t) + c_u[s] * ue_x(x, t) + ku * (1.0 + c_h[s]) * he_x(x, t) -
              mu * ue_xx(x, t) / std::pow(1.0 + c_h[s], pe) + F(x);
    }
  };

  FluidStepInputs in;
  in.gamma = gamma;
  in.mu = mu;
  in.dt = dt;
  in.h.resize(n), in.u.resize(n), in.F0.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    in.h[s] = he(g.x(0, s), 0.0);
    in.u[s] = ue(g.x(0, s), 0.0);
    in.F0[s] = F(g.x(0, s));
  }
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

}  // namespace

TEST(FluidStep, ManufacturedSolutionSecondOrder) {
  const MmsError e16 = mms_run(16), e32 = mms_run(32), e64 = mms_run(64);
  const double oh = std::log2(e32.h / e64.h), ou = std::log2(e32.u / e64.u);
  EXPECT_GE(oh, 1.9) << e16.h << " " << e32.h << " " << e64.h;
  EXPECT_GE(ou, 1.9) << e16.u << " " << e32.u << " " << e64.u;
  EXPECT_GE(std::log2(e16.h / e32.h), 1.8);
  EXPECT_GE(std::log2(e16.u / e32.u), 1.8);
}

TEST(FluidStep, AcousticEnergyNonIncreasing) {
  const PhaseGrid g = testkit::grid1d(64);
  const double gamma = 1.4, w = 4.0 * gamma / ((gamma - 1.0) * (gamma - 1.0));
  FluidStepInputs in = frozen_inputs(g, gamma, 0.0, 2e-3);
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    const double x = g.x(0, s);
    in.h[s] = 1e-3 * std::sin(kTwoPi * x) + 5e-4 * std::cos(2.0 * kTwoPi * x);
    in.u[s] = 2e-3 * std::cos(kTwoPi * x);
  }
  auto energy = [&](const std::vector<double>& h, const std::vector<double>& u) {
    double e = 0.0;
    for (std::size_t s = 0; s < h.size(); ++s) e += w * h[s] * h[s] + u[s] * u[s];
    return e * g.dx(0);
  };
  double e = energy(in.h, in.u);
  for (int n = 0; n < 500; ++n) {
    const FluidStepResult r = fluid_step(in, g);
    in.h = r.h, in.u = r.u;
    const double en = energy(in.h, in.u);
    EXPECT_LE(en, e * (1.0 + 1e-6)) << "step " << n;
    e = en;
  }
}

TEST(FluidStep, Errors) {
  const PhaseGrid g = testkit::grid1d(16);
  FluidStepInputs in = frozen_inputs(g, 1.4, 0.1, 1e-3);
  in.hc0[3] = -0.8;  // 1+h = 0.2 < delta/2
  EXPECT_THROW(fluid_step(in, g), RuntimeAbort);

  in = frozen_inputs(g, 1.4, 0.1, 1.0);
  EXPECT_THROW(fluid_step(in, g), RuntimeAbort);

  in = frozen_inputs(g, 1.4, 0.1, 1e-3);
  in.F0.assign(g.n_space(), 0.0);
  in.F0[2] = std::nan("");
  EXPECT_THROW(fluid_step(in, g), RuntimeAbort);

  in = frozen_inputs(g, 1.4, 0.1, 1e-3);
  in.u.pop_back();
  EXPECT_THROW(fluid_step(in, g), ValidationError);

  in = frozen_inputs(g, 1.4, 0.1, 1e-3);
  in.h[4] = -0.99;  // lands below zero after the step
  in.u[5] = 50.0;
  in.check_cfl = false;
  EXPECT_THROW(fluid_step(in, g), RuntimeAbort);
}

namespace {

FluidState random_fluid(const PhaseGrid& g, std::mt19937_64& rng, double amp_rho, double amp_u, double gamma) {
  std::normal_distribution<double> N(0.0, 1.0);
  const int d = g.dim();
  std::vector<double> rho(g.n_space()), u(g.n_space() * d);
  double c[3][2], cu[3][3];
  for (auto& r : c) r[0] = N(rng), r[1] = N(rng);
  for (auto& r : cu) r[0] = N(rng), r[1] = N(rng), r[2] = N(rng);
  for (std::size_t s = 0; s < g.n_space(); ++s) {
    const auto idx = g.space_index(s);
    double bump = 0.0;
    for (int a = 0; a < d; ++a) {
      const double th = kTwoPi * g.x(a, idx[a]) / g.period(a);
      bump += c[a][0] * std::sin(th) + c[a][1] * std::cos(th);
      for (int b = 0; b < d; ++b) u[s * d + b] += amp_u * cu[a][b] * std::sin(th + b);
    }
    rho[s] = 1.0 + amp_rho * std::tanh(bump);
  }
  FluidState fl = FluidState::from_density(rho, u, gamma);
  return fl;
}

}  // namespace

TEST(CompressibleStep, ConstantStateIsExact) {
  const PhaseGrid g = testkit::grid_nd(2, 8, 8.0, 8);
  const std::vector<double> rho(g.n_space(), 1.7);
  std::vector<double> u(g.n_space() * 2);
  for (std::size_t s = 0; s < g.n_space(); ++s) u[2 * s] = 0.25, u[2 * s + 1] = -0.5;
  const FluidState fl = FluidState::from_density(rho, u, 1.4);
  const FluidState out = compressible_step(fl, {}, g, FluidParams{}, 1e-3);
  for (std::size_t s = 0; s < g.n_space(); ++s) EXPECT_EQ(out.rho[s], 1.7);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_EQ(out.u[i], u[i]);
  EXPECT_DOUBLE_EQ(out.time, 1e-3);
}

TEST(CompressibleStep, MassAndMomentumConserved) {
  std::mt19937_64 rng(8);
  for (int d : {1, 2}) {
    const PhaseGrid g = testkit::grid_nd(d, d == 1 ? 64 : 24, 8.0, 8);
    FluidParams p;
    p.mu = 0.05;
    FluidState fl = random_fluid(g, rng, 0.3, 0.3, p.gamma);
    auto momentum = [&](const FluidState& s, int a) {
      double m = 0.0;
      for (std::size_t i = 0; i < g.n_space(); ++i) m += s.rho[i] * s.u[i * d + a];
      return m;
    };
    double scale = 0.0;
    for (std::size_t i = 0; i < g.n_space(); ++i)
      for (int a = 0; a < d; ++a) scale += fl.rho[i] * std::abs(fl.u[i * d + a]);
    const double m0 = total(fl.rho);
    std::vector<double> p0(d);
    for (int a = 0; a < d; ++a) p0[a] = momentum(fl, a);
    const double dt = 0.5 * fluid_dt_limit(g, fl.rho, fl.u, p);
    const int steps = static_cast<int>(std::ceil(1.0 / dt));
    for (int n = 0; n < steps; ++n) fl = compressible_step(fl, {}, g, p, 1.0 / steps);
    EXPECT_LE(std::abs(total(fl.rho) - m0) / m0, 1e-8);
    EXPECT_LE(std::abs(total(fl.rho) - m0) / m0, 1e-13);
    for (int a = 0; a < d; ++a) EXPECT_LE(std::abs(momentum(fl, a) - p0[a]) / scale, 1e-10) << "dim " << d;
    for (std::size_t s = 0; s < g.n_space(); ++s)
      EXPECT_NEAR(fl.h[s], symmetrize(fl.rho[s], p.gamma), 1e-15);
  }
}

TEST(CompressibleStep, ShearWaveDecay) {
  const PhaseGrid g = testkit::grid_nd(2, 32, 8.0, 8);
  FluidParams p;
  p.mu = 0.05;
  const double tau = 1.0 / (p.mu * kTwoPi * kTwoPi);
  const int steps = 400;
  const std::vector<double> rho(g.n_space(), 1.0);
  std::vector<double> u(g.n_space() * 2, 0.0);
  for (std::size_t s = 0; s < g.n_space(); ++s) u[s * 2] = 1e-3 * std::sin(kTwoPi * g.x(1, g.space_index(s)[1]));
  FluidState fl = FluidState::from_density(rho, u, p.gamma);
  for (int n = 0; n < steps; ++n) fl = compressible_step(fl, {}, g, p, tau / steps);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) num += fl.u[i] * u[i], den += u[i] * u[i];
  EXPECT_NEAR(num / den / std::exp(-1.0), 1.0, 0.02);
}

TEST(CompressibleStep, MomentumSourceIsDeposited) {
  const PhaseGrid g = testkit::grid1d(16);
  FluidParams p;
  const FluidState fl = FluidState::from_density(std::vector<double>(16, 2.0), std::vector<double>(16, 0.0), p.gamma);
  std::vector<double> src(16, 0.0);
  src[4] = 1e-3;
  src[9] = -4e-4;
  const FluidState out = compressible_step(fl, src, g, p, 1e-3);
  double m = 0.0;
  for (std::size_t s = 0; s < 16; ++s) m += out.rho[s] * out.u[s];
  EXPECT_NEAR(m, 6e-4, 1e-15);
  EXPECT_GT(out.u[4], 0.0);
  EXPECT_LT(out.u[9], 0.0);
}

TEST(CompressibleStep, Errors) {
  const PhaseGrid g = testkit::grid1d(16);
  FluidParams p;
  const FluidState fl = FluidState::from_density(std::vector<double>(16, 1.0), std::vector<double>(16, 0.0), p.gamma);
  EXPECT_THROW(compressible_step(fl, {}, g, p, 1.0), RuntimeAbort);
  EXPECT_THROW(compressible_step(fl, {}, g, p, 0.0), ValidationError);
  const std::vector<double> bad(3, 0.0);
  EXPECT_THROW(compressible_step(fl, bad, g, p, 1e-3), ValidationError);

  std::vector<double> rho(16, 1.0), u(16, 0.0);
  rho[7] = 1e-3;
  u[6] = -5.0;
  u[8] = 5.0;
  p.check_cfl = false;
  const FluidState st = FluidState::from_density(rho, u, p.gamma);
  EXPECT_THROW(compressible_step(st, {}, g, p, 0.05), RuntimeAbort);
}
