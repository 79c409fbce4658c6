#include <gtest/gtest.h>

#include <cmath>

#include "vecgrav/field_kinematics.hpp"
#include "vecgrav/pipeline.hpp"

using namespace vecgrav;

namespace {

/// Consecutive states sampled from closed-form potentials.
struct Sampled {
  PotentialState before, at, after, after2;
};

template <typename Phi, typename A>
Sampled sample_states(const Grid3& g, double dt, Phi phi, A a) {
  auto level = [&](double t) {
    PotentialLevel l(g);
    l.phi = sample_scalar(g, [&](const Vec3& x) { return phi(x, t); });
    l.A = sample_vector(g, [&](const Vec3& x) { return a(x, t); });
    return l;
  };
  auto state = [&](double t) {
    PotentialState s;
    s.previous = level(t - dt);
    s.current = level(t);
    s.time = t;
    s.dt = dt;
    s.reference = PotentialLevel(g);
    return s;
  };
  return {state(-dt), state(0.0), state(dt), state(2 * dt)};
}

}  // namespace

TEST(DeriveFields, LinearPotentialsGiveExactFields) {
  const Grid3 g = Grid3::cube(8, 0.5);
  const Vec3 a{0.3, -1.2, 2.0}, b{1.0, 0.5, -0.25};
  // phi = a.x, A = t b + (omega x r) / 2 with omega = (0, 0, 2): G = omega.
  const Sampled s = sample_states(
      g, 0.125, [&](const Vec3& x, double) { return dot(a, x); },
      [&](const Vec3& x, double t) { return Vec3{t * b[0] - x[1], t * b[1] + x[0], t * b[2]}; });
  const FieldPair f = derive_fields(s.at, s.after);
  const IndexRegion in = interior_region(g, 1);
  for (int i = in.lo[0]; i < in.hi[0]; ++i)
    for (int j = in.lo[1]; j < in.hi[1]; ++j)
      for (int k = in.lo[2]; k < in.hi[2]; ++k) {
        const std::size_t n = g.index(i, j, k);
        for (int c = 0; c < 3; ++c) EXPECT_NEAR(f.F.at(n)[c], a[c] - b[c], 1e-13);
        EXPECT_NEAR(f.G.at(n)[2], 2.0, 1e-13);
        EXPECT_NEAR(f.G.at(n)[0], 0.0, 1e-13);
      }
  EXPECT_DOUBLE_EQ(f.time, 0.0);
}

TEST(DeriveFields, RequiresConsecutiveStates) {
  const Grid3 g = Grid3::cube(6, 1.0);
  const Sampled s = sample_states(g, 0.5, [](const Vec3&, double) { return 0.0; },
                                  [](const Vec3&, double) { return Vec3{}; });
  EXPECT_THROW(derive_fields(s.before, s.after), SchedulingError);
}

TEST(ForceDensity, DefaultLaw) {
  const Grid3 g = Grid3::cube(4, 1.0);
  FieldPair f{VectorField(g), VectorField(g), 0.0};
  MassFluxState src = empty_source(g, 0.0);
  for (std::size_t n = 0; n < g.size(); ++n) {
    f.F.set(n, {1.0, 2.0, 3.0});
    f.G.set(n, {0.0, 0.0, 1.0});
    src.sigma.values[n] = 2.0;
    src.flux.set(n, {0.5, 0.0, 0.0});
  }
  const VectorField out = force_density(f, src);
  // -sigma F - s x G = (-2, -4, -6) - (0, -0.5, 0)
  const Vec3 v = out.at(5);
  EXPECT_DOUBLE_EQ(v[0], -2.0);
  EXPECT_DOUBLE_EQ(v[1], -3.5);
  EXPECT_DOUBLE_EQ(v[2], -6.0);
  src.time = 1.0;
  EXPECT_THROW(force_density(f, src), SchedulingError);
}

TEST(GaugeScalar, VanishesForLorenzGaugePotentials) {
  // phi = c^2 t x, A = (x^2 / 2, 0, 0): div A = x, dphi/dt / c^2 = x.
  const Grid3 g = Grid3::cube(8, 0.5);
  const SimulationUnits u{2.0, 1.0};
  const Sampled s = sample_states(
      g, 0.1, [&](const Vec3& x, double t) { return u.c * u.c * t * x[0]; },
      [](const Vec3& x, double) { return Vec3{0.5 * x[0] * x[0], 0.0, 0.0}; });
  const GaugeScalar chi = gauge_scalar(s.at, s.after, u);
  EXPECT_LT(norms(chi.chi, interior_region(g, 1)).max, 1e-12);
}

TEST(Residuals, DivGAndFaradayAreDiscreteIdentities) {
  const Grid3 g = Grid3::cube(10, 0.7);
  const SimulationUnits u;
  const Sampled s = sample_states(
      g, 0.2, [](const Vec3& x, double t) { return std::sin(x[0] + t) * std::cos(x[1]); },
      [](const Vec3& x, double t) {
        return Vec3{std::cos(x[2] - t), x[0] * x[1] * t, std::sin(x[1] * t)};
      });
  const FieldPair f0 = derive_fields(s.before, s.at), f1 = derive_fields(s.at, s.after),
                  f2 = derive_fields(s.after, s.after2);
  const GaugeScalar c0 = gauge_scalar(s.before, s.at, u), c1 = gauge_scalar(s.at, s.after, u),
                    c2 = gauge_scalar(s.after, s.after2, u);
  const MaxwellResiduals r = eq5_residuals(f0, f1, f2, c0, c1, c2, empty_source(g, 0.0), u, 2);
  EXPECT_LT(r.div_G_norms.max, 1e-12);
  EXPECT_LT(r.faraday_norms.max, 1e-12);
  EXPECT_GT(r.gauss_norms.max, 1e-3);  // arbitrary potentials do not solve the wave system
}

TEST(Residuals, SourcedLeapfrogRunSatisfiesFieldEquations) {
  const SimulationUnits u;
  const Grid3 g = Grid3::cube(32, 1.0);
  SolverConfig c;
  c.sponge_width = 0;
  Simulation sim(SourceModel(OscillatingBlob{{}, 2.5, 1.0, {0, 0, 1}, 1.0, 2 * pi / 16, 8.0}, u), g,
                 c, u, InitMode::static_equilibrium);
  sim.advance(24);
  const MaxwellResiduals r = sim.residuals(2);
  EXPECT_LT(r.div_G_norms.max, 1e-14);
  EXPECT_LT(r.faraday_norms.max, 1e-14);
  // Truncation-level residuals compared with the source term 4 pi kappa sigma;
  // (dx / width)^2 is 0.16 here.
  const double src_scale = 4 * pi * norms(sim.source(0).sigma, interior_region(g, 2)).max;
  EXPECT_LT(r.gauss_norms.max, 0.1 * src_scale);
  EXPECT_LT(norms(sim.gauge(0).chi, interior_region(g, 2)).max, 1e-3);
}
