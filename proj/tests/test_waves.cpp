#include <gtest/gtest.h>

#include <cmath>

#include "vecgrav/convergence.hpp"
#include "vecgrav/waves.hpp"

using namespace vecgrav;

TEST(PlaneWave, EnergyClosedForm) {
  const SimulationUnits u;
  const PlaneWaveSpec spec{ConstantProfile{1.0}, ConstantProfile{1.0}};
  const WaveEnergySample e = wave_energy(spec, {0.3, 1.0, -2.0}, 4.0, u);
  EXPECT_NEAR(e.W, -1.0 / (2.0 * pi), 1e-15);
  EXPECT_NEAR(e.S[0], e.W, 1e-15);
}

TEST(PlaneWave, FieldsAgreeWithStressTensor) {
  const SimulationUnits u{3.0, 2.0};
  const PlaneWaveSpec spec{GaussianPulse{0.7, 1.0, 2.0}, SinusoidProfile{0.4, 0.9, 0.3}};
  for (double x : {-4.0, 0.0, 1.3, 5.0}) {
    const FieldSample f = plane_wave_fields(spec, {x, 0, 0}, 0.5, u);
    const StressSample s = stress_from_fields(f.F, f.G, u);
    const WaveEnergySample e = wave_energy(spec, {x, 0, 0}, 0.5, u);
    EXPECT_NEAR(s.W, e.W, 1e-12 * std::abs(e.W));
    EXPECT_NEAR(s.S[0], e.W * u.c, 1e-12 * std::abs(e.W) * u.c);
    EXPECT_NEAR(s.S[1], 0.0, 1e-12 * std::abs(e.W) * u.c);
  }
}

TEST(PlaneWave, PotentialDerivativesGiveFields) {
  // F = -dA/dt, G = curl A for A(x - ct); check by finite differences.
  const SimulationUnits u{2.0, 1.0};
  const PlaneWaveSpec spec{GaussianPulse{1.0, 0.5, 1.5}, SinusoidProfile{0.3, 1.1, 0.0}};
  const double h = 1e-5, t = 0.7;
  for (double x : {-1.0, 0.4, 2.2}) {
    const Vec3 p{x, 0, 0};
    const auto at = [&](double dx, double dt) { return plane_wave_potential(spec, {x + dx, 0, 0}, t + dt, u).A; };
    const Vec3 dAdt = (1.0 / (2 * h)) * (at(0, h) - at(0, -h));
    const Vec3 dAdx = (1.0 / (2 * h)) * (at(h, 0) - at(-h, 0));
    const FieldSample f = plane_wave_fields(spec, p, t, u);
    for (int a = 0; a < 3; ++a) EXPECT_NEAR(f.F[a], -dAdt[a], 1e-8);
    EXPECT_NEAR(f.G[1], -dAdx[2], 1e-8);
    EXPECT_NEAR(f.G[2], dAdx[1], 1e-8);
  }
}

TEST(PlaneWave, TranslationErrorSmallAndFluxOpposesMotion) {
  const SimulationUnits u;
  const PlaneWaveSpec spec{GaussianPulse{1.0, 0.0, 4.0}, ConstantProfile{}};
  const WaveDiagnostics d = run_translation_test(spec, Grid3::cube(32, 1.0), SolverConfig{}, u, 6.0);
  EXPECT_LT(d.relative_error, 0.05);
  EXPECT_LE(d.max_W, 0.0);
  EXPECT_TRUE(d.flux_opposes_propagation);
  EXPECT_LT(d.residuals.div_G_norms.max, 1e-12);
}

TEST(FittedOrder, RecoversKnownSlopes) {
  const std::vector<double> h{2.0, 4.0 / 3.0, 1.0};
  std::vector<double> e2, e1;
  for (double x : h) {
    e2.push_back(0.3 * x * x);
    e1.push_back(5.0 * x);
  }
  EXPECT_NEAR(fitted_order(h, e2), 2.0, 1e-12);
  EXPECT_NEAR(fitted_order(h, e1), 1.0, 1e-12);
  EXPECT_THROW(fitted_order({1.0}, {1.0}), UsageError);
  EXPECT_THROW(fitted_order({1.0, 2.0}, {0.0, 1.0}), UsageError);
}

TEST(Refinement, GridKeepsExtentAndMarginScales) {
  const Grid3 g = refine_grid(Grid3::cube(32, 2.0), 48);
  EXPECT_EQ(g.counts[0], 48);
  EXPECT_NEAR(g.counts[0] * g.dx, 64.0, 1e-12);
  EXPECT_EQ(scaled_margin(2, 64, {32, 48, 64}), 4);
  EXPECT_EQ(scaled_margin(2, 48, {32, 48, 64}), 3);
  EXPECT_THROW(aligned_steps(1.0, 0.3, "x"), SchedulingError);
  EXPECT_EQ(aligned_steps(1.5, 0.5, "x"), 3);
}

TEST(Radiation, TrendWindowEndsAfterRampAndCrossing) {
  const auto [a, b] = default_trend_window(32.0, 64.0, 24.0, {});
  EXPECT_EQ(a, 32.0);
  EXPECT_NEAR(b, 64.0 + 24.0 * std::sqrt(3.0), 1e-12);
}

TEST(Radiation, RejectsDomainShorterThanTwoWavelengths) {
  RadiationSettings rs;
  rs.grid = Grid3::cube(32, 1.0);
  rs.solver.sponge_width = 0;
  rs.source = OscillatingBlob{{}, 1.0, 1.0, {0, 0, 1}, 0.5, 2 * pi / 20, 10.0};
  rs.duration = 100;
  rs.inner_half_width = 8;
  rs.outer_half_width = 12;
  rs.period = 20;
  EXPECT_THROW(run_radiation_scenario(rs, {}), GeometryError);
}

TEST(Radiation, ShortRunKeepsEnergyNegativeAndBudgetClosed) {
  RadiationSettings rs;
  rs.grid = Grid3::cube(32, 1.0);
  rs.solver.sponge_width = 0;
  rs.source = OscillatingBlob{{}, 1.0, 1.0, {0, 0, 1}, 0.5, 2 * pi / 12, 6.0};
  rs.duration = 40;
  rs.inner_half_width = 8;
  rs.outer_half_width = 12;
  rs.period = 12;
  rs.average_cycles = 1;
  const RadiationDiagnostics d = run_radiation_scenario(rs, {});
  EXPECT_LE(d.max_W, 0.0);
  EXPECT_LT(d.budget_closure, 0.2 * d.work_scale);
  EXPECT_LT(d.mean_flux_outer, 0.0);
  EXPECT_EQ(d.energy.size(), 79u);
}
