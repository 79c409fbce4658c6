#include <gtest/gtest.h>

#include <cmath>

#include "vecgrav/sources.hpp"

using namespace vecgrav;

TEST(SmoothRamp, EndpointsAndMonotone) {
  EXPECT_EQ(smooth_ramp(-1.0, 10.0), 0.0);
  EXPECT_EQ(smooth_ramp(0.0, 10.0), 0.0);
  EXPECT_EQ(smooth_ramp(10.0, 10.0), 1.0);
  EXPECT_EQ(smooth_ramp(12.0, 10.0), 1.0);
  EXPECT_EQ(smooth_ramp(0.0, 0.0), 1.0);
  EXPECT_NEAR(smooth_ramp(5.0, 10.0), 0.5, 1e-15);
  double prev = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double v = smooth_ramp(0.1 * i, 10.0);
    EXPECT_GE(v, prev);
    prev = v;
  }
  EXPECT_EQ(smooth_ramp_rate(0.0, 10.0), 0.0);
  EXPECT_EQ(smooth_ramp_rate(10.0, 10.0), 0.0);
}

TEST(SmoothRamp, RateMatchesFiniteDifference) {
  const double T = 7.0, h = 1e-5;
  for (double t : {0.5, 2.0, 3.5, 6.1}) {
    const double fd = (smooth_ramp(t + h, T) - smooth_ramp(t - h, T)) / (2 * h);
    EXPECT_NEAR(smooth_ramp_rate(t, T), fd, 1e-8);
  }
}

TEST(StaticBall, GridMassMatchesConfiguredMass) {
  const SimulationUnits u;
  const Grid3 g = Grid3::cube(32, 1.0);
  for (double R : {0.0, 3.0}) {
    const StaticBall b{{0.3, -0.2, 0.1}, R, 2.5, 1.5};
    const MassFluxState s = sample_scenario(SourceScenario{b}, 0.0, g, u);
    // The shell profile has a kink in |x| at the centre, so the node sum is
    // only close, not spectrally exact.
    EXPECT_NEAR(heavy_mass_integral(s), 2.5, 1e-4) << "radius " << R;
    EXPECT_TRUE(physically_admissible(s, u));
  }
}

TEST(StaticBall, RejectsBadParameters) {
  const SimulationUnits u;
  EXPECT_THROW(SourceModel(StaticBall{{}, 0.0, 0.0, 1.0}, u), UsageError);
  EXPECT_THROW(SourceModel(StaticBall{{}, 0.0, 1.0, -1.0}, u), UsageError);
  EXPECT_THROW(SourceModel(StaticBall{{}, -1.0, 1.0, 1.0}, u), UsageError);
}

TEST(StaticBall, BodyOutsideGridRejected) {
  const SimulationUnits u;
  const Grid3 g = Grid3::cube(16, 1.0);
  EXPECT_THROW(sample_scenario(SourceScenario{StaticBall{{6.0, 0, 0}, 0.0, 1.0, 1.0}}, 0.0, g, u),
               OutOfBoundsError);
}

TEST(OscillatingBlob, HeavyMassConservedInTime) {
  const SimulationUnits u;
  const Grid3 g = Grid3::cube(32, 1.0);
  const OscillatingBlob b{{}, 2.0, 1.0, {0, 0, 1}, 1.5, 2 * pi / 16, 8.0};
  const SourceModel m(b, u);
  const double m0 = heavy_mass_integral(sample_scenario(m, 0.0, g));
  for (double t : {3.0, 9.7, 20.0}) EXPECT_NEAR(heavy_mass_integral(sample_scenario(m, t, g)), m0, 1e-9);
  EXPECT_NEAR(m0, 1.0, 1e-6);
}

TEST(OscillatingBlob, FluxIsDensityTimesCentreVelocity) {
  const SimulationUnits u;
  const OscillatingBlob b{{}, 2.0, 1.0, {0, 0, 2}, 1.5, 0.4, 0.0};
  const SourceModel m(b, u);
  const double t = 1.3;
  const FluxPoint p = m.sample({0.5, -0.25, 1.0}, t);
  EXPECT_NEAR(p.s[2], p.sigma * 1.5 * 0.4 * std::cos(0.4 * t), 1e-15);
  EXPECT_EQ(p.s[0], 0.0);
}

TEST(OscillatingBlob, ComovingDensityDividesByGamma) {
  const SimulationUnits u;
  const Grid3 g = Grid3::cube(24, 1.0);
  const OscillatingBlob b{{}, 2.0, 1.0, {1, 0, 0}, 1.0, 0.5, 0.0};
  const MassFluxState s = sample_scenario(SourceScenario{b}, 0.0, g, u);
  const ScalarField s0 = comoving_density(s, u);
  const double gamma = 1.0 / std::sqrt(1.0 - 0.25);  // speed 0.5 at t = 0
  for (std::size_t n = 0; n < g.size(); ++n)
    if (s.sigma.values[n] > 1e-8) {
      EXPECT_NEAR(s0.values[n] * gamma, s.sigma.values[n], 1e-14);
    }
}

TEST(OscillatingBlob, ContinuityResidualConvergesAtSecondOrder) {
  const SimulationUnits u;
  const OscillatingBlob b{{}, 3.0, 1.0, {0, 0, 1}, 1.0, 2 * pi / 16, 0.0};
  const SourceModel m(b, u);
  double prev = 0.0;
  for (int n : {24, 48}) {
    const double dx = 48.0 / n;
    const Grid3 g = Grid3::cube(n, dx);
    const double dt = 0.5 * dx;
    const double t = 3.0;
    const ContinuityReport r = continuity_residual(sample_scenario(m, t - dt, g), sample_scenario(m, t, g),
                                                   sample_scenario(m, t + dt, g), dt);
    EXPECT_LT(r.norms.max, 0.1 * r.scale);
    if (prev > 0.0) {
      EXPECT_NEAR(std::log2(prev / r.norms.max), 2.0, 0.3);
    }
    prev = r.norms.max;
  }
}

TEST(OscillatingBlob, SuperluminalMotionRejected) {
  const SimulationUnits u;
  EXPECT_THROW(SourceModel(OscillatingBlob{{}, 1.0, 1.0, {0, 0, 1}, 2.0, 1.0, 0.0}, u),
               SuperluminalError);
}

TEST(RotatingRing, FluxIsTangential) {
  const SimulationUnits u;
  const RotatingRing r{{}, 5.0, 0.2, 0.05, 1.0, 0.0};
  const SourceModel m(r, u);
  for (double ang : {0.0, 0.7, 2.0}) {
    const Vec3 x{5.0 * std::cos(ang), 5.0 * std::sin(ang), 0.2};
    const FluxPoint p = m.sample(x, 1.0);
    EXPECT_NEAR(dot(p.s, x), 0.0, 1e-15);
    EXPECT_NEAR(norm(p.s), p.sigma * 0.05 * 5.0, 1e-15);
  }
  EXPECT_NEAR(m.total_mass(), 2 * pi * 5.0 * 0.2, 1e-12);
}

TEST(Support, ContainsTheBody) {
  const SimulationUnits u;
  const SourceModel m(TwoStaticBalls{{{-6, 0, 0}, 0.0, 1.0, 1.0}, {{6, 0, 0}, 1.0, 2.0, 1.0}}, u);
  const auto s = m.support();
  ASSERT_EQ(s.size(), 2u);
  EXPECT_TRUE(s[0].contains({-6, 0, 0}));
  EXPECT_TRUE(s[1].contains({6, 7.9, 0}));
  EXPECT_FALSE(s[1].contains({6, 8.1, 0}));
  EXPECT_NEAR(m.total_mass(), 3.0, 1e-15);
}
