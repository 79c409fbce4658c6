#include <gtest/gtest.h>

#include <cmath>

#include "vecgrav/pipeline.hpp"
#include "vecgrav/potential_solvers.hpp"

using namespace vecgrav;

TEST(SolverConfig, CflBound) {
  SolverConfig c;
  c.cfl = 0.9;
  EXPECT_THROW(c.validate(), StabilityError);
  c.cfl = SolverConfig::max_cfl();
  EXPECT_NO_THROW(c.validate());
  c.cfl = 0.0;
  EXPECT_THROW(c.validate(), StabilityError);
}

TEST(SolverConfig, TimeStepFromCfl) {
  SolverConfig c;
  c.cfl = 0.4;
  EXPECT_DOUBLE_EQ(stable_time_step(Grid3::cube(8, 0.5), c, {2.0, 1.0}), 0.1);
}

TEST(Sponge, ProfileZeroInsideAndGrowsOutward) {
  SolverConfig c;
  c.sponge_width = 4;
  const auto p = sponge_profile(20, c, 0.5);
  EXPECT_EQ(p[0], 0.0);  // shell handled by the boundary condition
  EXPECT_EQ(p[10], 0.0);
  EXPECT_EQ(p[5], 0.0);
  EXPECT_GT(p[1], p[2]);
  EXPECT_GT(p[4], 0.0);
  EXPECT_DOUBLE_EQ(p[1], p[18]);
  EXPECT_NEAR(p[1], -std::expm1(-0.7 * 0.5), 1e-15);
  c.sponge_width = 0;
  for (double v : sponge_profile(20, c, 0.5)) EXPECT_EQ(v, 0.0);
}

TEST(StaticSolver, NewtonianPotentialOutsideBall) {
  const SimulationUnits u;
  const Grid3 g = Grid3::cube(40, 1.0);
  const StaticBall b{{}, 0.0, 1.0, 1.5};
  const MassFluxState src = sample_scenario(SourceScenario{b}, 0.0, g, u);
  const ScalarField phi = solve_static(src.sigma, SolverConfig{}, u);
  double worst = 0.0;
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j)
      for (int k = 0; k < 40; ++k) {
        const double r = norm(g.position(i, j, k));
        if (r > 4.5) worst = std::max(worst, std::abs(phi(i, j, k) + 1.0 / r) * r);
      }
  EXPECT_LT(worst, 0.01);
}

TEST(StaticSolver, ScalesWithKappa) {
  const Grid3 g = Grid3::cube(16, 1.0);
  const MassFluxState src = sample_scenario(SourceScenario{StaticBall{{}, 0.0, 1.0, 1.0}}, 0.0, g, {});
  const ScalarField a = solve_static(src.sigma, SolverConfig{}, {1.0, 1.0});
  const ScalarField b = solve_static(src.sigma, SolverConfig{}, {1.0, 2.0});
  for (std::size_t n = 0; n < g.size(); n += 97) EXPECT_NEAR(b.values[n], 2.0 * a.values[n], 1e-8);
}

TEST(StaticSolver, IterationLimitReported) {
  SolverConfig c;
  c.max_iterations = 2;
  c.static_tolerance = 1e-14;
  const Grid3 g = Grid3::cube(16, 1.0);
  const MassFluxState src = sample_scenario(SourceScenario{StaticBall{{}, 0.0, 1.0, 1.0}}, 0.0, g, {});
  EXPECT_THROW(solve_static(src.sigma, c, {}), IterationLimitError);
}

TEST(Leapfrog, ZeroStateStaysZero) {
  const Grid3 g = Grid3::cube(10, 1.0);
  PotentialState s = zero_state(g, SolverConfig{}, {});
  for (int n = 0; n < 5; ++n) s = step_wave(s, empty_source(g, s.time), SolverConfig{}, {});
  for (double v : s.current.phi.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(s.step, 5);
  EXPECT_DOUBLE_EQ(s.time, 2.5);
}

TEST(Leapfrog, StaticSolutionIsNearlyStationary) {
  const SimulationUnits u;
  const Grid3 g = Grid3::cube(24, 1.0);
  const SourceModel m(StaticBall{{}, 0.0, 1.0, 1.5}, u);
  Simulation sim(m, g, SolverConfig{}, u, InitMode::static_equilibrium);
  const ScalarField phi0 = sim.state().current.phi;
  sim.advance(20);
  double drift = 0.0, scale = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    drift = std::max(drift, std::abs(sim.state().current.phi.values[n] - phi0.values[n]));
    scale = std::max(scale, std::abs(phi0.values[n]));
  }
  EXPECT_LT(drift, 1e-6 * scale);
}

TEST(Leapfrog, RejectsMismatchedSourceGrid) {
  const PotentialState s = zero_state(Grid3::cube(8, 1.0), SolverConfig{}, {});
  EXPECT_THROW(step_wave(s, empty_source(Grid3::cube(9, 1.0), 0.0), SolverConfig{}, {}), ShapeError);
}

TEST(Leapfrog, BitIdenticalAcrossThreadCounts) {
  const SimulationUnits u;
  const Grid3 g = Grid3::cube(20, 1.0);
  SolverConfig c;
  c.sponge_width = 3;
  const SourceModel m(OscillatingBlob{{}, 1.5, 1.0, {0, 0, 1}, 0.5, 2 * pi / 12, 6.0}, u);
  auto run = [&](int threads) {
    set_thread_count(threads);
    Simulation sim(m, g, c, u, InitMode::static_equilibrium);
    sim.advance(15);
    return sim.state().current;
  };
  const PotentialLevel a = run(1);
  const PotentialLevel b = run(4);
  EXPECT_TRUE(a == b);
}

TEST(Retarded, StaticBallFarFieldIsNewtonian) {
  const SimulationUnits u;
  const SourceModel m(StaticBall{{}, 0.0, 2.0, 1.0}, u);
  const RetardedSample r = retarded_potential(m, {12.0, 3.0, -4.0}, 5.0, 48, u);
  EXPECT_NEAR(r.phi, -2.0 / 13.0, 1e-4);
  EXPECT_EQ(norm(r.A), 0.0);
}

TEST(Retarded, ProbeInsideSupportRejected) {
  const SimulationUnits u;
  const SourceModel m(StaticBall{{}, 0.0, 1.0, 1.0}, u);
  EXPECT_THROW(retarded_potential(m, {1.0, 0.0, 0.0}, 0.0, 8, u), ProximityError);
}

TEST(Retarded, UniformlyMovingBlobVectorPotentialFollowsFlux) {
  // Slow blob far away: A ~ (kappa / c^2) M v / r.
  const SimulationUnits u;
  const SourceModel m(OscillatingBlob{{}, 1.0, 1.0, {0, 0, 1}, 0.05, 0.2, 0.0}, u);
  const Vec3 p{30.0, 0.0, 0.0};
  const double t = 40.0;
  const RetardedSample r = retarded_potential(m, p, t, 40, u);
  const double tr = t - 30.0;
  const double v = 0.05 * 0.2 * std::cos(0.2 * tr);
  EXPECT_NEAR(r.A[2], v / 30.0, 0.02 * std::abs(v) / 30.0 + 1e-9);
}
