#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "vecgrav/operators.hpp"
#include "vecgrav/parallel.hpp"
#include "vecgrav/units.hpp"

using namespace vecgrav;

TEST(Units, LorentzFactorAtThreeFifthsC) {
  const SimulationUnits u;
  EXPECT_NEAR(lorentz_factor({0.6, 0.0, 0.0}, u), 1.25, 1e-15);
  const SimulationUnits u3{3.0, 1.0};
  EXPECT_NEAR(lorentz_factor({0.0, 1.8, 0.0}, u3), 1.25, 1e-15);
}

TEST(Units, FourVelocityComponents) {
  const SimulationUnits u;
  const auto V = four_velocity({0.6, 0.0, 0.0}, u);
  EXPECT_NEAR(V[0].real(), 0.75, 1e-15);
  EXPECT_EQ(V[1], Complex(0.0));
  EXPECT_EQ(V[2], Complex(0.0));
  EXPECT_DOUBLE_EQ(V[3].real(), 0.0);
  EXPECT_NEAR(V[3].imag(), 1.25, 1e-15);
}

TEST(Units, FourVelocityNormIsMinusCSquared) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-0.55, 0.55);
  for (double c : {1.0, 2.5, 299.0}) {
    const SimulationUnits u{c, 1.0};
    for (int n = 0; n < 200; ++n) {
      const Vec3 v{d(rng) * c, d(rng) * c, d(rng) * c};
      const Complex s = minkowski_square(four_velocity(v, u));
      EXPECT_NEAR(s.real(), -c * c, 1e-12 * c * c);
      EXPECT_NEAR(s.imag(), 0.0, 1e-12 * c * c);
    }
  }
}

TEST(Units, SuperluminalVelocityRejected) {
  const SimulationUnits u;
  EXPECT_THROW(lorentz_factor({1.0, 0.0, 0.0}, u), SuperluminalError);
  EXPECT_THROW(four_velocity({0.8, 0.7, 0.0}, u), SuperluminalError);
}

TEST(Units, InvalidUnitsRejected) {
  EXPECT_THROW((SimulationUnits{0.0, 1.0}.validate()), UsageError);
  EXPECT_THROW((SimulationUnits{1.0, -1.0}.validate()), UsageError);
  EXPECT_THROW((SimulationUnits{INFINITY, 1.0}.validate()), UsageError);
}

TEST(RealForm, PotentialRoundTripIsExactForPowerOfTwoC) {
  using RF = RealFormConventions;
  const RF::RealPotential p{-0.3125, {1.5, -2.25, 0.125}};
  for (double c : {1.0, 2.0, 0.5}) EXPECT_EQ(RF::potential_from_four(RF::potential_to_four(p, c), c), p);
}

TEST(RealForm, PotentialRoundTripWithinRoundoff) {
  using RF = RealFormConventions;
  const RF::RealPotential p{-0.3, {0.1, 0.2, -0.7}};
  const auto q = RF::potential_from_four(RF::potential_to_four(p, 3.0), 3.0);
  EXPECT_NEAR(q.phi, p.phi, 1e-16);
  EXPECT_EQ(q.A, p.A);
}

TEST(RealForm, FourthComponentsFollowImaginaryTime) {
  using RF = RealFormConventions;
  const double c = 2.0;
  EXPECT_EQ(RF::potential_to_four({4.0, {}}, c)[3], Complex(0.0, -2.0));
  EXPECT_EQ(RF::flux_to_four({3.0, {}}, c)[3], Complex(0.0, 6.0));
  EXPECT_EQ(RF::position_to_four({}, 1.5, c)[3], Complex(0.0, 3.0));
  const RF::RealFlux f{0.75, {0.5, 0.0, -0.25}};
  EXPECT_EQ(RF::flux_from_four(RF::flux_to_four(f, c), c), f);
}

TEST(Grid, RejectsDegenerateShapes) {
  EXPECT_THROW((Grid3{{2, 8, 8}, 1.0, {}}.validate()), ShapeError);
  EXPECT_THROW((Grid3{{8, 8, 8}, 0.0, {}}.validate()), ShapeError);
  EXPECT_NO_THROW(Grid3::cube(3, 0.1).validate());
}

TEST(Grid, CenteredGridIsSymmetricAndZFastest) {
  const Grid3 g = Grid3::centered({4, 5, 6}, 0.5);
  for (int a = 0; a < 3; ++a) EXPECT_DOUBLE_EQ(g.origin[a], -g.upper()[a]);
  EXPECT_EQ(g.index(0, 0, 1), 1u);
  EXPECT_EQ(g.index(0, 1, 0), 6u);
  EXPECT_EQ(g.index(1, 0, 0), 30u);
  EXPECT_EQ(g.size(), 120u);
}

TEST(Grid, NormsOfConstantField) {
  const Grid3 g = Grid3::cube(10, 0.5);
  const ScalarField f(g, 2.0);
  const IndexRegion r = interior_region(g, 1);
  const Norms n = norms(f, r);
  EXPECT_DOUBLE_EQ(n.max, 2.0);
  // sqrt(sum 4 dx^3) over 8^3 cells
  EXPECT_NEAR(n.l2, std::sqrt(4.0 * 512 * 0.125), 1e-12);
}

namespace {

Norms interior_error(const ScalarField& f, const std::function<double(const Vec3&)>& exact, int margin) {
  const Grid3& g = f.grid;
  const ScalarField e = sample_scalar(g, exact);
  ScalarField d(g);
  for (std::size_t n = 0; n < g.size(); ++n) d.values[n] = f.values[n] - e.values[n];
  return norms(d, interior_region(g, margin));
}

}  // namespace

TEST(Operators, CentralDifferenceExactOnQuadratics) {
  const Grid3 g = Grid3::cube(9, 0.25);
  const ScalarField f = sample_scalar(g, [](const Vec3& x) {
    return 3.0 * x[0] * x[0] - 2.0 * x[1] * x[2] + x[2] - 0.5;
  });
  const VectorField df = grad(f);
  EXPECT_LT(interior_error(df[0], [](const Vec3& x) { return 6.0 * x[0]; }, 1).max, 1e-13);
  EXPECT_LT(interior_error(df[1], [](const Vec3& x) { return -2.0 * x[2]; }, 1).max, 1e-13);
  EXPECT_LT(interior_error(df[2], [](const Vec3& x) { return -2.0 * x[1] + 1.0; }, 1).max, 1e-13);
  EXPECT_LT(interior_error(laplacian(f), [](const Vec3&) { return 6.0; }, 1).max, 1e-12);
}

TEST(Operators, DiscreteDivCurlAndCurlGradVanish) {
  const Grid3 g = Grid3::cube(12, 0.3);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  VectorField A(g);
  ScalarField phi(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    A.set(n, {nd(rng), nd(rng), nd(rng)});
    phi.values[n] = nd(rng);
  }
  const IndexRegion inner = interior_region(g, 2);
  EXPECT_LT(norms(div(curl(A)), inner).max, 1e-12);
  EXPECT_LT(norms(curl(grad(phi)), inner).max, 1e-12);
}

TEST(Operators, SecondOrderUnderRefinement) {
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    const double dx = 2.0 * pi / n;
    const Grid3 g{{n, 5, 5}, dx, {0.0, 0.0, 0.0}};
    const ScalarField f = sample_scalar(g, [](const Vec3& x) { return std::sin(x[0]); });
    const double err = interior_error(derivative(f, 0), [](const Vec3& x) { return std::cos(x[0]); }, 1).max;
    if (prev > 0.0) EXPECT_NEAR(prev / err, 4.0, 0.1);
    prev = err;
  }
}

TEST(Parallel, OrderedSumIndependentOfThreadCount) {
  auto term = [](long i) { return 1.0 / (1.0 + static_cast<double>(i) * 1e-3) * (i % 3 == 0 ? -1.0 : 1.0); };
  set_thread_count(1);
  const double one = ordered_sum(100000, term);
  set_thread_count(4);
  const double four = ordered_sum(100000, term);
  EXPECT_EQ(one, four);
}
