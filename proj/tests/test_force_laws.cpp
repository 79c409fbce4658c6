#include <gtest/gtest.h>

#include <cmath>

#include "vecgrav/force_laws.hpp"
#include "vecgrav/identity_suite.hpp"

using namespace vecgrav;

TEST(LeviCivita, SignsAndZeros) {
  EXPECT_EQ(levi_civita(0, 1, 2, 3), 1);
  EXPECT_EQ(levi_civita(1, 0, 2, 3), -1);
  EXPECT_EQ(levi_civita(1, 2, 3, 0), -1);
  EXPECT_EQ(levi_civita(3, 2, 1, 0), 1);
  EXPECT_EQ(levi_civita(0, 0, 2, 3), 0);
}

TEST(Dual, IsAntisymmetricAndTwiceDualScales) {
  SampleGenerator gen(3);
  const CMatrix4 X = gen.next_antisymmetric();
  const CMatrix4 D = dual(X);
  const CMatrix4 DD = dual(D);
  for (int k = 0; k < 4; ++k)
    for (int s = 0; s < 4; ++s) {
      EXPECT_LT(std::abs(D[k][s] + D[s][k]), 1e-14);
      // e_ksnm e_nmpq X_pq = 4 X_ks for antisymmetric X in 4 dimensions
      EXPECT_LT(std::abs(DD[k][s] - 4.0 * X[k][s]), 1e-13);
    }
}

TEST(ThetaVariant, TagRoundTrip) {
  for (const char* t : {"1", "2", "3", "1*", "2*", "3*", "6", "7a", "7b", "7c", "6*"})
    EXPECT_EQ(to_string(parse_theta_variant(t)), t);
  EXPECT_THROW(parse_theta_variant("4"), UsageError);
}

TEST(ForceLaws, OrthogonalToVelocityAtRandomPoints) {
  const SimulationUnits u{1.7, 0.3};
  SampleGenerator gen(99, u);
  for (int n = 0; n < 500; ++n) {
    const FourSample x = gen.next();
    for (ThetaVariant v : {ThetaVariant::v1, ThetaVariant::v2, ThetaVariant::v3, ThetaVariant::v1_star})
      EXPECT_LT(orthogonality_defect(g_variant(v, x, u), x.V), 1e-12);
    EXPECT_LT(orthogonality_defect(g_combined({0.3, -2.0, 5.0}, x, u), x.V), 1e-12);
  }
}

TEST(ForceLaws, StationaryMassFeelsMinusSigmaGradPhi) {
  const SimulationUnits u;
  const FourSample x = stationary_sample(2.0, {0.5, -1.0, 0.25}, u);
  const CVector4 g1 = g_variant(ThetaVariant::v1, x, u);
  EXPECT_NEAR(g1[0].real(), -1.0, 1e-15);
  EXPECT_NEAR(g1[1].real(), 2.0, 1e-15);
  EXPECT_NEAR(g1[2].real(), -0.5, 1e-15);
  EXPECT_LT(magnitude(g_variant(ThetaVariant::v2, x, u)), 1e-15);
  EXPECT_LT(magnitude(g_variant(ThetaVariant::v1_star, x, u)), 1e-15);
}

TEST(ForceLaws, DefaultMixingIsVariantOne) {
  const SimulationUnits u;
  SampleGenerator gen(5, u);
  const FourSample x = gen.next();
  const CVector4 a = g_combined(ForceLawParams{}, x, u);
  const CVector4 b = g_variant(ThetaVariant::v1, x, u);
  for (int k = 0; k < 4; ++k) EXPECT_LT(std::abs(a[k] - b[k]), 1e-14 * magnitude(b));
}

TEST(IdentitySuite, AllChecksPassOnASmallSweep) {
  IdentitySuiteSettings s;
  s.samples = 2000;
  const DiagnosticsReport r = run_identity_suite(s);
  EXPECT_GE(r.checks.size(), 12u);
  for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << c.name << " observed " << c.observed;
}

TEST(IdentitySuite, SameSeedSameReport) {
  IdentitySuiteSettings s;
  s.samples = 300;
  EXPECT_EQ(run_identity_suite(s).text(), run_identity_suite(s).text());
  IdentitySuiteSettings t = s;
  t.seed = 1;
  EXPECT_NE(run_identity_suite(s).text(), run_identity_suite(t).text());
}

TEST(IdentitySuite, RejectsNonFiniteParameters) {
  IdentitySuiteSettings s;
  s.params.mu = NAN;
  EXPECT_THROW(run_identity_suite(s), UsageError);
}

TEST(ForceLaws, StarredVariantOneIsImaginaryTimesRealForm) {
  const SimulationUnits u;
  SampleGenerator gen(12, u);
  for (int n = 0; n < 200; ++n) {
    const CVector4 g = g_variant(ThetaVariant::v1_star, gen.next(), u);
    const double scale = magnitude(g);
    for (int a = 0; a < 3; ++a) EXPECT_LE(std::abs(g[a].real()), 1e-12 * scale);
    EXPECT_LE(std::abs(g[3].imag()), 1e-12 * scale);
  }
}
