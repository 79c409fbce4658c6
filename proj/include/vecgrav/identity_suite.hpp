#pragma once

// Seeded property sweep over the force-law catalog. Every check reports the
// worst deviation seen over all samples.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>

#include "vecgrav/energy_momentum.hpp"
#include "vecgrav/force_laws.hpp"
#include "vecgrav/report.hpp"

namespace vecgrav {

struct IdentitySuiteSettings {
  long samples = 100000;
  std::uint64_t seed = 20240917;
  ForceLawParams params{};
  double tolerance = 1e-12;
};

namespace detail {

inline double antisymmetry_defect(const CMatrix4& m) {
  double dev = 0.0;
  for (int k = 0; k < 4; ++k)
    for (int s = 0; s < 4; ++s) dev = std::max(dev, std::abs(m[k][s] + m[s][k]));
  const double scale = max_abs(m);
  return scale > 0.0 ? dev / scale : dev;
}

/// max_k |a_k - b_k| / max(|a|, |b|, floor).
inline double relative_gap(const CVector4& a, const CVector4& b, double floor) {
  double dev = 0.0;
  for (int k = 0; k < 4; ++k) dev = std::max(dev, std::abs(a[k] - b[k]));
  return dev / std::max({magnitude(a), magnitude(b), floor});
}

/// Largest |Im| of spatial components and |Re| of the temporal one,
/// relative to |g|.
inline double real_form_defect(const CVector4& g) {
  const double scale = magnitude(g);
  if (scale == 0.0) return 0.0;
  double dev = std::abs(g[3].real());
  for (int a = 0; a < 3; ++a) dev = std::max(dev, std::abs(g[a].imag()));
  return dev / scale;
}

}  // namespace detail

inline DiagnosticsReport run_identity_suite(const IdentitySuiteSettings& s,
                                            const SimulationUnits& units = {}) {
  units.validate();
  if (s.samples < 1) throw UsageError("identity suite: need at least one sample");
  for (double p : {s.params.lambda, s.params.mu, s.params.nu})
    if (!std::isfinite(p)) throw UsageError("identity suite: force-law parameters must be finite");

  using V = ThetaVariant;
  SampleGenerator gen(s.seed, units);

  double orth1 = 0, orth2 = 0, orth3 = 0, orth1s = 0, orth_cfg = 0, orth_any = 0;
  double tv1 = 0, tv2 = 0, tv3 = 0, tv1s = 0, tv6 = 0, tv7b = 0, tv7c = 0, tv7a = 0;
  double anti = 0, dual2 = 0, dual3 = 0, theta4_sym = 0, theta5_sym = 0;
  double real_form = 0, combined_default = 0, combined_zero = 0, vnorm = 0;
  double six_star_min = std::numeric_limits<double>::infinity();
  double theta4_generic_min = std::numeric_limits<double>::infinity();

  for (long n = 0; n < s.samples; ++n) {
    const FourSample x = gen.next();
    const CVector4 g1 = g_variant(V::v1, x, units);
    const CVector4 g2 = g_variant(V::v2, x, units);
    const CVector4 g3 = g_variant(V::v3, x, units);
    const CVector4 g1s = g_variant(V::v1_star, x, units);
    orth1 = std::max(orth1, orthogonality_defect(g1, x.V));
    orth2 = std::max(orth2, orthogonality_defect(g2, x.V));
    orth3 = std::max(orth3, orthogonality_defect(g3, x.V));
    orth1s = std::max(orth1s, orthogonality_defect(g1s, x.V));
    orth_cfg = std::max(orth_cfg, orthogonality_defect(g_combined(s.params, x, units), x.V));
    const ForceLawParams random_params{gen.normal(), gen.normal(), gen.normal()};
    orth_any = std::max(orth_any, orthogonality_defect(g_combined(random_params, x, units), x.V));
    combined_default = std::max(
        combined_default, detail::relative_gap(g_combined({1.0, 0.0, 0.0}, x, units), g1, 0.0));
    combined_zero = std::max(
        combined_zero, detail::relative_gap(g_combined({0.0, 0.0, 0.0}, x, units), g3, 0.0));

    tv1 = std::max(tv1, theta_vs_direct(V::v1, x, units).relative);
    tv2 = std::max(tv2, theta_vs_direct(V::v2, x, units).relative);
    tv3 = std::max(tv3, theta_vs_direct(V::v3, x, units).relative);
    tv1s = std::max(tv1s, theta_vs_direct(V::v1_star, x, units).relative);
    tv6 = std::max(tv6, theta_vs_direct(V::v6, x, units).relative);
    tv7b = std::max(tv7b, theta_vs_direct(V::v7b, x, units).relative);
    tv7c = std::max(tv7c, theta_vs_direct(V::v7c, x, units).relative);
    {
      // Theta(7a) V is the negative of g(6).
      const CVector4 via = matvec(theta(V::v7a, x, units).m, x.V);
      const CVector4 g6 = g_remark(V::v6, x, units);
      CVector4 neg{};
      for (int k = 0; k < 4; ++k) neg[k] = -g6[k];
      tv7a = std::max(tv7a, detail::relative_gap(via, neg, 0.0));
    }

    for (V v : {V::v1, V::v2, V::v3, V::v1_star, V::v2_star, V::v3_star, V::v6, V::v7a,
                V::v7b, V::v7c, V::v6_star})
      anti = std::max(anti, detail::antisymmetry_defect(theta(v, x, units).m));

    const DualNullity dn = dual_nullity_check(x, units, s.tolerance);
    dual2 = std::max(dual2, dn.theta2_star_defect);
    dual3 = std::max(dual3, dn.theta3_star_defect);
    six_star_min = std::min(six_star_min, dn.theta6_star_norm);

    // Symmetric ansaetze from velocity monomials, with random weights.
    const CMatrix4 M = velocity_monomial_M(x.V, units.c);
    const CTensor4 N = velocity_monomial_N(
        x.V, units.c, {gen.normal(), gen.normal(), gen.normal(), gen.normal()});
    Complex trace{};
    for (int k = 0; k < 4; ++k) trace += x.dPhi[k][k];
    const double t4_scale = x.sigma0 * max_abs(M) * std::max(std::abs(trace), 1.0);
    theta4_sym = std::max(theta4_sym, max_abs(theta4(M, x)) / t4_scale);
    double n_scale = 0.0;
    for (const auto& a : N)
      for (const auto& b : a) n_scale = std::max(n_scale, max_abs(b));
    theta5_sym = std::max(theta5_sym, max_abs(theta5(N, x)) / (x.sigma0 * n_scale * max_abs(x.dPhi)));
    // Control: a non-symmetric M does not cancel.
    CMatrix4 skewed = M;
    skewed[0][1] += 1.0;
    if (std::abs(trace) > 1e-3)
      theta4_generic_min = std::min(theta4_generic_min, max_abs(theta4(skewed, x)));

    for (const CVector4& g : {g1, g2, g3})
      real_form = std::max(real_form, detail::real_form_defect(g));
    vnorm = std::max(vnorm, std::abs(contract(x.V, x.V) + units.c * units.c) / (units.c * units.c));
  }

  // Mass at rest in a static field.
  double stat2 = 0, stat1s = 0, stat31 = 0, stat_newton = 0;
  const long stationary = std::max(1L, s.samples / 10);
  for (long n = 0; n < stationary; ++n) {
    const double sigma0 = 0.1 + std::abs(gen.normal());
    const Vec3 grad_phi{gen.normal(), gen.normal(), gen.normal()};
    const FourSample x = stationary_sample(sigma0, grad_phi, units);
    const CVector4 g1 = g_variant(V::v1, x, units);
    const double scale = sigma0 * norm(grad_phi);
    stat2 = std::max(stat2, magnitude(g_variant(V::v2, x, units)) / scale);
    stat1s = std::max(stat1s, magnitude(g_variant(V::v1_star, x, units)) / scale);
    stat31 = std::max(stat31, detail::relative_gap(g_variant(V::v3, x, units), g1, scale));
    for (int a = 0; a < 3; ++a)
      stat_newton = std::max(stat_newton, std::abs(g1[a] - Complex(-sigma0 * grad_phi[a], 0.0)) / scale);
  }

  const double tol = s.tolerance;
  DiagnosticsReport r;
  r.title = "force-law identities";
  r.notes.push_back("samples " + std::to_string(s.samples) + ", stationary samples " +
                    std::to_string(stationary) + ", seed " + std::to_string(s.seed));
  r.notes.push_back("lambda " + DiagnosticsReport::format(s.params.lambda) + ", mu " +
                    DiagnosticsReport::format(s.params.mu) + ", nu " +
                    DiagnosticsReport::format(s.params.nu));
  r.at_most("sample V.V = -c^2", vnorm, tol);
  r.at_most("g(1).V = 0", orth1, tol);
  r.at_most("g(2).V = 0", orth2, tol);
  r.at_most("g(3).V = 0", orth3, tol);
  r.at_most("g(1*).V = 0", orth1s, tol);
  r.at_most("g(lambda,mu,nu).V = 0 at configured parameters", orth_cfg, tol);
  r.at_most("g(lambda,mu,nu).V = 0 at random parameters", orth_any, tol);
  r.at_most("g at (1,0,0) equals g(1)", combined_default, tol);
  r.at_most("g at (0,0,0) equals g(3)", combined_zero, tol);
  r.at_most("Theta antisymmetric (all variants)", anti, tol);
  r.at_most("Theta(1) V matches closed form", tv1, tol);
  r.at_most("Theta(2) V matches closed form", tv2, tol);
  r.at_most("Theta(3) V matches closed form", tv3, tol);
  r.at_most("Theta(1*) V matches closed form", tv1s, tol);
  r.at_most("Theta(6) V matches closed form", tv6, tol);
  r.at_most("Theta(7a) V equals -g(6)", tv7a, tol);
  r.at_most("Theta(7b) V matches closed form", tv7b, tol);
  r.at_most("Theta(7c) V matches closed form", tv7c, tol);
  r.at_most("Theta(2*) V = 0", dual2, tol);
  r.at_most("Theta(3*) V = 0", dual3, tol);
  r.at_least("Theta(6*) V nonzero (smallest norm)", six_star_min, 1e-8);
  r.at_most("Theta(4) = 0 for symmetric M", theta4_sym, tol);
  r.at_most("Theta(5) = 0 for symmetric N", theta5_sym, tol);
  r.at_least("Theta(4) nonzero for non-symmetric M (smallest norm)", theta4_generic_min, 1e-8);
  r.at_most("g(1), g(2), g(3) real spatial / imaginary temporal", real_form, tol);
  r.at_most("stationary: g(2) = 0", stat2, tol);
  r.at_most("stationary: g(1*) = 0", stat1s, tol);
  r.at_most("stationary: g(3) = g(1)", stat31, tol);
  r.at_most("stationary: spatial g(1) = -sigma0 grad phi", stat_newton, tol);
  return r;
}

struct StressSuiteSettings {
  long samples = 10000;
  std::uint64_t seed = 20240917;
  double tolerance = 1e-12;
};

/// Algebraic properties of tau at random L: symmetry and zero trace for
/// generic antisymmetric L, and agreement of tau from L with the F, G
/// closed forms for field-derived L.
inline DiagnosticsReport run_stress_suite(const StressSuiteSettings& s,
                                          const SimulationUnits& units = {}) {
  units.validate();
  if (s.samples < 1) throw UsageError("stress suite: need at least one sample");
  SampleGenerator gen(s.seed, units);
  double sym = 0, trace = 0, w_gap = 0, s_gap = 0, p_gap = 0, t_gap = 0, w_sign = -1e300;
  for (long n = 0; n < s.samples; ++n) {
    const CMatrix4 tau = stress_from_L(gen.next_antisymmetric(), units);
    const double scale = max_abs(tau);
    double dev = 0.0;
    Complex tr{};
    for (int k = 0; k < 4; ++k) {
      tr += tau[k][k];
      for (int m = 0; m < 4; ++m) dev = std::max(dev, std::abs(tau[k][m] - tau[m][k]));
    }
    sym = std::max(sym, dev / scale);
    trace = std::max(trace, std::abs(tr) / scale);

    const auto [F, G] = gen.next_fields();
    const StressSample a = extract_stress(stress_from_L(l_tensor_from_fields(F, G, units), units), units);
    const StressSample b = stress_from_fields(F, G, units);
    const double ws = std::abs(b.W);
    w_gap = std::max(w_gap, std::abs(a.W - b.W) / ws);
    s_gap = std::max(s_gap, norm(a.S - b.S) / (ws * units.c));
    p_gap = std::max(p_gap, norm(a.p - b.p) / (ws / units.c));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t_gap = std::max(t_gap, std::abs(a.T[i][j] - b.T[i][j]) / ws);
    w_sign = std::max(w_sign, b.W);
  }
  DiagnosticsReport r;
  r.title = "stress tensor identities";
  r.notes.push_back("samples " + std::to_string(s.samples) + ", seed " + std::to_string(s.seed));
  r.at_most("tau symmetric", sym, s.tolerance);
  r.at_most("tau traceless", trace, s.tolerance);
  r.at_most("W = tau_44 matches -(F^2 + c^2 G^2)/(8 pi kappa)", w_gap, s.tolerance);
  r.at_most("S from tau matches -c^2/(4 pi kappa) F x G", s_gap, s.tolerance);
  r.at_most("p from tau matches S / c^2", p_gap, s.tolerance);
  r.at_most("T from tau matches the F, G form", t_gap, s.tolerance);
  r.at_most("W <= 0 at every sample", w_sign, 0.0);
  return r;
}

}  // namespace vecgrav
