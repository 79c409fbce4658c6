#pragma once

// Pointwise catalog of candidate 4-force densities g_k = Theta_ks V_s built
// from antisymmetric matrices, evaluated in exact complex index form
// (x4 = i c t). Indices run 0..3 for the 1..4 of the index notation.

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <string>

#include "vecgrav/errors.hpp"
#include "vecgrav/units.hpp"

namespace vecgrav {

using CMatrix4 = Matrix4<Complex>;
using CVector4 = FourVector<Complex>;

enum class ThetaVariant { v1, v2, v3, v1_star, v2_star, v3_star, v6, v7a, v7b, v7c, v6_star };

inline std::string to_string(ThetaVariant v) {
  switch (v) {
    case ThetaVariant::v1: return "1";
    case ThetaVariant::v2: return "2";
    case ThetaVariant::v3: return "3";
    case ThetaVariant::v1_star: return "1*";
    case ThetaVariant::v2_star: return "2*";
    case ThetaVariant::v3_star: return "3*";
    case ThetaVariant::v6: return "6";
    case ThetaVariant::v7a: return "7a";
    case ThetaVariant::v7b: return "7b";
    case ThetaVariant::v7c: return "7c";
    case ThetaVariant::v6_star: return "6*";
  }
  return "?";
}

inline ThetaVariant parse_theta_variant(const std::string& tag) {
  for (ThetaVariant v : {ThetaVariant::v1, ThetaVariant::v2, ThetaVariant::v3,
                         ThetaVariant::v1_star, ThetaVariant::v2_star, ThetaVariant::v3_star,
                         ThetaVariant::v6, ThetaVariant::v7a, ThetaVariant::v7b,
                         ThetaVariant::v7c, ThetaVariant::v6_star})
    if (to_string(v) == tag) return v;
  throw UsageError("unknown Theta variant '" + tag + "'");
}

/// Pointwise data: comoving density, 4-velocity, dPhi[j][n] = d_j Phi_n,
/// the potentials Phi_n and (optionally) dV[n][j] = d_n V_j.
struct FourSample {
  double sigma0 = 0.0;
  CVector4 V{};
  CMatrix4 dPhi{};
  CVector4 Phi{};
  std::optional<CMatrix4> dV;
};

struct ThetaMatrix {
  CMatrix4 m{};
  ThetaVariant variant = ThetaVariant::v1;
};

/// Mixing coefficients of g = lambda g(1) + (1-lambda) g(3) + mu g(2) + nu g(1*).
struct ForceLawParams {
  double lambda = 1.0;
  double mu = 0.0;
  double nu = 0.0;
  friend bool operator==(const ForceLawParams&, const ForceLawParams&) = default;
};

/// Totally antisymmetric symbol with e(0,1,2,3) = +1.
inline int levi_civita(int k, int s, int n, int m) {
  const std::array<int, 4> p{k, s, n, m};
  int sign = 1;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      if (p[a] == p[b]) return 0;
      if (p[a] > p[b]) sign = -sign;
    }
  return sign;
}

/// (*X)_ks = e_ksnm X_nm.
inline CMatrix4 dual(const CMatrix4& X) {
  CMatrix4 out{};
  for (int k = 0; k < 4; ++k)
    for (int s = 0; s < 4; ++s) {
      Complex acc{};
      for (int n = 0; n < 4; ++n)
        for (int m = 0; m < 4; ++m) {
          const int e = levi_civita(k, s, n, m);
          if (e != 0) acc += static_cast<double>(e) * X[n][m];
        }
      out[k][s] = acc;
    }
  return out;
}

inline CVector4 matvec(const CMatrix4& M, const CVector4& v) {
  CVector4 out{};
  for (int k = 0; k < 4; ++k)
    for (int s = 0; s < 4; ++s) out[k] += M[k][s] * v[s];
  return out;
}

inline Complex contract(const CVector4& a, const CVector4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

/// Euclidean norm of the complex components.
inline double magnitude(const CVector4& a) {
  double s = 0.0;
  for (const Complex& z : a) s += std::norm(z);
  return std::sqrt(s);
}

inline double max_abs(const CMatrix4& M) {
  double m = 0.0;
  for (const auto& row : M)
    for (const Complex& z : row) m = std::max(m, std::abs(z));
  return m;
}

namespace detail {

/// X_ks - X_sk: antisymmetric by construction.
inline CMatrix4 antisymmetrize(const CMatrix4& X) {
  CMatrix4 out{};
  for (int k = 0; k < 4; ++k)
    for (int s = 0; s < 4; ++s) out[k][s] = X[k][s] - X[s][k];
  return out;
}

inline const CMatrix4& require_dV(const FourSample& sample, const char* what) {
  if (!sample.dV) throw UsageError(std::string(what) + ": sample carries no dV");
  return *sample.dV;
}

inline CMatrix4 generator(ThetaVariant variant, const FourSample& x, double c) {
  const double c2 = 1.0 / (c * c);
  const double s0 = x.sigma0;
  const CVector4& V = x.V;
  const CMatrix4& dP = x.dPhi;
  CMatrix4 X{};
  switch (variant) {
    case ThetaVariant::v1:
    case ThetaVariant::v1_star:
      for (int k = 0; k < 4; ++k)
        for (int s = 0; s < 4; ++s) X[k][s] = -s0 * dP[k][s];
      break;
    case ThetaVariant::v2:
    case ThetaVariant::v2_star: {
      // a_k = V_n d_n Phi_k
      CVector4 a{};
      for (int k = 0; k < 4; ++k)
        for (int n = 0; n < 4; ++n) a[k] += V[n] * dP[n][k];
      for (int k = 0; k < 4; ++k)
        for (int s = 0; s < 4; ++s) X[k][s] = s0 * c2 * V[s] * a[k];
      break;
    }
    case ThetaVariant::v3:
    case ThetaVariant::v3_star: {
      // b_k = V_n d_k Phi_n
      CVector4 b{};
      for (int k = 0; k < 4; ++k)
        for (int n = 0; n < 4; ++n) b[k] += V[n] * dP[k][n];
      for (int k = 0; k < 4; ++k)
        for (int s = 0; s < 4; ++s) X[k][s] = s0 * c2 * V[s] * b[k];
      break;
    }
    case ThetaVariant::v6:
    case ThetaVariant::v6_star: {
      const CMatrix4& dV = require_dV(x, "theta(6)");
      // u_k = V_n d_n V_k
      CVector4 u{};
      for (int k = 0; k < 4; ++k)
        for (int n = 0; n < 4; ++n) u[k] += V[n] * dV[n][k];
      for (int k = 0; k < 4; ++k)
        for (int s = 0; s < 4; ++s) X[k][s] = c2 * s0 * x.Phi[s] * u[k];
      break;
    }
    case ThetaVariant::v7a: {
      const CMatrix4& dV = require_dV(x, "theta(7a)");
      const Complex vp = contract(V, x.Phi);
      for (int k = 0; k < 4; ++k)
        for (int s = 0; s < 4; ++s) X[k][s] = c2 * s0 * vp * dV[k][s];
      break;
    }
    case ThetaVariant::v7b: {
      const CMatrix4& dV = require_dV(x, "theta(7b)");
      // w_s = Phi_n d_n V_s
      CVector4 w{};
      for (int s = 0; s < 4; ++s)
        for (int n = 0; n < 4; ++n) w[s] += x.Phi[n] * dV[n][s];
      for (int k = 0; k < 4; ++k)
        for (int s = 0; s < 4; ++s) X[k][s] = c2 * s0 * V[k] * w[s];
      break;
    }
    case ThetaVariant::v7c: {
      const CMatrix4& dV = require_dV(x, "theta(7c)");
      // y_s = Phi_n d_s V_n
      CVector4 y{};
      for (int s = 0; s < 4; ++s)
        for (int n = 0; n < 4; ++n) y[s] += x.Phi[n] * dV[s][n];
      for (int k = 0; k < 4; ++k)
        for (int s = 0; s < 4; ++s) X[k][s] = c2 * s0 * V[k] * y[s];
      break;
    }
  }
  return X;
}

inline bool is_dual(ThetaVariant v) {
  return v == ThetaVariant::v1_star || v == ThetaVariant::v2_star ||
         v == ThetaVariant::v3_star || v == ThetaVariant::v6_star;
}

}  // namespace detail

inline ThetaMatrix theta(ThetaVariant variant, const FourSample& sample,
                         const SimulationUnits& units) {
  CMatrix4 m = detail::antisymmetrize(detail::generator(variant, sample, units.c));
  if (detail::is_dual(variant)) m = dual(m);
  return {m, variant};
}

/// Theta(4)_ks = sigma0 (M_sk - M_ks) d_n Phi_n for a caller-supplied M.
inline CMatrix4 theta4(const CMatrix4& M, const FourSample& x) {
  Complex trace{};
  for (int n = 0; n < 4; ++n) trace += x.dPhi[n][n];
  CMatrix4 out{};
  for (int k = 0; k < 4; ++k)
    for (int s = 0; s < 4; ++s) out[k][s] = x.sigma0 * (M[s][k] - M[k][s]) * trace;
  return out;
}

/// Rank-4 tensor N[s][k][m][n].
using CTensor4 = std::array<std::array<CMatrix4, 4>, 4>;

/// Theta(5)_ks = sigma0 (N_skmn - N_ksmn) d_n Phi_m.
inline CMatrix4 theta5(const CTensor4& N, const FourSample& x) {
  CMatrix4 out{};
  for (int k = 0; k < 4; ++k)
    for (int s = 0; s < 4; ++s) {
      Complex acc{};
      for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) acc += (N[s][k][m][n] - N[k][s][m][n]) * x.dPhi[n][m];
      out[k][s] = x.sigma0 * acc;
    }
  return out;
}

/// Dimensionless symmetric M built from c^-1 V: M_sk = c^-2 V_s V_k.
inline CMatrix4 velocity_monomial_M(const CVector4& V, double c) {
  CMatrix4 M{};
  for (int s = 0; s < 4; ++s)
    for (int k = 0; k < 4; ++k) M[s][k] = V[s] * V[k] / (c * c);
  return M;
}

/// Dimensionless N symmetric in its first index pair, built from c^-1 V and
/// the Kronecker delta with weights w = (w0, w1, w2, w3) on
///   c^-4 V_s V_k V_m V_n, c^-2 V_s V_k delta_mn, delta_sk c^-2 V_m V_n,
///   delta_sk delta_mn.
inline CTensor4 velocity_monomial_N(const CVector4& V, double c,
                                    const std::array<double, 4>& w) {
  CTensor4 N{};
  const double ic2 = 1.0 / (c * c);
  for (int s = 0; s < 4; ++s)
    for (int k = 0; k < 4; ++k)
      for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
          const double dsk = s == k ? 1.0 : 0.0;
          const double dmn = m == n ? 1.0 : 0.0;
          N[s][k][m][n] = w[0] * ic2 * ic2 * V[s] * V[k] * V[m] * V[n] +
                          w[1] * ic2 * V[s] * V[k] * dmn + w[2] * dsk * ic2 * V[m] * V[n] +
                          w[3] * dsk * dmn;
        }
  return N;
}

/// Closed forms of the four admissible force laws.
inline CVector4 g_variant(ThetaVariant variant, const FourSample& x,
                          const SimulationUnits& units) {
  const double c2 = 1.0 / (units.c * units.c);
  const CVector4& V = x.V;
  const CMatrix4& dP = x.dPhi;
  const double s0 = x.sigma0;
  CVector4 g{};
  switch (variant) {
    case ThetaVariant::v1:
      // -sigma0 V_s (d_k Phi_s - d_s Phi_k)
      for (int k = 0; k < 4; ++k)
        for (int s = 0; s < 4; ++s) g[k] += -s0 * V[s] * (dP[k][s] - dP[s][k]);
      break;
    case ThetaVariant::v2:
      // -sigma0 V_n d_n Phi_k - sigma0 c^-2 V_n V_s V_k d_n Phi_s
      for (int k = 0; k < 4; ++k) {
        Complex a{}, b{};
        for (int n = 0; n < 4; ++n) {
          a += V[n] * dP[n][k];
          for (int s = 0; s < 4; ++s) b += V[n] * V[s] * dP[n][s];
        }
        g[k] = -s0 * a - s0 * c2 * V[k] * b;
      }
      break;
    case ThetaVariant::v3:
      // -sigma0 V_n d_k Phi_n - sigma0 c^-2 V_n V_s V_k d_s Phi_n
      for (int k = 0; k < 4; ++k) {
        Complex a{}, b{};
        for (int n = 0; n < 4; ++n) {
          a += V[n] * dP[k][n];
          for (int s = 0; s < 4; ++s) b += V[n] * V[s] * dP[s][n];
        }
        g[k] = -s0 * a - s0 * c2 * V[k] * b;
      }
      break;
    case ThetaVariant::v1_star:
      // -sigma0 e_ksnm V_s (d_n Phi_m - d_m Phi_n)
      for (int k = 0; k < 4; ++k)
        for (int s = 0; s < 4; ++s)
          for (int n = 0; n < 4; ++n)
            for (int m = 0; m < 4; ++m) {
              const int e = levi_civita(k, s, n, m);
              if (e != 0) g[k] += -s0 * static_cast<double>(e) * V[s] * (dP[n][m] - dP[m][n]);
            }
      break;
    default:
      throw UsageError("g_variant: variant " + to_string(variant) +
                       " has no closed form among the admissible laws");
  }
  return g;
}

inline CVector4 g_combined(const ForceLawParams& p, const FourSample& x,
                           const SimulationUnits& units) {
  const CVector4 g1 = g_variant(ThetaVariant::v1, x, units);
  const CVector4 g2 = g_variant(ThetaVariant::v2, x, units);
  const CVector4 g3 = g_variant(ThetaVariant::v3, x, units);
  const CVector4 g1s = g_variant(ThetaVariant::v1_star, x, units);
  CVector4 g{};
  for (int k = 0; k < 4; ++k)
    g[k] = p.lambda * g1[k] + (1.0 - p.lambda) * g3[k] + p.mu * g2[k] + p.nu * g1s[k];
  return g;
}

/// Closed forms of the potential-linear terms g(6), g(7b), g(7c).
inline CVector4 g_remark(ThetaVariant variant, const FourSample& x,
                         const SimulationUnits& units) {
  const CMatrix4& dV = detail::require_dV(x, "g_remark");
  const double c2 = 1.0 / (units.c * units.c);
  const CVector4& V = x.V;
  const CVector4& P = x.Phi;
  const double s0 = x.sigma0;
  CVector4 g{};
  switch (variant) {
    case ThetaVariant::v6: {
      // c^-2 sigma0 Phi_s V_s V_n d_n V_k
      const Complex pv = contract(P, V);
      for (int k = 0; k < 4; ++k)
        for (int n = 0; n < 4; ++n) g[k] += c2 * s0 * pv * V[n] * dV[n][k];
      break;
    }
    case ThetaVariant::v7b:
      // sigma0 Phi_n d_n V_k
      for (int k = 0; k < 4; ++k)
        for (int n = 0; n < 4; ++n) g[k] += s0 * P[n] * dV[n][k];
      break;
    case ThetaVariant::v7c: {
      // sigma0 Phi_n (d_k V_n + c^-2 V_k V_s d_s V_n)
      Complex b{};
      for (int n = 0; n < 4; ++n)
        for (int s = 0; s < 4; ++s) b += P[n] * V[s] * dV[s][n];
      for (int k = 0; k < 4; ++k) {
        Complex a{};
        for (int n = 0; n < 4; ++n) a += P[n] * dV[k][n];
        g[k] = s0 * a + s0 * c2 * V[k] * b;
      }
      break;
    }
    default:
      throw UsageError("g_remark: variant " + to_string(variant) + " is not 6, 7b or 7c");
  }
  return g;
}

/// Deviation between Theta V and a closed form, absolute and relative to
/// the term scale max|Theta| * sum|V_s|.
struct Deviation {
  double absolute = 0.0;
  double relative = 0.0;
};

inline Deviation theta_vs_direct(ThetaVariant variant, const FourSample& x,
                                 const SimulationUnits& units) {
  const ThetaMatrix t = theta(variant, x, units);
  const CVector4 via_theta = matvec(t.m, x.V);
  CVector4 direct;
  switch (variant) {
    case ThetaVariant::v1:
    case ThetaVariant::v2:
    case ThetaVariant::v3:
    case ThetaVariant::v1_star:
      direct = g_variant(variant, x, units);
      break;
    case ThetaVariant::v6:
    case ThetaVariant::v7b:
    case ThetaVariant::v7c:
      direct = g_remark(variant, x, units);
      break;
    default:
      throw UsageError("theta_vs_direct: variant " + to_string(variant) +
                       " has no closed form");
  }
  double dev = 0.0, vsum = 0.0;
  for (int k = 0; k < 4; ++k) {
    dev = std::max(dev, std::abs(via_theta[k] - direct[k]));
    vsum += std::abs(x.V[k]);
  }
  const double scale = max_abs(t.m) * vsum;
  return {dev, scale > 0.0 ? dev / scale : dev};
}

/// |g_k V_k| / (|g| |V|), zero when g vanishes.
inline double orthogonality_defect(const CVector4& g, const CVector4& V) {
  const double scale = magnitude(g) * magnitude(V);
  return scale > 0.0 ? std::abs(contract(g, V)) / scale : 0.0;
}

struct DualNullity {
  bool theta2_star_annihilates = false;
  bool theta3_star_annihilates = false;
  bool theta6_star_nonzero = false;
  double theta2_star_defect = 0.0;  ///< |Theta(2*) V| / (max|Theta(2*)| sum|V|)
  double theta3_star_defect = 0.0;
  double theta6_star_norm = 0.0;    ///< |Theta(6*) V|
};

inline DualNullity dual_nullity_check(const FourSample& x, const SimulationUnits& units,
                                      double tolerance = 1e-12,
                                      double nonzero_threshold = 1e-8) {
  auto defect = [&](ThetaVariant v) {
    const ThetaMatrix t = theta(v, x, units);
    double vsum = 0.0;
    for (const Complex& z : x.V) vsum += std::abs(z);
    const double scale = max_abs(t.m) * vsum;
    const double r = magnitude(matvec(t.m, x.V));
    return scale > 0.0 ? r / scale : r;
  };
  DualNullity out;
  out.theta2_star_defect = defect(ThetaVariant::v2_star);
  out.theta3_star_defect = defect(ThetaVariant::v3_star);
  out.theta2_star_annihilates = out.theta2_star_defect <= tolerance;
  out.theta3_star_annihilates = out.theta3_star_defect <= tolerance;
  if (x.dV) {
    out.theta6_star_norm = magnitude(matvec(theta(ThetaVariant::v6_star, x, units).m, x.V));
    out.theta6_star_nonzero = out.theta6_star_norm > nonzero_threshold;
  }
  return out;
}

/// Real-form point data from which a consistent FourSample is assembled.
/// grad_A[b][a] = d_b A_a, grad_v[b][a] = d_b v_a.
struct RealPointData {
  double sigma0 = 1.0;
  Vec3 v{};
  double phi = 0.0;
  Vec3 A{};
  Vec3 grad_phi{};
  std::array<Vec3, 3> grad_A{};
  Vec3 dA_dt{};
  double dphi_dt = 0.0;
  std::array<Vec3, 3> grad_v{};
  Vec3 dv_dt{};
};

inline FourSample make_sample(const RealPointData& d, const SimulationUnits& units) {
  const double c = units.c;
  const Complex i(0.0, 1.0);
  FourSample x;
  x.sigma0 = d.sigma0;
  x.V = four_velocity(d.v, units);
  const double gamma = lorentz_factor(d.v, units);
  for (int j = 0; j < 3; ++j) {
    for (int n = 0; n < 3; ++n) x.dPhi[j][n] = d.grad_A[j][n];
    x.dPhi[j][3] = -i / c * d.grad_phi[j];
    x.dPhi[3][j] = -i / c * d.dA_dt[j];
  }
  x.dPhi[3][3] = -d.dphi_dt / (c * c);
  x.Phi = RealFormConventions::potential_to_four({d.phi, d.A}, c);

  // d gamma = gamma^3 (v . dv) / c^2
  const double g3 = gamma * gamma * gamma / (c * c);
  CMatrix4 dV{};
  for (int n = 0; n < 3; ++n) {
    const double dgamma = g3 * dot(d.v, d.grad_v[n]);
    for (int j = 0; j < 3; ++j) dV[n][j] = gamma * d.grad_v[n][j] + d.v[j] * dgamma;
    dV[n][3] = i * c * dgamma;
  }
  const double gamma_dot = g3 * dot(d.v, d.dv_dt);
  for (int j = 0; j < 3; ++j) dV[3][j] = -i / c * (gamma * d.dv_dt[j] + d.v[j] * gamma_dot);
  dV[3][3] = gamma_dot;
  x.dV = dV;
  return x;
}

/// Mass at rest in a static field: only d_alpha Phi_4 is nonzero.
inline FourSample stationary_sample(double sigma0, const Vec3& grad_phi,
                                    const SimulationUnits& units) {
  RealPointData d;
  d.sigma0 = sigma0;
  d.grad_phi = grad_phi;
  return make_sample(d, units);
}

/// Seeded generator: |v| uniform-in-ball up to 0.9 c, potentials and their
/// derivatives standard normal.
class SampleGenerator {
 public:
  explicit SampleGenerator(std::uint64_t seed, SimulationUnits units = {})
      : rng_(seed), units_(units) {}

  RealPointData next_real() {
    RealPointData d;
    d.sigma0 = 0.1 + uniform_(rng_);
    Vec3 dir{normal_(rng_), normal_(rng_), normal_(rng_)};
    const double len = norm(dir);
    const double speed = 0.9 * units_.c * std::cbrt(uniform_(rng_));
    d.v = (len > 0.0 ? speed / len : 0.0) * dir;
    d.phi = normal_(rng_);
    d.A = normal3();
    d.grad_phi = normal3();
    for (auto& row : d.grad_A) row = normal3();
    d.dA_dt = normal3();
    d.dphi_dt = normal_(rng_);
    for (auto& row : d.grad_v) row = 0.1 * units_.c * normal3();
    d.dv_dt = 0.1 * units_.c * normal3();
    return d;
  }

  FourSample next() { return make_sample(next_real(), units_); }

  /// Standard-normal F and G for stress-tensor checks.
  std::pair<Vec3, Vec3> next_fields() { return {normal3(), normal3()}; }

  /// Generic complex antisymmetric 4x4 matrix.
  CMatrix4 next_antisymmetric() {
    CMatrix4 L{};
    for (int k = 0; k < 4; ++k)
      for (int m = k + 1; m < 4; ++m) {
        L[k][m] = Complex(normal_(rng_), normal_(rng_));
        L[m][k] = -L[k][m];
      }
    return L;
  }

  double normal() { return normal_(rng_); }

 private:
  Vec3 normal3() { return {normal_(rng_), normal_(rng_), normal_(rng_)}; }

  std::mt19937_64 rng_;
  SimulationUnits units_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace vecgrav
