#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "vecgrav/errors.hpp"

namespace vecgrav {

using Vec3 = std::array<double, 3>;
using Complex = std::complex<double>;

template <typename T>
using FourVector = std::array<T, 4>;

/// Row-major 4x4 matrix, entry [k][s].
template <typename T>
using Matrix4 = std::array<std::array<T, 4>, 4>;

inline constexpr double pi = std::numbers::pi;

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) {
  return {s * a[0], s * a[1], s * a[2]};
}

/// Speed of light and gravitational constant. Natural units by default.
struct SimulationUnits {
  double c = 1.0;
  double kappa = 1.0;

  void validate() const {
    if (!(c > 0.0) || !std::isfinite(c))
      throw UsageError("units: c must be positive and finite");
    if (!(kappa > 0.0) || !std::isfinite(kappa))
      throw UsageError("units: kappa must be positive and finite");
  }

  friend bool operator==(const SimulationUnits&, const SimulationUnits&) = default;
};

inline double lorentz_factor(const Vec3& v, const SimulationUnits& units) {
  const double beta2 = dot(v, v) / (units.c * units.c);
  if (!(beta2 < 1.0))
    throw SuperluminalError("velocity |v| = " + std::to_string(norm(v)) +
                            " is not below c = " + std::to_string(units.c));
  return 1.0 / std::sqrt(1.0 - beta2);
}

/// V = (gamma v, i c gamma).
inline FourVector<Complex> four_velocity(const Vec3& v,
                                         const SimulationUnits& units) {
  const double gamma = lorentz_factor(v, units);
  return {Complex(gamma * v[0]), Complex(gamma * v[1]), Complex(gamma * v[2]),
          Complex(0.0, units.c * gamma)};
}

/// Minkowski square V_k V_k with the imaginary fourth coordinate (no conjugation).
template <typename T>
T minkowski_square(const FourVector<T>& v) {
  return v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3];
}

/// Grid data is stored in real variables; the fourth components of the
/// complex index formalism are recovered through this fixed mapping:
///   x4 = i c t,  V4 = i c gamma,  Phi4 = -i phi / c,  s4 = i c sigma,
///   d/dx4 = -(i/c) d/dt.
struct RealFormConventions {
  struct RealPotential {
    double phi = 0.0;
    Vec3 A{};
    friend bool operator==(const RealPotential&, const RealPotential&) = default;
  };
  struct RealFlux {
    double sigma = 0.0;
    Vec3 s{};
    friend bool operator==(const RealFlux&, const RealFlux&) = default;
  };

  static FourVector<Complex> potential_to_four(const RealPotential& p, double c) {
    return {Complex(p.A[0]), Complex(p.A[1]), Complex(p.A[2]),
            Complex(0.0, -p.phi / c)};
  }
  static RealPotential potential_from_four(const FourVector<Complex>& P,
                                           double c) {
    // phi = i c Phi4
    return {-P[3].imag() * c, {P[0].real(), P[1].real(), P[2].real()}};
  }

  static FourVector<Complex> flux_to_four(const RealFlux& f, double c) {
    return {Complex(f.s[0]), Complex(f.s[1]), Complex(f.s[2]),
            Complex(0.0, c * f.sigma)};
  }
  static RealFlux flux_from_four(const FourVector<Complex>& s, double c) {
    return {s[3].imag() / c, {s[0].real(), s[1].real(), s[2].real()}};
  }

  static FourVector<Complex> position_to_four(const Vec3& x, double t, double c) {
    return {Complex(x[0]), Complex(x[1]), Complex(x[2]), Complex(0.0, c * t)};
  }

  /// Converts a time derivative into the derivative along x4.
  static Complex d4_from_time_derivative(double dt_value, double c) {
    return Complex(0.0, -dt_value / c);
  }
  static double time_derivative_from_d4(Complex d4_value, double c) {
    return -d4_value.imag() * c;
  }
};

}  // namespace vecgrav
