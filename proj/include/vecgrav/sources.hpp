#pragma once

// Heavy-mass 4-flux configurations s_k = sigma0 V_k sampled on a grid.
// In real form the state carries the lab density sigma = sigma0 * gamma and
// the spatial flux s = sigma * v. Bodies move kinematically: the velocity
// field is prescribed, never evolved.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "vecgrav/errors.hpp"
#include "vecgrav/grid.hpp"
#include "vecgrav/operators.hpp"
#include "vecgrav/units.hpp"

namespace vecgrav {

/// Uniform ball of the given radius with erfc-mollified edge of the given
/// width; radius 0 gives a Gaussian of standard deviation `width`.
struct StaticBall {
  Vec3 center{};
  double radius = 0.0;
  double mass = 1.0;
  double width = 1.0;
  friend bool operator==(const StaticBall&, const StaticBall&) = default;
};

/// Gaussian blob whose center follows
///   center + axis * amplitude * ramp(t) * sin(omega t),
/// with ramp a C2 smoothstep from 0 at t <= 0 to 1 at t >= ramp_time.
struct OscillatingBlob {
  Vec3 center{};
  double width = 1.0;
  double mass = 1.0;
  Vec3 axis{0.0, 0.0, 1.0};
  double amplitude = 0.0;
  double omega = 0.0;
  double ramp_time = 0.0;
  friend bool operator==(const OscillatingBlob&, const OscillatingBlob&) = default;
};

/// Gaussian-tube ring in the plane z = center.z rotating rigidly about the
/// z axis with angular velocity omega * ramp(t).
struct RotatingRing {
  Vec3 center{};
  double ring_radius = 1.0;
  double linear_density = 1.0;
  double omega = 0.0;
  double width = 1.0;
  double ramp_time = 0.0;
  friend bool operator==(const RotatingRing&, const RotatingRing&) = default;
};

struct TwoStaticBalls {
  StaticBall first;
  StaticBall second;
  friend bool operator==(const TwoStaticBalls&, const TwoStaticBalls&) = default;
};

using SourceScenario =
    std::variant<StaticBall, OscillatingBlob, RotatingRing, TwoStaticBalls>;

struct MassFluxState {
  ScalarField sigma;
  VectorField flux;
  double time = 0.0;
};

struct FluxPoint {
  double sigma = 0.0;
  Vec3 s{};
};

/// Axis-aligned bounds in physical coordinates.
struct Bounds {
  Vec3 lo{};
  Vec3 hi{};
  bool contains(const Vec3& x) const {
    for (int a = 0; a < 3; ++a)
      if (x[a] < lo[a] || x[a] > hi[a]) return false;
    return true;
  }
};

/// C2 smoothstep: 0 for t <= 0, 1 for t >= T. T <= 0 means no ramp.
inline double smooth_ramp(double t, double T) {
  if (T <= 0.0) return 1.0;
  if (t <= 0.0) return 0.0;
  if (t >= T) return 1.0;
  const double u = t / T;
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

inline double smooth_ramp_rate(double t, double T) {
  if (t <= 0.0 || T <= 0.0 || t >= T) return 0.0;
  const double u = t / T;
  return 30.0 * u * u * (1.0 - u) * (1.0 - u) / T;
}

// Tails beyond this many widths are below 1e-10 of the peak density.
inline constexpr double kSupportWidths = 7.0;
// Extent used for the "body fits in the grid" check.
inline constexpr double kBodyWidths = 3.0;

/// Precomputed evaluator for one scenario: analytic sigma and s at any
/// point and time, support bounds and total heavy mass.
class SourceModel {
 public:
  SourceModel(const SourceScenario& scenario, const SimulationUnits& units)
      : scenario_(scenario), units_(units) {
    units.validate();
    validate_scenario();
    std::visit([&](const auto& s) { prepare(s); }, scenario_);
  }

  const SourceScenario& scenario() const { return scenario_; }

  FluxPoint sample(const Vec3& x, double t) const {
    return std::visit([&](const auto& s) { return eval(s, x, t); }, scenario_);
  }

  /// One bounding box per separated body; density is negligible outside.
  std::vector<Bounds> support() const {
    return std::visit([&](const auto& s) { return bounds(s, kSupportWidths); },
                      scenario_);
  }

  /// Boxes enclosing the body including its mollified edge.
  std::vector<Bounds> body_extent() const {
    return std::visit([&](const auto& s) { return bounds(s, kBodyWidths); },
                      scenario_);
  }

  double total_mass() const { return total_mass_; }

 private:
  void validate_scenario() const {
    auto check_ball = [](const StaticBall& b) {
      if (!(b.mass > 0.0)) throw UsageError("scenario: ball mass must be > 0");
      if (!(b.width > 0.0)) throw UsageError("scenario: ball width must be > 0");
      if (b.radius < 0.0) throw UsageError("scenario: ball radius must be >= 0");
    };
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, StaticBall>) {
            check_ball(s);
          } else if constexpr (std::is_same_v<T, TwoStaticBalls>) {
            check_ball(s.first);
            check_ball(s.second);
          } else if constexpr (std::is_same_v<T, OscillatingBlob>) {
            if (!(s.mass > 0.0)) throw UsageError("scenario: blob mass must be > 0");
            if (!(s.width > 0.0)) throw UsageError("scenario: blob width must be > 0");
            if (s.amplitude < 0.0 || s.omega < 0.0 || s.ramp_time < 0.0)
              throw UsageError("scenario: amplitude, omega and ramp_time must be >= 0");
            if (norm(s.axis) == 0.0)
              throw UsageError("scenario: oscillation axis must be nonzero");
            if (s.amplitude > 0.0 && !(peak_blob_speed(s) < units_.c))
              throw SuperluminalError("scenario: oscillation speed reaches c");
          } else {
            if (!(s.linear_density > 0.0))
              throw UsageError("scenario: ring linear density must be > 0");
            if (!(s.ring_radius > 0.0) || !(s.width > 0.0))
              throw UsageError("scenario: ring radius and width must be > 0");
            if (s.omega < 0.0 || s.ramp_time < 0.0)
              throw UsageError("scenario: omega and ramp_time must be >= 0");
            if (!(s.omega * (s.ring_radius + kSupportWidths * s.width) < units_.c))
              throw SuperluminalError("scenario: ring rim speed reaches c");
          }
        },
        scenario_);
  }

  static double peak_blob_speed(const OscillatingBlob& b) {
    // |d/dt (r sin wt)| <= A (max r' + w) with max r' = 15 / (8 T).
    const double ramp_rate = b.ramp_time > 0.0 ? 15.0 / (8.0 * b.ramp_time) : 0.0;
    return b.amplitude * (b.omega + ramp_rate);
  }

  static double ball_peak_density(const StaticBall& b) {
    if (b.radius == 0.0)
      return b.mass / (std::pow(2.0 * pi, 1.5) * b.width * b.width * b.width);
    // 4 pi int_0^inf r^2 erfc((r - R) / (sqrt2 w)) / 2 dr, composite Simpson.
    const double upper = b.radius + 14.0 * b.width;
    const int n = 8192;
    const double h = upper / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double r = h * i;
      const double f =
          r * r * 0.5 * std::erfc((r - b.radius) / (std::sqrt(2.0) * b.width));
      const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      acc += wgt * f;
    }
    const double volume = 4.0 * pi * acc * h / 3.0;
    return b.mass / volume;
  }

  static double ball_density(const StaticBall& b, double peak, const Vec3& x) {
    const double r = norm(x - b.center);
    if (b.radius == 0.0)
      return peak * std::exp(-0.5 * r * r / (b.width * b.width));
    return peak * 0.5 * std::erfc((r - b.radius) / (std::sqrt(2.0) * b.width));
  }

  void prepare(const StaticBall& b) {
    peak_[0] = ball_peak_density(b);
    total_mass_ = b.mass;
  }
  void prepare(const TwoStaticBalls& b) {
    peak_[0] = ball_peak_density(b.first);
    peak_[1] = ball_peak_density(b.second);
    total_mass_ = b.first.mass + b.second.mass;
  }
  void prepare(const OscillatingBlob& b) {
    peak_[0] = b.mass / (std::pow(2.0 * pi, 1.5) * b.width * b.width * b.width);
    axis_ = (1.0 / norm(b.axis)) * b.axis;
    total_mass_ = b.mass;
  }
  void prepare(const RotatingRing& r) {
    peak_[0] = r.linear_density / (2.0 * pi * r.width * r.width);
    total_mass_ = 2.0 * pi * r.ring_radius * r.linear_density;
  }

  FluxPoint eval(const StaticBall& b, const Vec3& x, double) const {
    return {ball_density(b, peak_[0], x), {}};
  }
  FluxPoint eval(const TwoStaticBalls& b, const Vec3& x, double) const {
    return {ball_density(b.first, peak_[0], x) + ball_density(b.second, peak_[1], x),
            {}};
  }
  FluxPoint eval(const OscillatingBlob& b, const Vec3& x, double t) const {
    const double ramp = smooth_ramp(t, b.ramp_time);
    const double rate = smooth_ramp_rate(t, b.ramp_time);
    const double sw = std::sin(b.omega * t);
    const double cw = std::cos(b.omega * t);
    const double offset = b.amplitude * ramp * sw;
    const double speed = b.amplitude * (rate * sw + ramp * b.omega * cw);
    const Vec3 d = x - (b.center + offset * axis_);
    const double sigma =
        peak_[0] * std::exp(-0.5 * dot(d, d) / (b.width * b.width));
    return {sigma, (sigma * speed) * axis_};
  }
  FluxPoint eval(const RotatingRing& r, const Vec3& x, double t) const {
    const Vec3 d = x - r.center;
    const double rho = std::hypot(d[0], d[1]);
    const double dr = rho - r.ring_radius;
    const double sigma =
        peak_[0] * std::exp(-0.5 * (dr * dr + d[2] * d[2]) / (r.width * r.width));
    const double spin = r.omega * smooth_ramp(t, r.ramp_time);
    return {sigma, {-sigma * spin * d[1], sigma * spin * d[0], 0.0}};
  }

  static Bounds box_around(const Vec3& c, const Vec3& half) {
    return {c - half, c + half};
  }

  std::vector<Bounds> bounds(const StaticBall& b, double widths) const {
    const double e = b.radius + widths * b.width;
    return {box_around(b.center, {e, e, e})};
  }
  std::vector<Bounds> bounds(const TwoStaticBalls& b, double widths) const {
    return {bounds(b.first, widths)[0], bounds(b.second, widths)[0]};
  }
  std::vector<Bounds> bounds(const OscillatingBlob& b, double widths) const {
    Vec3 half;
    for (int a = 0; a < 3; ++a)
      half[a] = b.amplitude * std::abs(axis_[a]) + widths * b.width;
    return {box_around(b.center, half)};
  }
  std::vector<Bounds> bounds(const RotatingRing& r, double widths) const {
    const double e = r.ring_radius + widths * r.width;
    return {box_around(r.center, {e, e, widths * r.width})};
  }

  SourceScenario scenario_;
  SimulationUnits units_;
  std::array<double, 2> peak_{};
  Vec3 axis_{0.0, 0.0, 1.0};
  double total_mass_ = 0.0;
};

/// Samples the scenario at time t on the grid.
inline MassFluxState sample_scenario(const SourceModel& model, double t,
                                     const Grid3& grid) {
  grid.validate();
  const double margin = 4.0 * grid.dx;
  const Vec3 lo = grid.origin;
  const Vec3 hi = grid.upper();
  for (const Bounds& b : model.body_extent())
    for (int a = 0; a < 3; ++a)
      if (b.lo[a] - margin < lo[a] || b.hi[a] + margin > hi[a])
        throw OutOfBoundsError("scenario: body does not fit in the grid with a "
                               "4-cell margin along axis " + std::to_string(a));
  MassFluxState state{ScalarField(grid), VectorField(grid), t};
  parallel_for(grid.counts[0], [&](long ip) {
    const int i = static_cast<int>(ip);
    for (int j = 0; j < grid.counts[1]; ++j)
      for (int k = 0; k < grid.counts[2]; ++k) {
        const std::size_t n = grid.index(i, j, k);
        const FluxPoint p = model.sample(grid.position(i, j, k), t);
        state.sigma.values[n] = p.sigma;
        state.flux.set(n, p.s);
      }
  });
  return state;
}

inline MassFluxState sample_scenario(const SourceScenario& scenario, double t,
                                     const Grid3& grid,
                                     const SimulationUnits& units) {
  return sample_scenario(SourceModel(scenario, units), t, grid);
}

inline MassFluxState empty_source(const Grid3& grid, double t) {
  return {ScalarField(grid), VectorField(grid), t};
}

/// Comoving density sigma0 = sigma / gamma with v = s / sigma.
inline ScalarField comoving_density(const MassFluxState& state,
                                    const SimulationUnits& units) {
  ScalarField out(state.sigma.grid);
  for (std::size_t n = 0; n < out.values.size(); ++n) {
    const double sigma = state.sigma.values[n];
    if (sigma <= 0.0) continue;
    const Vec3 v = (1.0 / sigma) * state.flux.at(n);
    out.values[n] = sigma / lorentz_factor(v, units);
  }
  return out;
}

/// Sum of sigma dx^3 = sum of sigma0 gamma dx^3, the conserved heavy mass.
inline double heavy_mass_integral(const MassFluxState& state) {
  const Grid3& g = state.sigma.grid;
  return region_integral(g, interior_region(g, 0),
                         [&](std::size_t n) { return state.sigma.values[n]; });
}

/// Checks sigma >= 0 and |s| < c sigma wherever sigma > 0.
inline bool physically_admissible(const MassFluxState& state,
                                  const SimulationUnits& units) {
  for (std::size_t n = 0; n < state.sigma.values.size(); ++n) {
    const double sigma = state.sigma.values[n];
    if (sigma < 0.0) return false;
    const double s = norm(state.flux.at(n));
    if (sigma == 0.0 ? s != 0.0 : !(s < units.c * sigma)) return false;
  }
  return true;
}

struct ContinuityReport {
  ScalarField residual;
  Norms norms;
  /// Max over interior cells of |d sigma/dt| + |div s|; zero for a static body.
  double scale = 0.0;
};

/// Discrete d sigma/dt + div s at the middle state, centered in time.
inline ContinuityReport continuity_residual(const MassFluxState& before,
                                            const MassFluxState& at,
                                            const MassFluxState& after,
                                            double dt) {
  require_same_grid(before.sigma.grid, at.sigma.grid, "continuity_residual");
  require_same_grid(after.sigma.grid, at.sigma.grid, "continuity_residual");
  require_same_grid(at.flux.grid(), at.sigma.grid, "continuity_residual");
  if (!(dt > 0.0)) throw SchedulingError("continuity_residual: dt must be > 0");
  const double tol = 1e-9 * std::max(1.0, std::abs(at.time));
  if (std::abs(at.time - before.time - dt) > tol ||
      std::abs(after.time - at.time - dt) > tol)
    throw SchedulingError("continuity_residual: states are not spaced by dt");
  const Grid3& g = at.sigma.grid;
  ContinuityReport report;
  report.residual = div(at.flux);
  ScalarField magnitude(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double rate =
        (after.sigma.values[n] - before.sigma.values[n]) / (2.0 * dt);
    magnitude.values[n] = std::abs(rate) + std::abs(report.residual.values[n]);
    report.residual.values[n] += rate;
  }
  const IndexRegion inner = interior_region(g, 1);
  report.norms = norms(report.residual, inner);
  report.scale = norms(magnitude, inner).max;
  return report;
}

}  // namespace vecgrav
