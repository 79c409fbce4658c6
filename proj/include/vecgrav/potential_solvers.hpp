#pragma once

// Three solvers for the 4-potential: a leapfrog time-domain integrator, a
// retarded-potential quadrature over the analytic source, and a static
// Poisson relaxation. Real form of the wave system:
//   d2phi/dt2 = c^2 lap phi - 4 pi kappa c^2 sigma
//   d2A/dt2   = c^2 lap A   + 4 pi kappa s

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "vecgrav/errors.hpp"
#include "vecgrav/grid.hpp"
#include "vecgrav/operators.hpp"
#include "vecgrav/parallel.hpp"
#include "vecgrav/sources.hpp"
#include "vecgrav/units.hpp"

namespace vecgrav {

struct SolverConfig {
  double cfl = 0.5;
  int sponge_width = 8;
  /// Damping rate at the outermost sponge cell, per light-crossing time of
  /// one cell (dx / c). Per step the change is scaled by exp(-rate c dt / dx).
  double sponge_strength = 0.7;
  /// Relative residual target of the Poisson relaxation.
  double static_tolerance = 1e-10;
  int max_iterations = 50000;
  /// Outer shell: Mur first-order absorbing condition on the deviation from
  /// the state's reference level (true) or held at its values (false).
  bool absorbing_boundary = true;

  static constexpr double max_cfl() { return 0.57735026918962584; }  // 1/sqrt(3)

  void validate() const {
    if (!(cfl > 0.0) || cfl > max_cfl())
      throw StabilityError("solver: cfl must lie in (0, 1/sqrt(3)], got " +
                           std::to_string(cfl));
    if (sponge_width < 0) throw UsageError("solver: sponge width must be >= 0");
    if (!(sponge_strength >= 0.0 && std::isfinite(sponge_strength)))
      throw UsageError("solver: sponge strength must be finite and >= 0");
    if (!(static_tolerance > 0.0))
      throw UsageError("solver: static tolerance must be > 0");
    if (max_iterations <= 0) throw UsageError("solver: max_iterations must be > 0");
  }

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct PotentialLevel {
  ScalarField phi;  ///< phi = i c Phi_4
  VectorField A;    ///< (Phi_1, Phi_2, Phi_3)

  explicit PotentialLevel(const Grid3& g = Grid3{}) : phi(g), A(g) {}
  const Grid3& grid() const { return phi.grid; }
  friend bool operator==(const PotentialLevel&, const PotentialLevel&) = default;
};

/// Two consecutive leapfrog levels: `current` at `time`, `previous` at
/// `time - dt`.
struct PotentialState {
  PotentialLevel previous;
  PotentialLevel current;
  double time = 0.0;
  double dt = 0.0;
  long step = 0;
  /// Far-field values the absorbing shell relaxes around (the initial
  /// static solution, or zero).
  PotentialLevel reference;

  const Grid3& grid() const { return current.grid(); }
};

struct PotentialPoint {
  double phi = 0.0;
  Vec3 A{};
};

/// Supplies boundary-shell values at (x, t). Without a driver the shell keeps
/// its current values.
using BoundaryDriver = std::function<PotentialPoint(const Vec3&, double)>;

inline double stable_time_step(const Grid3& grid, const SolverConfig& cfg,
                               const SimulationUnits& units) {
  return cfg.cfl * grid.dx / units.c;
}

inline PotentialState zero_state(const Grid3& grid, const SolverConfig& cfg,
                                 const SimulationUnits& units, double t0 = 0.0) {
  grid.validate();
  cfg.validate();
  units.validate();
  return {PotentialLevel(grid), PotentialLevel(grid), t0,
          stable_time_step(grid, cfg, units), 0, PotentialLevel(grid)};
}

/// Time-independent initial data: both levels hold (phi, A = 0).
inline PotentialState static_state(const ScalarField& phi, const SolverConfig& cfg,
                                   const SimulationUnits& units, double t0 = 0.0) {
  PotentialState s = zero_state(phi.grid, cfg, units, t0);
  s.previous.phi = phi;
  s.current.phi = phi;
  s.reference.phi = phi;
  return s;
}

/// Per-cell fraction of the step change removed by the sponge (0 outside the
/// layer), for a step of Courant number `courant`.
inline std::vector<double> sponge_profile(int count, const SolverConfig& cfg,
                                          double courant) {
  std::vector<double> prof(static_cast<std::size_t>(count), 0.0);
  const int w = cfg.sponge_width;
  if (w == 0) return prof;
  for (int m = 0; m < count; ++m) {
    const int dist = std::min(m, count - 1 - m);
    if (dist >= 1 && dist <= w) {
      const double depth = static_cast<double>(w + 1 - dist) / w;
      prof[static_cast<std::size_t>(m)] =
          -std::expm1(-cfg.sponge_strength * depth * depth * courant);
    }
  }
  return prof;
}

inline PotentialState step_wave(const PotentialState& state,
                                const MassFluxState& source,
                                const SolverConfig& cfg,
                                const SimulationUnits& units,
                                const BoundaryDriver& driver = {}) {
  const Grid3& g = state.grid();
  require_same_grid(state.previous.grid(), g, "step_wave");
  require_same_grid(source.sigma.grid, g, "step_wave");
  require_same_grid(source.flux.grid(), g, "step_wave");
  const double courant = units.c * state.dt / g.dx;
  if (!(state.dt > 0.0) || courant > SolverConfig::max_cfl() * (1.0 + 1e-12))
    throw StabilityError("step_wave: c dt / dx = " + std::to_string(courant) +
                         " violates the 3D leapfrog bound 1/sqrt(3)");
  if (std::abs(source.time - state.time) > 1e-9 * std::max(1.0, std::abs(state.time)))
    throw SchedulingError("step_wave: source sampled at t = " +
                          std::to_string(source.time) + ", state is at t = " +
                          std::to_string(state.time));

  const std::array<std::vector<double>, 3> prof{
      sponge_profile(g.counts[0], cfg, courant), sponge_profile(g.counts[1], cfg, courant),
      sponge_profile(g.counts[2], cfg, courant)};
  const double dt2 = state.dt * state.dt;
  const double c2h2 = units.c * units.c / (g.dx * g.dx);
  const double phi_src = -4.0 * pi * units.kappa * units.c * units.c;
  const double a_src = 4.0 * pi * units.kappa;
  const std::size_t sx = g.stride(0), sy = g.stride(1);
  const double t_next = state.time + state.dt;

  PotentialState out;
  out.previous = state.current;
  out.current = PotentialLevel(g);
  out.time = t_next;
  out.dt = state.dt;
  out.step = state.step + 1;
  out.reference = state.reference;
  require_same_grid(state.reference.grid(), g, "step_wave");

  const bool absorbing = cfg.absorbing_boundary && !driver;
  const double cdt = units.c * state.dt;
  auto advance = [&](const ScalarField& cur, const ScalarField& prev,
                     const ScalarField& src, double src_scale, const ScalarField& ref,
                     ScalarField& next) {
    const double* u = cur.values.data();
    const double* up = prev.values.data();
    const double* f = src.values.data();
    const double* r = ref.values.data();
    double* un = next.values.data();
    const int nx = g.counts[0], ny = g.counts[1], nz = g.counts[2];
    auto on_shell = [&](int i, int j, int k) {
      return i == 0 || j == 0 || k == 0 || i == nx - 1 || j == ny - 1 || k == nz - 1;
    };
    parallel_for(nx, [&](long ip) {
      const int i = static_cast<int>(ip);
      for (int j = 0; j < ny; ++j)
        for (int k = 0; k < nz; ++k) {
          if (on_shell(i, j, k)) continue;
          const std::size_t n = g.index(i, j, k);
          const double lap = u[n + sx] + u[n - sx] + u[n + sy] + u[n - sy] +
                             u[n + 1] + u[n - 1] - 6.0 * u[n];
          const double leap =
              2.0 * u[n] - up[n] + dt2 * (c2h2 * lap + src_scale * f[n]);
          const double d = std::max({prof[0][static_cast<std::size_t>(i)],
                                     prof[1][static_cast<std::size_t>(j)],
                                     prof[2][static_cast<std::size_t>(k)]});
          un[n] = u[n] + (1.0 - d) * (leap - u[n]);
        }
    });
    // Shell pass after the interior, which it reads at the new level. Mur's
    // condition is applied to w = r (u - ref) along the ray to the grid
    // centre, exact for outgoing spherical waves f(t - r/c)/r. The foot of
    // the ray is pushed in far enough that trilinear interpolation only
    // touches interior nodes.
    const Vec3 centre = 0.5 * (g.origin + g.upper());
    auto interp = [&](const double* v, const Vec3& x) {
      std::array<int, 3> i0{};
      std::array<double, 3> t{};
      for (int a = 0; a < 3; ++a) {
        const double s =
            std::clamp((x[a] - g.origin[a]) / g.dx, 1.0, g.counts[a] - 2.0);
        i0[a] = std::clamp(static_cast<int>(std::floor(s)), 0, g.counts[a] - 2);
        t[a] = s - i0[a];
      }
      double acc = 0.0;
      for (int c = 0; c < 8; ++c) {
        const int bi = c & 1, bj = (c >> 1) & 1, bk = (c >> 2) & 1;
        const double wgt = (bi ? t[0] : 1.0 - t[0]) * (bj ? t[1] : 1.0 - t[1]) *
                           (bk ? t[2] : 1.0 - t[2]);
        if (wgt != 0.0) acc += wgt * v[g.index(i0[0] + bi, i0[1] + bj, i0[2] + bk)];
      }
      return acc;
    };
    parallel_for(nx, [&](long ip) {
      const int i = static_cast<int>(ip);
      for (int j = 0; j < ny; ++j)
        for (int k = 0; k < nz; ++k) {
          if (!on_shell(i, j, k)) continue;
          const std::size_t n = g.index(i, j, k);
          if (!absorbing) {
            un[n] = u[n];
            continue;
          }
          const Vec3 xb = g.position(i, j, k);
          const Vec3 rel = xb - centre;
          const double rb = norm(rel);
          const std::array<int, 3> idx{i, j, k};
          double step = 0.0;
          for (int a = 0; a < 3; ++a)
            if (idx[a] == 0 || idx[a] == g.counts[a] - 1)
              step = std::max(step, g.dx * rb / std::abs(rel[a]));
          const Vec3 xp = xb - (step / rb) * rel;
          const double rp = rb - step;
          const double q = (cdt - step) / (cdt + step);
          const double wp_old = rp * (interp(u, xp) - interp(r, xp));
          const double wp_new = rp * (interp(un, xp) - interp(r, xp));
          const double wb_old = rb * (u[n] - r[n]);
          un[n] = r[n] + (wp_old + q * (wp_new - wb_old)) / rb;
        }
    });
  };

  advance(state.current.phi, state.previous.phi, source.sigma, phi_src,
          state.reference.phi, out.current.phi);
  for (int a = 0; a < 3; ++a)
    advance(state.current.A[a], state.previous.A[a], source.flux[a], a_src,
            state.reference.A[a], out.current.A[a]);

  if (driver) {
    parallel_for(g.counts[0], [&](long ip) {
      const int i = static_cast<int>(ip);
      const bool face_i = i == 0 || i == g.counts[0] - 1;
      for (int j = 0; j < g.counts[1]; ++j)
        for (int k = 0; k < g.counts[2]; ++k) {
          if (!(face_i || j == 0 || k == 0 || j == g.counts[1] - 1 ||
                k == g.counts[2] - 1))
            continue;
          const std::size_t n = g.index(i, j, k);
          const PotentialPoint p = driver(g.position(i, j, k), t_next);
          out.current.phi.values[n] = p.phi;
          out.current.A.set(n, p.A);
        }
    });
  }

  if (!all_finite(out.current.phi) || !all_finite(out.current.A))
    throw DivergenceError("step_wave: non-finite potential at step " +
                              std::to_string(out.step),
                          out.step);
  return out;
}

/// Solves lap phi = 4 pi kappa sigma0 by red-black SOR with the boundary
/// shell fixed to the monopole value -kappa M / |x - x_cm|.
inline ScalarField solve_static(const ScalarField& sigma0, const SolverConfig& cfg,
                                const SimulationUnits& units) {
  const Grid3& g = sigma0.grid;
  g.validate();
  cfg.validate();
  units.validate();
  if (sigma0.values.size() != g.size())
    throw ShapeError("solve_static: density does not match its grid");

  double peak = 0.0;
  for (double v : sigma0.values) {
    if (v < 0.0 || !std::isfinite(v))
      throw UsageError("solve_static: density must be finite and >= 0");
    peak = std::max(peak, v);
  }
  ScalarField phi(g);
  if (peak == 0.0) return phi;

  const IndexRegion all = interior_region(g, 0);
  const double mass = region_integral(g, all, [&](std::size_t n) { return sigma0.values[n]; });
  Vec3 com{};
  for (int a = 0; a < 3; ++a)
    com[a] = region_integral(g, all, [&](std::size_t n) {
               const int k = static_cast<int>(n % g.counts[2]);
               const int j = static_cast<int>((n / g.counts[2]) % g.counts[1]);
               const int i = static_cast<int>(n / g.stride(0));
               return sigma0.values[n] * g.position(i, j, k)[a];
             }) / mass;

  const double soft = 2.0 * g.dx;
  for (int i = 0; i < g.counts[0]; ++i)
    for (int j = 0; j < g.counts[1]; ++j)
      for (int k = 0; k < g.counts[2]; ++k) {
        const double r = norm(g.position(i, j, k) - com);
        const bool shell = i == 0 || j == 0 || k == 0 || i == g.counts[0] - 1 ||
                           j == g.counts[1] - 1 || k == g.counts[2] - 1;
        phi(i, j, k) = shell ? -units.kappa * mass / r
                             : -units.kappa * mass / std::sqrt(r * r + soft * soft);
      }

  const double h2 = g.dx * g.dx;
  const double rhs_scale = 4.0 * pi * units.kappa;
  const double rhs_max = rhs_scale * peak;
  const int nmax = std::max({g.counts[0], g.counts[1], g.counts[2]});
  const double omega = 2.0 / (1.0 + std::sin(pi / nmax));
  const std::size_t sx = g.stride(0), sy = g.stride(1);
  double* u = phi.values.data();
  const double* f = sigma0.values.data();

  auto sweep = [&](int color) {
    parallel_for(g.counts[0] - 2, [&](long ip) {
      const int i = static_cast<int>(ip) + 1;
      for (int j = 1; j < g.counts[1] - 1; ++j) {
        int k = 1 + ((i + j + 1 + color) & 1);
        for (; k < g.counts[2] - 1; k += 2) {
          const std::size_t n = g.index(i, j, k);
          const double gs = (u[n + sx] + u[n - sx] + u[n + sy] + u[n - sy] +
                             u[n + 1] + u[n - 1] - h2 * rhs_scale * f[n]) /
                            6.0;
          u[n] += omega * (gs - u[n]);
        }
      }
    });
  };
  auto residual = [&]() {
    const IndexRegion inner = interior_region(g, 1);
    return region_norms(g, inner, [&](std::size_t n) {
             const double lap = (u[n + sx] + u[n - sx] + u[n + sy] + u[n - sy] +
                                 u[n + 1] + u[n - 1] - 6.0 * u[n]) /
                                h2;
             return lap - rhs_scale * f[n];
           }).max /
           rhs_max;
  };

  double res = residual();
  for (int it = 0; it < cfg.max_iterations; ++it) {
    sweep(0);
    sweep(1);
    if ((it + 1) % 10 == 0 || it + 1 == cfg.max_iterations) {
      res = residual();
      if (res < cfg.static_tolerance) return phi;
    }
  }
  throw IterationLimitError("solve_static: no convergence after " +
                                std::to_string(cfg.max_iterations) +
                                " iterations, relative residual " +
                                std::to_string(res),
                            res);
}

struct RetardedSample {
  double phi = 0.0;
  Vec3 A{};
};

/// Direct quadrature of
///   phi(r, t) = -kappa     int sigma(r', t - |r - r'|/c) / |r - r'| d3r'
///   A(r, t)   =  kappa/c^2 int s(r', t - |r - r'|/c)     / |r - r'| d3r'
/// using `resolution`^3 midpoint nodes per body support box.
inline RetardedSample retarded_potential(const SourceModel& model, const Vec3& point,
                                         double t, int resolution,
                                         const SimulationUnits& units) {
  if (resolution < 2) throw UsageError("retarded_potential: resolution must be >= 2");
  std::vector<Bounds> boxes = model.support();
  // Merge overlapping boxes so no region is integrated twice.
  for (bool merged = true; merged;) {
    merged = false;
    for (std::size_t a = 0; a < boxes.size() && !merged; ++a)
      for (std::size_t b = a + 1; b < boxes.size() && !merged; ++b) {
        bool overlap = true;
        for (int d = 0; d < 3; ++d)
          overlap = overlap && boxes[a].lo[d] <= boxes[b].hi[d] &&
                    boxes[b].lo[d] <= boxes[a].hi[d];
        if (overlap) {
          for (int d = 0; d < 3; ++d) {
            boxes[a].lo[d] = std::min(boxes[a].lo[d], boxes[b].lo[d]);
            boxes[a].hi[d] = std::max(boxes[a].hi[d], boxes[b].hi[d]);
          }
          boxes.erase(boxes.begin() + static_cast<long>(b));
          merged = true;
        }
      }
  }
  for (const Bounds& b : boxes)
    if (b.contains(point))
      throw ProximityError("retarded_potential: probe point lies inside the source support");

  RetardedSample out;
  for (const Bounds& b : boxes) {
    Vec3 h;
    for (int d = 0; d < 3; ++d) h[d] = (b.hi[d] - b.lo[d]) / resolution;
    const double dv = h[0] * h[1] * h[2];
    std::vector<std::array<double, 4>> partial(static_cast<std::size_t>(resolution));
    parallel_for(resolution, [&](long ip) {
      std::array<double, 4> acc{};
      const double x = b.lo[0] + (ip + 0.5) * h[0];
      for (int j = 0; j < resolution; ++j)
        for (int k = 0; k < resolution; ++k) {
          const Vec3 node{x, b.lo[1] + (j + 0.5) * h[1], b.lo[2] + (k + 0.5) * h[2]};
          const double r = norm(point - node);
          const FluxPoint p = model.sample(node, t - r / units.c);
          acc[0] += p.sigma / r;
          for (int d = 0; d < 3; ++d) acc[1 + d] += p.s[d] / r;
        }
      partial[static_cast<std::size_t>(ip)] = acc;
    });
    std::array<double, 4> total{};
    for (const auto& p : partial)
      for (int d = 0; d < 4; ++d) total[d] += p[d];
    out.phi += -units.kappa * total[0] * dv;
    for (int d = 0; d < 3; ++d)
      out.A[d] += units.kappa / (units.c * units.c) * total[1 + d] * dv;
  }
  return out;
}

inline RetardedSample retarded_potential(const SourceScenario& scenario,
                                         const Vec3& point, double t, int resolution,
                                         const SimulationUnits& units) {
  return retarded_potential(SourceModel(scenario, units), point, t, resolution, units);
}

}  // namespace vecgrav
