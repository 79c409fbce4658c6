#pragma once

// F = grad phi - dA/dt, G = curl A, the default force density
// g = -sigma F - s x G, the gauge scalar chi = div A - c^-2 dphi/dt and the
// residuals of the Maxwell-form relations
//   div G = 0,  dG/dt + curl F = 0,  div F = 4 pi kappa sigma - dchi/dt,
//   curl G - c^-2 dF/dt = 4 pi kappa c^-2 s + grad chi.

#include <cmath>
#include <string>

#include "vecgrav/errors.hpp"
#include "vecgrav/grid.hpp"
#include "vecgrav/operators.hpp"
#include "vecgrav/potential_solvers.hpp"
#include "vecgrav/sources.hpp"
#include "vecgrav/units.hpp"

namespace vecgrav {

struct FieldPair {
  VectorField F;
  VectorField G;
  double time = 0.0;
};

struct GaugeScalar {
  ScalarField chi;
  double time = 0.0;
};

struct MaxwellResiduals {
  ScalarField div_G;           ///< r1
  VectorField faraday;         ///< r2 = dG/dt + curl F
  ScalarField gauss;           ///< r3 = div F - 4 pi kappa sigma + dchi/dt
  VectorField ampere;          ///< r4 = curl G - c^-2 dF/dt - 4 pi kappa c^-2 s - grad chi
  Norms div_G_norms, faraday_norms, gauss_norms, ampere_norms;
};

namespace detail {

inline bool same_time(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

/// `next` must continue `state` by one step of the same size.
inline void require_consecutive(const PotentialState& state, const PotentialState& next,
                                const char* what) {
  if (!same_time(state.dt, next.dt) || !same_time(next.time, state.time + state.dt))
    throw SchedulingError(std::string(what) +
                          ": potential states are not consecutive equal steps");
  require_same_grid(state.grid(), next.grid(), what);
}

inline void require_spacing(double t0, double t1, double t2, const char* what) {
  if (!same_time(t1 - t0, t2 - t1) || !(t1 > t0))
    throw SchedulingError(std::string(what) + ": time levels are not equally spaced");
}

}  // namespace detail

/// Fields at state.time from the levels (t - dt, t, t + dt).
inline FieldPair derive_fields(const PotentialState& state, const PotentialState& next) {
  detail::require_consecutive(state, next, "derive_fields");
  const Grid3& g = state.grid();
  FieldPair out{grad(state.current.phi), curl(state.current.A), state.time};
  const double inv = 1.0 / (2.0 * state.dt);
  for (int a = 0; a < 3; ++a) {
    const auto& ap = next.current.A[a].values;
    const auto& am = state.previous.A[a].values;
    auto& f = out.F[a].values;
    for (std::size_t n = 0; n < g.size(); ++n) f[n] -= (ap[n] - am[n]) * inv;
  }
  return out;
}

/// g = -sigma F - s x G, per cell.
inline VectorField force_density(const FieldPair& fields, const MassFluxState& source) {
  const Grid3& g = fields.F.grid();
  require_same_grid(fields.G.grid(), g, "force_density");
  require_same_grid(source.sigma.grid, g, "force_density");
  require_same_grid(source.flux.grid(), g, "force_density");
  if (!detail::same_time(fields.time, source.time))
    throw SchedulingError("force_density: fields and source at different times");
  VectorField out(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double sigma = source.sigma.values[n];
    const Vec3 F = fields.F.at(n);
    const Vec3 sxG = cross(source.flux.at(n), fields.G.at(n));
    out.set(n, {-sigma * F[0] - sxG[0], -sigma * F[1] - sxG[1], -sigma * F[2] - sxG[2]});
  }
  return out;
}

inline GaugeScalar gauge_scalar(const PotentialState& state, const PotentialState& next,
                                const SimulationUnits& units) {
  detail::require_consecutive(state, next, "gauge_scalar");
  GaugeScalar out{div(state.current.A), state.time};
  const double scale = 1.0 / (units.c * units.c * 2.0 * state.dt);
  const auto& pp = next.current.phi.values;
  const auto& pm = state.previous.phi.values;
  for (std::size_t n = 0; n < out.chi.values.size(); ++n)
    out.chi.values[n] -= (pp[n] - pm[n]) * scale;
  return out;
}

/// Residuals at the middle level. `margin` cells next to each face (sponge
/// plus stencil reach) are excluded from the norms.
inline MaxwellResiduals eq5_residuals(const FieldPair& before, const FieldPair& at,
                                      const FieldPair& after, const GaugeScalar& chi_before,
                                      const GaugeScalar& chi_at, const GaugeScalar& chi_after,
                                      const MassFluxState& source,
                                      const SimulationUnits& units, int margin) {
  detail::require_spacing(before.time, at.time, after.time, "eq5_residuals");
  detail::require_spacing(chi_before.time, chi_at.time, chi_after.time, "eq5_residuals");
  if (!detail::same_time(at.time, chi_at.time) || !detail::same_time(at.time, source.time))
    throw SchedulingError("eq5_residuals: fields, gauge and source at different times");
  const Grid3& g = at.F.grid();
  require_same_grid(before.F.grid(), g, "eq5_residuals");
  require_same_grid(after.F.grid(), g, "eq5_residuals");
  require_same_grid(chi_at.chi.grid, g, "eq5_residuals");
  require_same_grid(source.sigma.grid, g, "eq5_residuals");

  const double dt = at.time - before.time;
  const double inv2dt = 1.0 / (2.0 * dt);
  const double c2 = units.c * units.c;
  const double k4 = 4.0 * pi * units.kappa;

  MaxwellResiduals r;
  r.div_G = div(at.G);
  r.faraday = curl(at.F);
  r.gauss = div(at.F);
  r.ampere = curl(at.G);
  const VectorField grad_chi = grad(chi_at.chi);
  for (std::size_t n = 0; n < g.size(); ++n) {
    for (int a = 0; a < 3; ++a) {
      r.faraday[a].values[n] += (after.G[a].values[n] - before.G[a].values[n]) * inv2dt;
      r.ampere[a].values[n] -= (after.F[a].values[n] - before.F[a].values[n]) * inv2dt / c2 +
                               k4 / c2 * source.flux[a].values[n] + grad_chi[a].values[n];
    }
    r.gauss.values[n] += -k4 * source.sigma.values[n] +
                         (chi_after.chi.values[n] - chi_before.chi.values[n]) * inv2dt;
  }
  const IndexRegion inner = interior_region(g, margin);
  r.div_G_norms = norms(r.div_G, inner);
  r.faraday_norms = norms(r.faraday, inner);
  r.gauss_norms = norms(r.gauss, inner);
  r.ampere_norms = norms(r.ampere, inner);
  return r;
}

}  // namespace vecgrav
