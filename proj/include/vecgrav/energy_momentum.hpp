#pragma once

// Poynting-form energy-momentum tensor of the field,
//   tau_ks = c^2/(4 pi kappa) L_km L_sm - c^2/(16 pi kappa) L_nm L_nm delta_ks,
// with L_km = d_m Phi_k - d_k Phi_m, and its real-form pieces
//   W = tau_44,  S_a = i c tau_4a,  p_a = (i/c) tau_a4.
// In terms of F and G:
//   W = -(F^2 + c^2 G^2) / (8 pi kappa),  S = -c^2/(4 pi kappa) F x G,
//   p = S / c^2,
//   T_ab = (-F_a F_b - c^2 G_a G_b + delta_ab (F^2 + c^2 G^2)/2) / (4 pi kappa).
// The conservation law d_s tau_ks = g_k becomes
//   dW/dt + div S = s . F                     (energy)
//   d_b T_ab - dp_a/dt = g_a                  (momentum)
// where the work done by the field on the source is g . v = -s . F.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "vecgrav/errors.hpp"
#include "vecgrav/field_kinematics.hpp"
#include "vecgrav/force_laws.hpp"
#include "vecgrav/grid.hpp"
#include "vecgrav/operators.hpp"
#include "vecgrav/sources.hpp"
#include "vecgrav/units.hpp"

namespace vecgrav {

using Mat3 = std::array<Vec3, 3>;

/// L_km = d_m Phi_k - d_k Phi_m from dPhi[j][n] = d_j Phi_n.
inline CMatrix4 l_tensor(const CMatrix4& dPhi) {
  CMatrix4 L{};
  for (int k = 0; k < 4; ++k)
    for (int m = 0; m < 4; ++m) L[k][m] = dPhi[m][k] - dPhi[k][m];
  return L;
}

/// Real-form L: L_ab = -e_abc G_c, L_a4 = (i/c) F_a.
inline CMatrix4 l_tensor_from_fields(const Vec3& F, const Vec3& G,
                                     const SimulationUnits& units) {
  const Complex i(0.0, 1.0);
  CMatrix4 L{};
  L[0][1] = -G[2];
  L[1][0] = G[2];
  L[1][2] = -G[0];
  L[2][1] = G[0];
  L[2][0] = -G[1];
  L[0][2] = G[1];
  for (int a = 0; a < 3; ++a) {
    L[a][3] = i / units.c * F[a];
    L[3][a] = -L[a][3];
  }
  return L;
}

inline CMatrix4 stress_from_L(const CMatrix4& L, const SimulationUnits& units) {
  const double c2 = units.c * units.c;
  const double a = c2 / (4.0 * pi * units.kappa);
  const double b = c2 / (16.0 * pi * units.kappa);
  Complex l2{};
  for (int n = 0; n < 4; ++n)
    for (int m = 0; m < 4; ++m) l2 += L[n][m] * L[n][m];
  CMatrix4 tau{};
  for (int k = 0; k < 4; ++k)
    for (int s = 0; s < 4; ++s) {
      Complex acc{};
      for (int m = 0; m < 4; ++m) acc += L[k][m] * L[s][m];
      tau[k][s] = a * acc - (k == s ? b * l2 : Complex{});
    }
  return tau;
}

struct StressSample {
  double W = 0.0;
  Vec3 S{};
  Vec3 p{};
  Mat3 T{};
};

/// Real parts of W = tau_44, S_a = i c tau_4a, p_a = (i/c) tau_a4, T_ab = tau_ab.
inline StressSample extract_stress(const CMatrix4& tau, const SimulationUnits& units) {
  const Complex i(0.0, 1.0);
  StressSample out;
  out.W = tau[3][3].real();
  for (int a = 0; a < 3; ++a) {
    out.S[a] = (i * units.c * tau[3][a]).real();
    out.p[a] = (i / units.c * tau[a][3]).real();
    for (int b = 0; b < 3; ++b) out.T[a][b] = tau[a][b].real();
  }
  return out;
}

inline StressSample stress_from_fields(const Vec3& F, const Vec3& G,
                                       const SimulationUnits& units) {
  const double c2 = units.c * units.c;
  const double k4 = 4.0 * pi * units.kappa;
  const double e2 = dot(F, F) + c2 * dot(G, G);
  StressSample out;
  out.W = -e2 / (2.0 * k4);
  const Vec3 fxg = cross(F, G);
  for (int a = 0; a < 3; ++a) {
    out.S[a] = -c2 / k4 * fxg[a];
    out.p[a] = -fxg[a] / k4;
    for (int b = 0; b < 3; ++b)
      out.T[a][b] = (-F[a] * F[b] - c2 * G[a] * G[b] + (a == b ? 0.5 * e2 : 0.0)) / k4;
  }
  return out;
}

inline ScalarField energy_density(const FieldPair& fields, const SimulationUnits& units) {
  const Grid3& g = fields.F.grid();
  require_same_grid(fields.G.grid(), g, "energy_density");
  ScalarField W(g);
  const double c2 = units.c * units.c;
  const double scale = -1.0 / (8.0 * pi * units.kappa);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec3 F = fields.F.at(n), G = fields.G.at(n);
    W.values[n] = scale * (dot(F, F) + c2 * dot(G, G));
  }
  return W;
}

inline VectorField energy_flux(const FieldPair& fields, const SimulationUnits& units) {
  const Grid3& g = fields.F.grid();
  require_same_grid(fields.G.grid(), g, "energy_flux");
  VectorField S(g);
  const double scale = -units.c * units.c / (4.0 * pi * units.kappa);
  for (std::size_t n = 0; n < g.size(); ++n)
    S.set(n, scale * cross(fields.F.at(n), fields.G.at(n)));
  return S;
}

inline VectorField momentum_density(const FieldPair& fields, const SimulationUnits& units) {
  VectorField p = energy_flux(fields, units);
  const double inv = 1.0 / (units.c * units.c);
  for (int a = 0; a < 3; ++a)
    for (double& v : p[a].values) v *= inv;
  return p;
}

struct ConservationReport {
  ScalarField energy;    ///< dW/dt + div S - s . F
  VectorField momentum;  ///< d_b T_ab - dp_a/dt - g_a
  Norms energy_norms, momentum_norms;
  /// False when the source's discrete continuity residual exceeds 10% of its
  /// own scale; the conservation law presumes d_k s_k = 0.
  bool continuity_ok = true;
  double continuity_ratio = 0.0;
};

/// Residuals of d_s tau_ks = g_k at the middle level.
inline ConservationReport conservation_residual(
    const FieldPair& before, const FieldPair& at, const FieldPair& after,
    const MassFluxState& src_before, const MassFluxState& src_at,
    const MassFluxState& src_after, const SimulationUnits& units, int margin) {
  detail::require_spacing(before.time, at.time, after.time, "conservation_residual");
  if (!detail::same_time(at.time, src_at.time))
    throw SchedulingError("conservation_residual: fields and source at different times");
  const Grid3& g = at.F.grid();
  require_same_grid(before.F.grid(), g, "conservation_residual");
  require_same_grid(after.F.grid(), g, "conservation_residual");
  require_same_grid(src_at.sigma.grid, g, "conservation_residual");
  const double dt = at.time - before.time;

  ConservationReport r;
  const ContinuityReport cont = continuity_residual(src_before, src_at, src_after, dt);
  r.continuity_ratio = cont.scale > 0.0 ? cont.norms.max / cont.scale : 0.0;
  r.continuity_ok = r.continuity_ratio <= 0.1;

  const ScalarField W_before = energy_density(before, units);
  const ScalarField W_after = energy_density(after, units);
  const VectorField S = energy_flux(at, units);
  const VectorField p_before = momentum_density(before, units);
  const VectorField p_after = momentum_density(after, units);
  const VectorField force = force_density(at, src_at);

  r.energy = div(S);
  const double inv2dt = 1.0 / (2.0 * dt);
  for (std::size_t n = 0; n < g.size(); ++n)
    r.energy.values[n] += (W_after.values[n] - W_before.values[n]) * inv2dt -
                          dot(src_at.flux.at(n), at.F.at(n));

  // Rows of the spatial stress at the middle level.
  std::array<VectorField, 3> rows{VectorField(g), VectorField(g), VectorField(g)};
  for (std::size_t n = 0; n < g.size(); ++n) {
    const StressSample st = stress_from_fields(at.F.at(n), at.G.at(n), units);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) rows[a][b].values[n] = st.T[a][b];
  }
  r.momentum = VectorField(g);
  for (int a = 0; a < 3; ++a) {
    const ScalarField dT = div(rows[a]);
    for (std::size_t n = 0; n < g.size(); ++n)
      r.momentum[a].values[n] =
          dT.values[n] - (p_after[a].values[n] - p_before[a].values[n]) * inv2dt -
          force[a].values[n];
  }
  const IndexRegion inner = interior_region(g, margin);
  r.energy_norms = norms(r.energy, inner);
  r.momentum_norms = norms(r.momentum, inner);
  return r;
}

/// Axis-aligned box made of whole cells; its surface runs through the faces
/// midway between the outermost box cells and their outside neighbours.
struct EnergyBox {
  IndexRegion cells;
};

/// Cells whose node lies within `half_width` (max-norm) of `center`.
inline EnergyBox make_box(const Grid3& g, const Vec3& center, double half_width) {
  EnergyBox box;
  for (int a = 0; a < 3; ++a) {
    const double lo = (center[a] - half_width - g.origin[a]) / g.dx;
    const double hi = (center[a] + half_width - g.origin[a]) / g.dx;
    box.cells.lo[a] = static_cast<int>(std::ceil(lo - 1e-9));
    box.cells.hi[a] = static_cast<int>(std::floor(hi + 1e-9)) + 1;
  }
  return box;
}

/// The box must stay clear of the sponge (plus one stencil cell) and its
/// surface must not cut any source support box.
inline void validate_box(const EnergyBox& box, const Grid3& g, int sponge_width,
                         const std::vector<Bounds>& source_support) {
  const int clearance = sponge_width + 2;
  for (int a = 0; a < 3; ++a)
    if (box.cells.lo[a] < clearance || box.cells.hi[a] > g.counts[a] - clearance ||
        box.cells.hi[a] <= box.cells.lo[a])
      throw GeometryError("energy box intersects the sponge layer or grid edge on axis " +
                          std::to_string(a));
  Vec3 lo, hi;
  for (int a = 0; a < 3; ++a) {
    lo[a] = g.origin[a] + (box.cells.lo[a] - 0.5) * g.dx;
    hi[a] = g.origin[a] + (box.cells.hi[a] - 0.5) * g.dx;
  }
  for (const Bounds& b : source_support) {
    bool inside = true, outside = false;
    for (int a = 0; a < 3; ++a) {
      inside = inside && b.lo[a] > lo[a] && b.hi[a] < hi[a];
      outside = outside || b.hi[a] < lo[a] || b.lo[a] > hi[a];
    }
    if (!inside && !outside)
      throw GeometryError("energy box surface cuts through the source support");
  }
}

/// Outward flux of S through the box surface by midpoint quadrature; face
/// values average the two cells on either side.
inline double surface_energy_flux(const FieldPair& fields, const EnergyBox& box,
                                  const SimulationUnits& units) {
  const Grid3& g = fields.F.grid();
  const IndexRegion& c = box.cells;
  for (int a = 0; a < 3; ++a)
    if (c.lo[a] < 1 || c.hi[a] > g.counts[a] - 1)
      throw GeometryError("surface_energy_flux: box touches the grid edge");
  const double scale = -units.c * units.c / (4.0 * pi * units.kappa);
  auto flux_component = [&](int i, int j, int k, int a) {
    const std::size_t n = g.index(i, j, k);
    return scale * cross(fields.F.at(n), fields.G.at(n))[a];
  };
  const double area = g.dx * g.dx;
  double total = 0.0;
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, d = (a + 2) % 3;
    for (int side = 0; side < 2; ++side) {
      const int in = side == 0 ? c.lo[a] : c.hi[a] - 1;
      const int out = side == 0 ? c.lo[a] - 1 : c.hi[a];
      const double sign = side == 0 ? -1.0 : 1.0;
      double face = 0.0;
      for (int u = c.lo[b]; u < c.hi[b]; ++u)
        for (int w = c.lo[d]; w < c.hi[d]; ++w) {
          std::array<int, 3> pin{}, pout{};
          pin[a] = in;
          pout[a] = out;
          pin[b] = pout[b] = u;
          pin[d] = pout[d] = w;
          face += 0.5 * (flux_component(pin[0], pin[1], pin[2], a) +
                         flux_component(pout[0], pout[1], pout[2], a));
        }
      total += sign * face * area;
    }
  }
  return total;
}

/// Field energy inside the box, sum of W dx^3.
inline double box_energy(const FieldPair& fields, const EnergyBox& box,
                         const SimulationUnits& units) {
  const Grid3& g = fields.F.grid();
  const double c2 = units.c * units.c;
  const double scale = -1.0 / (8.0 * pi * units.kappa);
  return region_integral(g, box.cells, [&](std::size_t n) {
    const Vec3 F = fields.F.at(n), G = fields.G.at(n);
    return scale * (dot(F, F) + c2 * dot(G, G));
  });
}

/// Rate of work done by the field on the source inside the box,
/// sum of g . v dx^3 = -sum of s . F dx^3.
inline double box_work_on_source(const FieldPair& fields, const MassFluxState& source,
                                 const EnergyBox& box) {
  const Grid3& g = fields.F.grid();
  return region_integral(g, box.cells, [&](std::size_t n) {
    return -dot(source.flux.at(n), fields.F.at(n));
  });
}

}  // namespace vecgrav
