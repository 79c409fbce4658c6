#pragma once

// Refinement studies on a fixed physical domain: residual norms at several
// resolutions and their least-squares order in dx.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "vecgrav/energy_momentum.hpp"
#include "vecgrav/errors.hpp"
#include "vecgrav/pipeline.hpp"
#include "vecgrav/report.hpp"
#include "vecgrav/waves.hpp"

namespace vecgrav {

/// Slope of log(error) against log(h) by least squares. Needs at least two
/// points with positive error.
inline double fitted_order(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size() || h.size() < 2)
    throw UsageError("fitted_order: need matching spacings and errors, at least two");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(err[i] > 0.0))
      throw UsageError("fitted_order: spacings and errors must be positive");
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw UsageError("fitted_order: spacings must differ");
  return (n * sxy - sx * sy) / den;
}

/// Grid with `n` cells along x covering the same extent as `base`
/// (counts * dx), other axes scaled in proportion.
inline Grid3 refine_grid(const Grid3& base, int n) {
  const double extent = base.counts[0] * base.dx;
  const double dx = extent / n;
  std::array<int, 3> counts{};
  for (int a = 0; a < 3; ++a)
    counts[a] = static_cast<int>(std::lround(base.counts[a] * base.dx / dx));
  return Grid3::centered(counts, dx);
}

/// Cell margin at resolution n covering the same physical width as
/// `coarse_margin` cells at the coarsest resolution.
inline int scaled_margin(int coarse_margin, int n, const std::vector<int>& resolutions) {
  const int coarsest = *std::min_element(resolutions.begin(), resolutions.end());
  return static_cast<int>(std::lround(coarse_margin * static_cast<double>(n) / coarsest));
}

/// Steps of size dt that land on t, or a scheduling error.
inline long aligned_steps(double t, double dt, const std::string& what) {
  const long steps = std::lround(t / dt);
  if (std::abs(steps * dt - t) > 1e-9 * std::max(1.0, t))
    throw SchedulingError(what + ": time " + std::to_string(t) +
                          " is not a whole number of steps of " + std::to_string(dt));
  return steps;
}

/// Residuals of this size relative to max(|F|, c|G|)/dx are round-off of
/// the centered differences themselves.
inline constexpr double kRoundoffRatio = 1e-10;

/// Adds an order check for `errors`, or a round-off check when every entry
/// is already at round-off relative to `scales` (no order to fit then).
inline void check_order(DiagnosticsReport& r, const std::string& name,
                        const std::vector<double>& errors, const std::vector<double>& scales,
                        double order, double target = 2.0, double tolerance = 0.3) {
  double worst = 0.0;
  for (std::size_t i = 0; i < errors.size(); ++i)
    worst = std::max(worst, scales[i] > 0.0 ? errors[i] / scales[i] : errors[i]);
  if (worst <= kRoundoffRatio)
    r.at_most(name + " at round-off (largest norm / derivative scale)", worst, kRoundoffRatio);
  else
    r.within(name + " fitted order", order, target, tolerance);
}

struct SourceConvergenceRow {
  int n = 0;
  double dx = 0.0;
  double r1 = 0.0, r2 = 0.0, r3 = 0.0, r4 = 0.0;  ///< L2 norms
  double chi_max = 0.0, chi_l2 = 0.0;
  double energy_l2 = 0.0, momentum_l2 = 0.0;
  double budget_closure = 0.0;  ///< |dE/dt + flux + work| at the box
  double work = 0.0;
  /// Round-off scale of a centered difference: max(|F|, c|G|) / dx.
  double derivative_scale = 0.0;
};

struct SourceConvergenceSetup {
  Grid3 base;
  SolverConfig solver;
  SourceScenario source;
  InitMode init = InitMode::static_equilibrium;
  std::vector<int> resolutions{32, 48, 64};
  double time = 48.0;
  /// Cells excluded next to each face in addition to the sponge, counted at
  /// the coarsest resolution and scaled so the region is fixed in space.
  int margin = 2;
  double box_half_width = 14.0;
};

struct SourceConvergence {
  std::vector<SourceConvergenceRow> rows;
  double order_r3 = 0, order_r4 = 0, order_chi = 0, order_energy = 0, order_momentum = 0,
         order_closure = 0;
  double order_r1 = std::nan(""), order_r2 = std::nan("");
};

inline SourceConvergence run_source_convergence(const SourceConvergenceSetup& s,
                                                const SimulationUnits& units) {
  if (s.resolutions.size() < 2) throw UsageError("convergence: need at least two resolutions");
  SourceConvergence out;
  for (int n : s.resolutions) {
    const Grid3 g = refine_grid(s.base, n);
    SolverConfig cfg = s.solver;
    // Sponge keeps its physical width.
    cfg.sponge_width =
        static_cast<int>(std::lround(s.solver.sponge_width * static_cast<double>(n) / s.base.counts[0]));
    Simulation sim(SourceModel(s.source, units), g, cfg, units, s.init);
    const long steps = aligned_steps(s.time, sim.dt(), "convergence");
    // Centered level sits one step behind the newest state.
    sim.advance(steps + 1);
    const int margin = cfg.sponge_width + scaled_margin(s.margin, n, s.resolutions);
    const MaxwellResiduals r = sim.residuals(margin);
    const ConservationReport c = sim.conservation(margin);
    const IndexRegion inner = interior_region(g, margin);
    const Norms chi = norms(sim.gauge(0).chi, inner);
    // The budget closes for any box since the work is taken over the same
    // cells, so the box may cut through the source.
    const EnergyBox box = make_box(g, 0.5 * (g.origin + g.upper()), s.box_half_width);
    const double flux = surface_energy_flux(sim.fields(0), box, units);
    const double work = box_work_on_source(sim.fields(0), sim.source(0), box);
    const double dE = (box_energy(sim.fields(1), box, units) -
                       box_energy(sim.fields(-1), box, units)) / (2.0 * sim.dt());
    const double fmax = std::max(norms(sim.fields(0).F, inner).max,
                                 units.c * norms(sim.fields(0).G, inner).max);
    out.rows.push_back({n, g.dx, r.div_G_norms.l2, r.faraday_norms.l2, r.gauss_norms.l2,
                        r.ampere_norms.l2, chi.max, chi.l2, c.energy_norms.l2,
                        c.momentum_norms.l2, std::abs(dE + flux + work), work, fmax / g.dx});
  }
  std::vector<double> h, r1, r2, r3, r4, chi, en, mo, cl;
  for (const auto& row : out.rows) {
    h.push_back(row.dx);
    r1.push_back(row.r1);
    r2.push_back(row.r2);
    r3.push_back(row.r3);
    r4.push_back(row.r4);
    chi.push_back(row.chi_max);
    en.push_back(row.energy_l2);
    mo.push_back(row.momentum_l2);
    cl.push_back(row.budget_closure);
  }
  auto safe = [&](const std::vector<double>& e) {
    for (double v : e)
      if (!(v > 0.0)) return std::nan("");
    return fitted_order(h, e);
  };
  out.order_r1 = safe(r1);
  out.order_r2 = safe(r2);
  out.order_r3 = safe(r3);
  out.order_r4 = safe(r4);
  out.order_chi = safe(chi);
  out.order_energy = safe(en);
  out.order_momentum = safe(mo);
  out.order_closure = safe(cl);
  return out;
}

struct WaveConvergenceRow {
  int n = 0;
  double dx = 0.0;
  double translation_error = 0.0;  ///< relative L2 error of F after the run
  /// Residuals of the analytic wave sampled on the grid (no time stepping).
  double analytic_r1 = 0, analytic_r2 = 0, analytic_r3 = 0, analytic_r4 = 0;
  double analytic_scale = 0.0;  ///< max(|F|, c|G|) / dx
  /// Conservation residuals of the leapfrog run at its last centered level.
  double energy_l2 = 0.0, momentum_l2 = 0.0;
  WaveDiagnostics diagnostics;
};

struct WaveConvergence {
  std::vector<WaveConvergenceRow> rows;
  double order_translation = 0, order_r3 = 0, order_r4 = 0, order_energy = 0,
         order_momentum = 0;
  double order_r1 = std::nan(""), order_r2 = std::nan("");
};

/// Residuals of the closed-form wave sampled at t - dt .. t + 2 dt.
inline std::pair<MaxwellResiduals, ConservationReport> analytic_wave_residuals(
    const PlaneWaveSpec& spec, const Grid3& grid, const SolverConfig& cfg,
    const SimulationUnits& units, double t, int margin) {
  const double dt = stable_time_step(grid, cfg, units);
  auto state = [&](double tc) {
    PotentialState s = zero_state(grid, cfg, units, tc);
    s.previous = plane_wave_level(spec, grid, tc - dt, units);
    s.current = plane_wave_level(spec, grid, tc, units);
    return s;
  };
  const PotentialState s0 = state(t - dt), s1 = state(t), s2 = state(t + dt), s3 = state(t + 2 * dt);
  const FieldPair f0 = derive_fields(s0, s1), f1 = derive_fields(s1, s2), f2 = derive_fields(s2, s3);
  const GaugeScalar c0 = gauge_scalar(s0, s1, units), c1 = gauge_scalar(s1, s2, units),
                    c2 = gauge_scalar(s2, s3, units);
  const MassFluxState e0 = empty_source(grid, f0.time), e1 = empty_source(grid, f1.time),
                      e2 = empty_source(grid, f2.time);
  return {eq5_residuals(f0, f1, f2, c0, c1, c2, e1, units, margin),
          conservation_residual(f0, f1, f2, e0, e1, e2, units, margin)};
}

inline WaveConvergence run_wave_convergence(const PlaneWaveSpec& spec, const Grid3& base,
                                            const std::vector<int>& resolutions,
                                            const SolverConfig& solver,
                                            const SimulationUnits& units, double duration,
                                            int margin = 2) {
  if (resolutions.size() < 2) throw UsageError("wave convergence: need at least two resolutions");
  WaveConvergence out;
  for (int n : resolutions) {
    const Grid3 g = refine_grid(base, n);
    WaveConvergenceRow row;
    row.n = n;
    row.dx = g.dx;
    SolverConfig cfg = solver;
    cfg.sponge_width = 0;
    aligned_steps(duration, stable_time_step(g, cfg, units), "wave convergence");
    const int m = scaled_margin(margin, n, resolutions);
    row.diagnostics = run_translation_test(spec, g, cfg, units, duration, m);
    row.translation_error = row.diagnostics.relative_error;
    row.energy_l2 = row.diagnostics.energy_residual_l2;
    row.momentum_l2 = row.diagnostics.momentum_residual_l2;
    const auto [res, cons] = analytic_wave_residuals(spec, g, cfg, units, 0.0, m);
    (void)cons;
    row.analytic_r1 = res.div_G_norms.l2;
    row.analytic_r2 = res.faraday_norms.l2;
    row.analytic_r3 = res.gauss_norms.l2;
    row.analytic_r4 = res.ampere_norms.l2;
    double fmax = 0.0;
    for (int i = 0; i < g.counts[0]; ++i) {
      const FieldSample f = plane_wave_fields(spec, g.position(i, 0, 0), 0.0, units);
      fmax = std::max({fmax, norm(f.F), units.c * norm(f.G)});
    }
    row.analytic_scale = fmax / g.dx;
    out.rows.push_back(row);
  }
  std::vector<double> h, tr, r1, r2, r3, r4, en, mo;
  for (const auto& row : out.rows) {
    h.push_back(row.dx);
    tr.push_back(row.translation_error);
    r1.push_back(row.analytic_r1);
    r2.push_back(row.analytic_r2);
    r3.push_back(row.analytic_r3);
    r4.push_back(row.analytic_r4);
    en.push_back(row.energy_l2);
    mo.push_back(row.momentum_l2);
  }
  auto safe = [&](const std::vector<double>& e) {
    for (double v : e)
      if (!(v > 0.0)) return std::nan("");
    return fitted_order(h, e);
  };
  out.order_translation = safe(tr);
  out.order_r1 = safe(r1);
  out.order_r2 = safe(r2);
  out.order_r3 = safe(r3);
  out.order_r4 = safe(r4);
  out.order_energy = safe(en);
  out.order_momentum = safe(mo);
  return out;
}

}  // namespace vecgrav
