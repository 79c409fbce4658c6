#pragma once

// Plane gravitational waves travelling along +x,
//   F = (0, c a1(u), c a2(u)),  G = (0, -a2(u), a1(u)),  u = x - c t,
// generated by phi = 0, A = (0, A1(u), A2(u)) with A_i' = a_i.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "vecgrav/energy_momentum.hpp"
#include "vecgrav/field_kinematics.hpp"
#include "vecgrav/pipeline.hpp"
#include "vecgrav/potential_solvers.hpp"
#include "vecgrav/units.hpp"

namespace vecgrav {

struct SinusoidProfile {
  double amplitude = 1.0;
  double wavenumber = 1.0;
  double phase = 0.0;
  friend bool operator==(const SinusoidProfile&, const SinusoidProfile&) = default;
};

struct GaussianPulse {
  double amplitude = 1.0;
  double center = 0.0;
  double width = 1.0;
  friend bool operator==(const GaussianPulse&, const GaussianPulse&) = default;
};

struct ConstantProfile {
  double value = 0.0;
  friend bool operator==(const ConstantProfile&, const ConstantProfile&) = default;
};

using WaveProfile = std::variant<SinusoidProfile, GaussianPulse, ConstantProfile>;

inline double profile_value(const WaveProfile& p, double u) {
  return std::visit(
      [u](const auto& q) -> double {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, SinusoidProfile>) {
          return q.amplitude * std::sin(q.wavenumber * u + q.phase);
        } else if constexpr (std::is_same_v<T, GaussianPulse>) {
          const double z = (u - q.center) / q.width;
          return q.amplitude * std::exp(-0.5 * z * z);
        } else {
          return q.value;
        }
      },
      p);
}

/// Antiderivative in u (the integration constant is fixed by each closed form).
inline double profile_antiderivative(const WaveProfile& p, double u) {
  return std::visit(
      [u](const auto& q) -> double {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, SinusoidProfile>) {
          if (q.wavenumber == 0.0) return q.amplitude * std::sin(q.phase) * u;
          return -q.amplitude / q.wavenumber * std::cos(q.wavenumber * u + q.phase);
        } else if constexpr (std::is_same_v<T, GaussianPulse>) {
          return q.amplitude * q.width * std::sqrt(pi / 2.0) *
                 std::erf((u - q.center) / (std::sqrt(2.0) * q.width));
        } else {
          return q.value * u;
        }
      },
      p);
}

struct PlaneWaveSpec {
  WaveProfile a1 = ConstantProfile{};
  WaveProfile a2 = ConstantProfile{};
  friend bool operator==(const PlaneWaveSpec&, const PlaneWaveSpec&) = default;
};

struct FieldSample {
  Vec3 F{};
  Vec3 G{};
};

struct WaveEnergySample {
  double W = 0.0;
  Vec3 S{};
};

inline FieldSample plane_wave_fields(const PlaneWaveSpec& spec, const Vec3& x, double t,
                                     const SimulationUnits& units) {
  const double u = x[0] - units.c * t;
  const double a1 = profile_value(spec.a1, u);
  const double a2 = profile_value(spec.a2, u);
  return {{0.0, units.c * a1, units.c * a2}, {0.0, -a2, a1}};
}

inline PotentialPoint plane_wave_potential(const PlaneWaveSpec& spec, const Vec3& x,
                                           double t, const SimulationUnits& units) {
  const double u = x[0] - units.c * t;
  return {0.0, {0.0, profile_antiderivative(spec.a1, u), profile_antiderivative(spec.a2, u)}};
}

/// W = -c^2 (a1^2 + a2^2) / (4 pi kappa), S = (W c, 0, 0).
inline WaveEnergySample wave_energy(const PlaneWaveSpec& spec, const Vec3& x, double t,
                                    const SimulationUnits& units) {
  const double u = x[0] - units.c * t;
  const double a1 = profile_value(spec.a1, u);
  const double a2 = profile_value(spec.a2, u);
  const double W = -units.c * units.c / (4.0 * pi * units.kappa) * (a1 * a1 + a2 * a2);
  return {W, {W * units.c, 0.0, 0.0}};
}

inline PotentialLevel plane_wave_level(const PlaneWaveSpec& spec, const Grid3& grid, double t,
                                       const SimulationUnits& units) {
  PotentialLevel level(grid);
  level.A = sample_vector(grid, [&](const Vec3& x) { return plane_wave_potential(spec, x, t, units).A; });
  return level;
}

/// Leapfrog initial data sampled from the closed form at t0 - dt and t0.
inline PotentialState plane_wave_state(const PlaneWaveSpec& spec, const Grid3& grid,
                                       const SolverConfig& cfg, const SimulationUnits& units,
                                       double t0 = 0.0) {
  PotentialState s = zero_state(grid, cfg, units, t0);
  s.previous = plane_wave_level(spec, grid, t0 - s.dt, units);
  s.current = plane_wave_level(spec, grid, t0, units);
  return s;
}

inline BoundaryDriver plane_wave_driver(const PlaneWaveSpec& spec, const SimulationUnits& units) {
  return [spec, units](const Vec3& x, double t) { return plane_wave_potential(spec, x, t, units); };
}

struct WaveDiagnostics {
  std::vector<double> x;
  std::vector<double> W;   ///< numerical W along the grid centerline
  std::vector<double> Sx;  ///< numerical S_x along the centerline
  double l2_error = 0.0;   ///< discrete L2 norm of F_numeric - F_exact
  double l2_norm = 0.0;    ///< discrete L2 norm of F_exact
  double relative_error = 0.0;
  double time = 0.0;
  double max_W = 0.0;               ///< largest W seen (must be <= 0)
  double flux_magnitude_defect = 0.0;  ///< max | |S| - |W| c | / max|W| c
  /// S_x <= 0 wherever the analytic wave has at least 1e-3 of its peak |W|.
  bool flux_opposes_propagation = true;
  /// Residual norms of the leapfrog run at its last centered level.
  MaxwellResiduals residuals;
  double energy_residual_l2 = 0.0;
  double momentum_residual_l2 = 0.0;
};

/// Propagates the analytic wave with the leapfrog solver (boundary shell
/// driven by the closed form, no sponge) and compares F after `duration`.
inline WaveDiagnostics run_translation_test(const PlaneWaveSpec& spec, const Grid3& grid,
                                            SolverConfig cfg, const SimulationUnits& units,
                                            double duration, int margin = 2) {
  cfg.sponge_width = 0;
  Simulation sim(plane_wave_state(spec, grid, cfg, units), cfg, units,
                 plane_wave_driver(spec, units));
  const long steps = std::lround(duration / sim.dt());
  sim.advance(steps + 1);
  const FieldPair& f = sim.latest_fields();

  WaveDiagnostics d;
  d.time = f.time;
  const IndexRegion inner = interior_region(grid, margin);
  const FieldPair exact{sample_vector(grid, [&](const Vec3& x) { return plane_wave_fields(spec, x, f.time, units).F; }),
                        VectorField(grid), f.time};
  VectorField diff(grid);
  for (std::size_t n = 0; n < grid.size(); ++n) diff.set(n, f.F.at(n) - exact.F.at(n));
  d.l2_error = norms(diff, inner).l2;
  d.l2_norm = norms(exact.F, inner).l2;
  d.relative_error = d.l2_norm > 0.0 ? d.l2_error / d.l2_norm : d.l2_error;
  d.residuals = sim.residuals(margin);
  const ConservationReport cons = sim.conservation(margin);
  d.energy_residual_l2 = cons.energy_norms.l2;
  d.momentum_residual_l2 = cons.momentum_norms.l2;

  const ScalarField W = energy_density(f, units);
  const VectorField S = energy_flux(f, units);
  double wmax_abs = 0.0, exact_max = 0.0;
  std::vector<double> exact_W(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    wmax_abs = std::max(wmax_abs, std::abs(W.values[n]));
    const int i = static_cast<int>(n / grid.stride(0));
    exact_W[n] = std::abs(wave_energy(spec, grid.position(i, 0, 0), f.time, units).W);
    exact_max = std::max(exact_max, exact_W[n]);
  }
  d.max_W = -wmax_abs;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    d.max_W = std::max(d.max_W, W.values[n]);
    if (wmax_abs > 0.0) {
      const double defect = std::abs(norm(S.at(n)) - std::abs(W.values[n]) * units.c);
      d.flux_magnitude_defect = std::max(d.flux_magnitude_defect, defect / (wmax_abs * units.c));
    }
    // Only where the pulse itself carries energy; the dispersive wake moves
    // the other way and rightly has S_x > 0.
    if (exact_W[n] >= 1e-3 * exact_max && S[0].values[n] > 0.0) d.flux_opposes_propagation = false;
  }
  const int j = grid.counts[1] / 2, k = grid.counts[2] / 2;
  for (int i = 0; i < grid.counts[0]; ++i) {
    const std::size_t n = grid.index(i, j, k);
    d.x.push_back(grid.position(i, j, k)[0]);
    d.W.push_back(W.values[n]);
    d.Sx.push_back(S[0].values[n]);
  }
  return d;
}

struct EnergyRow {
  double t = 0.0;
  double total_W = 0.0;         ///< field energy inside the outer box
  double surface_flux = 0.0;    ///< outward flux through its surface
  double work_on_source = 0.0;  ///< -integral of s . F over the box
};

struct RadiationSettings {
  Grid3 grid;
  SolverConfig solver;
  SourceScenario source;
  InitMode init = InitMode::static_equilibrium;
  double duration = 0.0;
  double inner_half_width = 0.0;
  double outer_half_width = 0.0;
  /// Averaging period; flux means are taken over the last `average_cycles`
  /// whole periods of the run.
  double period = 0.0;
  int average_cycles = 2;
  /// Window in which the one-period moving average of the outer-box energy
  /// must fall at every step. Empty window: trend not checked.
  double trend_start = 0.0;
  double trend_end = 0.0;
  std::optional<Vec3> probe;
  int retarded_resolution = 48;
  double probe_start = 0.0;
  /// Cells excluded next to each face (beyond the sponge) in the residual
  /// norms of the final level.
  int residual_margin = 2;
};

struct RadiationDiagnostics {
  double mean_flux_inner = 0.0;
  double mean_flux_outer = 0.0;
  /// |inner - outer| / max(|inner|, |outer|), 0 when both vanish.
  double flux_disagreement = 0.0;
  double mean_work = 0.0;
  bool trend_checked = false;
  bool energy_trend_monotone = false;
  int energy_trend_increases = 0;
  /// Spread of the moving-average energy over the averaging window,
  /// relative to its magnitude.
  double plateau_drift = 0.0;
  double budget_closure = 0.0;  ///< max |dE/dt + flux + work| over the run
  double work_scale = 0.0;      ///< max |work| over the run
  double max_W = 0.0;           ///< largest W over every cell and level
  bool probe_checked = false;
  Vec3 probe_node{};
  double probe_phi_error = 0.0;  ///< max |phi_lf - phi_ret| / max |phi_ret|
  double probe_A_error = 0.0;    ///< same with |A|
  std::vector<EnergyRow> energy;
  double final_time = 0.0;
  /// Residual and gauge norms at the last centered level.
  MaxwellResiduals final_residuals;
  ConservationReport final_conservation;
  Norms final_chi;
};

/// One-period moving-average trend of the energy of a box around the source
/// while radiation fills it: from one period after motion starts until the
/// ramp has finished and light has crossed to the box corner.
inline std::pair<double, double> default_trend_window(double period, double ramp_time,
                                                      double outer_half_width,
                                                      const SimulationUnits& units) {
  return {period, ramp_time + std::sqrt(3.0) * outer_half_width / units.c};
}

/// Called after each step; `last` is set on the final one.
using StepObserver = std::function<void(const Simulation&, bool last)>;

/// Full sourced run with energy accounting at two nested boxes and an
/// optional retarded-potential probe. `observer` sees the simulation after
/// every step once centered fields exist.
inline RadiationDiagnostics run_radiation_scenario(const RadiationSettings& rs,
                                                   const SimulationUnits& units,
                                                   const StepObserver& observer = {}) {
  const SourceModel model(rs.source, units);
  if (const auto* blob = std::get_if<OscillatingBlob>(&rs.source); blob && blob->omega > 0.0) {
    const double wavelength = 2.0 * pi * units.c / blob->omega;
    for (int a = 0; a < 3; ++a)
      if (rs.grid.counts[a] * rs.grid.dx < 2.0 * wavelength)
        throw GeometryError("radiation scenario: domain must span at least two wavelengths");
  }
  if (!(rs.period > 0.0) || rs.average_cycles < 1)
    throw UsageError("radiation scenario: averaging period and cycles must be positive");
  if (!(rs.outer_half_width > rs.inner_half_width))
    throw GeometryError("radiation scenario: outer box must enclose the inner box");

  Simulation sim(model, rs.grid, rs.solver, units, rs.init);
  const Grid3& g = rs.grid;
  const Vec3 centre = 0.5 * (g.origin + g.upper());
  const EnergyBox inner = make_box(g, centre, rs.inner_half_width);
  const EnergyBox outer = make_box(g, centre, rs.outer_half_width);
  validate_box(inner, g, rs.solver.sponge_width, model.support());
  validate_box(outer, g, rs.solver.sponge_width, model.support());

  const long per = std::lround(rs.period / sim.dt());
  if (per < 2) throw UsageError("radiation scenario: period shorter than two steps");
  const long total = std::lround(rs.duration / sim.dt());
  if (total < 2 + per * rs.average_cycles)
    throw UsageError("radiation scenario: duration too short for the averaging window");

  std::optional<std::size_t> probe_index;
  RadiationDiagnostics d;
  if (rs.probe) {
    std::array<int, 3> n{};
    for (int a = 0; a < 3; ++a)
      n[a] = std::clamp(static_cast<int>(std::lround(((*rs.probe)[a] - g.origin[a]) / g.dx)), 0,
                        g.counts[a] - 1);
    probe_index = g.index(n[0], n[1], n[2]);
    d.probe_node = g.position(n[0], n[1], n[2]);
    d.probe_checked = true;
  }
  double probe_dphi = 0.0, probe_dA = 0.0, probe_phi = 0.0, probe_A = 0.0;

  std::vector<double> flux_in, flux_out, work, energy, times;
  d.max_W = -std::numeric_limits<double>::infinity();
  auto track_W = [&](const FieldPair& f) {
    const ScalarField W = energy_density(f, units);
    d.max_W = std::max(d.max_W, *std::max_element(W.values.begin(), W.values.end()));
  };

  sim.advance(2);
  track_W(sim.fields(-1));
  track_W(sim.fields(0));
  // The last centered level needs one step beyond the duration.
  for (long step = 2; step <= total; ++step) {
    sim.advance();
    track_W(sim.fields(1));
    const FieldPair& f = sim.fields(0);
    const double E = box_energy(f, outer, units);
    const double fo = surface_energy_flux(f, outer, units);
    const double wk = box_work_on_source(f, sim.source(0), outer);
    const double dE =
        (box_energy(sim.fields(1), outer, units) - box_energy(sim.fields(-1), outer, units)) /
        (2.0 * sim.dt());
    d.budget_closure = std::max(d.budget_closure, std::abs(dE + fo + wk));
    d.work_scale = std::max(d.work_scale, std::abs(wk));
    times.push_back(sim.center_time());
    energy.push_back(E);
    flux_out.push_back(fo);
    flux_in.push_back(surface_energy_flux(f, inner, units));
    work.push_back(wk);
    d.energy.push_back({sim.center_time(), E, fo, wk});

    const PotentialState& st = sim.state();
    if (probe_index && st.time >= rs.probe_start - 1e-9 * sim.dt()) {
      const RetardedSample r = retarded_potential(model, d.probe_node, st.time,
                                                  rs.retarded_resolution, units);
      const double phi = st.current.phi.values[*probe_index];
      const Vec3 A = st.current.A.at(*probe_index);
      probe_dphi = std::max(probe_dphi, std::abs(phi - r.phi));
      probe_dA = std::max(probe_dA, norm(A - r.A));
      probe_phi = std::max(probe_phi, std::abs(r.phi));
      probe_A = std::max(probe_A, norm(r.A));
    }
    if (observer) observer(sim, step == total);
  }
  d.final_time = times.back();
  const int margin = rs.solver.sponge_width + rs.residual_margin;
  d.final_residuals = sim.residuals(margin);
  d.final_conservation = sim.conservation(margin);
  d.final_chi = norms(sim.gauge(0).chi, interior_region(g, margin));
  if (probe_index) {
    d.probe_phi_error = probe_phi > 0.0 ? probe_dphi / probe_phi : probe_dphi;
    d.probe_A_error = probe_A > 0.0 ? probe_dA / probe_A : probe_dA;
  }

  const std::size_t count = times.size();
  const std::size_t window = static_cast<std::size_t>(per) * static_cast<std::size_t>(rs.average_cycles);
  double si = 0.0, so = 0.0, sw = 0.0;
  for (std::size_t n = count - window; n < count; ++n) {
    si += flux_in[n];
    so += flux_out[n];
    sw += work[n];
  }
  d.mean_flux_inner = si / static_cast<double>(window);
  d.mean_flux_outer = so / static_cast<double>(window);
  d.mean_work = sw / static_cast<double>(window);
  const double scale = std::max(std::abs(d.mean_flux_inner), std::abs(d.mean_flux_outer));
  d.flux_disagreement = scale > 0.0 ? std::abs(d.mean_flux_inner - d.mean_flux_outer) / scale : 0.0;

  // One-period moving average of the outer-box energy, ending at each step.
  std::vector<double> avg(count, std::numeric_limits<double>::quiet_NaN());
  double acc = 0.0;
  const std::size_t p = static_cast<std::size_t>(per);
  for (std::size_t n = 0; n < count; ++n) {
    acc += energy[n];
    if (n >= p) acc -= energy[n - p];
    if (n + 1 >= p) avg[n] = acc / static_cast<double>(p);
  }
  bool any = false;
  for (std::size_t n = p; n < count; ++n) {
    if (times[n] < rs.trend_start || times[n] > rs.trend_end) continue;
    any = true;
    if (!(avg[n] < avg[n - 1])) ++d.energy_trend_increases;
  }
  d.trend_checked = any;
  d.energy_trend_monotone = any && d.energy_trend_increases == 0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t n = count - window; n < count; ++n) {
    lo = std::min(lo, avg[n]);
    hi = std::max(hi, avg[n]);
  }
  d.plateau_drift = std::abs(hi + lo) > 0.0 ? (hi - lo) / (0.5 * std::abs(hi + lo)) : 0.0;
  return d;
}

}  // namespace vecgrav
