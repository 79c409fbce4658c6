#pragma once

// Subcommand orchestration: run, static, wave, identities, convergence.
// Each writes report.txt, manifest.txt and config.txt (the effective
// configuration) into the output directory and returns exit status 0 only
// when every check passed.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vecgrav/config.hpp"
#include "vecgrav/convergence.hpp"
#include "vecgrav/identity_suite.hpp"
#include "vecgrav/io.hpp"
#include "vecgrav/parallel.hpp"
#include "vecgrav/report.hpp"
#include "vecgrav/waves.hpp"

namespace vecgrav {

enum ExitCode : int {
  exit_pass = 0,
  exit_check_failed = 1,
  exit_usage = 2,
  exit_runtime = 3,
};

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

/// Command-line overrides applied on top of the config file.
struct Overrides {
  std::optional<std::string> out;
  std::optional<int> resolution;
  std::optional<double> lambda, mu, nu;
};

inline void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.out) cfg.output.directory = *o.out;
  if (o.resolution) {
    if (*o.resolution < 3) throw UsageError("--resolution must be >= 3");
    cfg.grid = refine_grid(cfg.grid, *o.resolution);
  }
  if (o.lambda) cfg.force.lambda = *o.lambda;
  if (o.mu) cfg.force.mu = *o.mu;
  if (o.nu) cfg.force.nu = *o.nu;
  for (double p : {cfg.force.lambda, cfg.force.mu, cfg.force.nu})
    if (!std::isfinite(p)) throw UsageError("force-law parameters must be finite");
}

struct CommandResult {
  int exit_code = exit_runtime;
  DiagnosticsReport report;
  Manifest manifest;
};

namespace detail {

/// Writes an artifact; it stays listed as partial if the writer throws.
class ArtifactSink {
 public:
  ArtifactSink(std::filesystem::path dir, Manifest& manifest)
      : dir_(std::move(dir)), manifest_(manifest) {}

  void write(const std::string& name, const std::function<void(const std::filesystem::path&)>& fn) {
    manifest_.add(name, false);
    const std::size_t slot = manifest_.files.size() - 1;
    fn(dir_ / name);
    manifest_.files[slot].second = true;
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  Manifest& manifest_;
};

inline std::string snapshot_name(long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%06ld.csv", step);
  return buf;
}

inline const SourceScenario& require_scenario(const RunConfig& cfg, const char* sub) {
  if (!cfg.scenario) throw UsageError(std::string(sub) + ": config has no scenario");
  return *cfg.scenario;
}

/// Largest distance from the grid centre to the edge of the source support.
inline double support_reach(const SourceModel& model, const Vec3& centre) {
  double reach = 0.0;
  for (const Bounds& b : model.support())
    for (int a = 0; a < 3; ++a)
      reach = std::max({reach, std::abs(b.hi[a] - centre[a]), std::abs(b.lo[a] - centre[a])});
  return reach;
}

inline std::pair<double, double> source_timing(const SourceScenario& s) {
  if (const auto* b = std::get_if<OscillatingBlob>(&s)) return {b->omega, b->ramp_time};
  if (const auto* r = std::get_if<RotatingRing>(&s)) return {r->omega, r->ramp_time};
  return {0.0, 0.0};
}

inline bool radiating(const SourceScenario& s) {
  const auto* b = std::get_if<OscillatingBlob>(&s);
  return b && b->omega > 0.0 && b->amplitude > 0.0;
}

inline PlaneWaveSpec wave_spec(const WaveSettings& w) {
  auto profile = [&](double amplitude, double phase) -> WaveProfile {
    if (amplitude == 0.0) return ConstantProfile{};
    if (w.profile == "sinusoid") return SinusoidProfile{amplitude, w.wavenumber, phase};
    return GaussianPulse{amplitude, w.center, w.width};
  };
  return {profile(w.a1, 0.0), profile(w.a2, 0.5 * pi)};
}

inline std::string norms_line(const char* label, const MaxwellResiduals& r) {
  return std::string(label) + " r1 " + DiagnosticsReport::format(r.div_G_norms.l2) + ", r2 " +
         DiagnosticsReport::format(r.faraday_norms.l2) + ", r3 " +
         DiagnosticsReport::format(r.gauss_norms.l2) + ", r4 " +
         DiagnosticsReport::format(r.ampere_norms.l2);
}

// --- static ---------------------------------------------------------------

inline void command_static(const RunConfig& cfg, DiagnosticsReport& rep, ArtifactSink& out) {
  const SourceScenario& scenario = require_scenario(cfg, "static");
  std::vector<StaticBall> balls;
  if (const auto* b = std::get_if<StaticBall>(&scenario)) balls = {*b};
  else if (const auto* two = std::get_if<TwoStaticBalls>(&scenario)) balls = {two->first, two->second};
  else throw UsageError("static: scenario must be static_ball or two_static_balls");

  const SimulationUnits& u = cfg.units;
  const Grid3& g = cfg.grid;
  const SourceModel model(scenario, u);
  const MassFluxState src = sample_scenario(model, 0.0, g);
  const ScalarField phi = solve_static(src.sigma, cfg.solver, u);

  auto newton = [&](const Vec3& x) {
    double v = 0.0;
    for (const StaticBall& b : balls) v -= u.kappa * b.mass / norm(x - b.center);
    return v;
  };
  auto outside = [&](const Vec3& x) {
    for (const StaticBall& b : balls)
      if (norm(x - b.center) <= b.radius + 3.0 * b.width) return false;
    return true;
  };
  double worst = 0.0;
  long compared = 0;
  for (int i = 0; i < g.counts[0]; ++i)
    for (int j = 0; j < g.counts[1]; ++j)
      for (int k = 0; k < g.counts[2]; ++k) {
        const Vec3 x = g.position(i, j, k);
        if (!outside(x)) continue;
        const double ex = newton(x);
        worst = std::max(worst, std::abs(phi(i, j, k) - ex) / std::abs(ex));
        ++compared;
      }

  // Radial line from the first ball's centre along +x through the nearest
  // row of nodes.
  const StaticBall& b0 = balls.front();
  std::array<int, 3> n0{};
  for (int a = 0; a < 3; ++a)
    n0[a] = std::clamp(static_cast<int>(std::lround((b0.center[a] - g.origin[a]) / g.dx)), 0,
                       g.counts[a] - 1);
  std::vector<std::vector<double>> profile;
  for (int i = n0[0]; i < g.counts[0]; ++i) {
    const Vec3 x = g.position(i, n0[1], n0[2]);
    const double r = norm(x - b0.center);
    const double ex = newton(x);
    profile.push_back({r, phi(i, n0[1], n0[2]), ex, std::abs(phi(i, n0[1], n0[2]) - ex) / std::abs(ex)});
  }

  // Fields of the static state: A = 0 at every level, so F = grad phi.
  const PotentialState st = static_state(phi, cfg.solver, u);
  PotentialState next = st;
  next.time += st.dt;
  next.step += 1;
  const FieldPair f = derive_fields(st, next);
  const VectorField force = force_density(f, src);
  const VectorField gp = grad(phi);
  double force_gap = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double s0 = src.sigma.values[n];
    const Vec3 expect{-s0 * gp[0].values[n], -s0 * gp[1].values[n], -s0 * gp[2].values[n]};
    force_gap = std::max(force_gap, norm(force.at(n) - expect));
  }
  const ScalarField W = energy_density(f, u);
  const double max_W = *std::max_element(W.values.begin(), W.values.end());

  double mass = 0.0;
  for (const StaticBall& b : balls) mass += b.mass;
  rep.title = "static";
  rep.notes.push_back("nodes compared " + std::to_string(compared) + " (outside radius + 3 widths)");
  rep.notes.push_back("heavy mass on grid " + DiagnosticsReport::format(heavy_mass_integral(src)) +
                      ", configured " + DiagnosticsReport::format(mass));
  rep.at_most("phi matches -kappa M / r outside 3 widths (max relative error)", worst, 0.01);
  rep.at_most("force density equals -sigma0 grad phi at every cell (max gap)", force_gap, 0.0);
  rep.at_most("W <= 0 at every cell", max_W, 0.0);

  out.write("radial_profile.csv", [&](const auto& p) {
    emit_table("r,phi,phi_newton,relative_error", profile, p);
  });
  out.write("snapshot.csv", [&](const auto& p) { emit_snapshot(st, p); });
  out.write("fields.csv", [&](const auto& p) { emit_fields(f, p); });
}

// --- run ------------------------------------------------------------------

inline void command_run(const RunConfig& cfg, DiagnosticsReport& rep, ArtifactSink& out) {
  const SourceScenario& scenario = require_scenario(cfg, "run");
  const SimulationUnits& u = cfg.units;
  const Grid3& g = cfg.grid;
  const SourceModel model(scenario, u);
  const Vec3 centre = 0.5 * (g.origin + g.upper());
  const auto [omega, ramp] = source_timing(scenario);
  const bool rad = radiating(scenario);

  RadiationSettings rs;
  rs.grid = g;
  rs.solver = cfg.solver;
  rs.source = scenario;
  rs.init = cfg.run.init;
  rs.average_cycles = cfg.run.average_cycles;
  rs.probe = cfg.run.probe;
  rs.probe_start = cfg.run.probe_start;
  rs.retarded_resolution = cfg.run.retarded_resolution;
  rs.residual_margin = cfg.run.residual_margin;
  rs.period = cfg.run.period > 0.0 ? cfg.run.period
              : omega > 0.0        ? 2.0 * pi / omega
                                   : 10.0 * g.dx / u.c;
  double half_extent = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) half_extent = std::min(half_extent, 0.5 * (g.counts[a] - 1) * g.dx);
  rs.inner_half_width = cfg.run.inner_box > 0.0 ? cfg.run.inner_box : support_reach(model, centre) + g.dx;
  rs.outer_half_width = cfg.run.outer_box > 0.0
                            ? cfg.run.outer_box
                            : half_extent - (cfg.solver.sponge_width + 3) * g.dx;
  rs.duration = cfg.run.duration > 0.0
                    ? cfg.run.duration
                    : ramp + std::sqrt(3.0) * rs.outer_half_width / u.c +
                          (rs.average_cycles + 1) * rs.period;
  if (rad) {
    const auto [t0, t1] = default_trend_window(rs.period, ramp, rs.outer_half_width, u);
    rs.trend_start = t0;
    rs.trend_end = t1;
  }

  const int stride = cfg.output.snapshot_stride;
  const StepObserver observer = [&](const Simulation& sim, bool last) {
    const long step = sim.state().step;
    if (last || (stride > 0 && step % stride == 0))
      out.write(snapshot_name(step), [&](const auto& p) { emit_snapshot(sim.state(), p); });
    if (last) out.write("fields.csv", [&](const auto& p) { emit_fields(sim.fields(0), p); });
  };
  const RadiationDiagnostics d = run_radiation_scenario(rs, u, observer);
  out.write("energy.csv", [&](const auto& p) { emit_energy(d.energy, p); });

  auto fmt = DiagnosticsReport::format;
  rep.title = "run";
  rep.notes.push_back(std::string("scenario ") + scenario_name(scenario) + ", duration " +
                      fmt(rs.duration) + ", final centered time " + fmt(d.final_time));
  rep.notes.push_back("boxes " + fmt(rs.inner_half_width) + " / " + fmt(rs.outer_half_width) +
                      ", averaging period " + fmt(rs.period) + " x " +
                      std::to_string(rs.average_cycles));
  rep.notes.push_back("mean flux inner " + fmt(d.mean_flux_inner) + ", outer " +
                      fmt(d.mean_flux_outer) + ", mean work " + fmt(d.mean_work));
  rep.notes.push_back(norms_line("final residual L2:", d.final_residuals));
  rep.notes.push_back("final chi max " + fmt(d.final_chi.max) + ", L2 " + fmt(d.final_chi.l2) +
                      "; conservation L2 energy " + fmt(d.final_conservation.energy_norms.l2) +
                      ", momentum " + fmt(d.final_conservation.momentum_norms.l2));
  rep.at_most("W <= 0 at every cell and level", d.max_W, 0.0);
  const double closure_scale = std::max(d.work_scale, std::abs(d.mean_flux_outer));
  rep.at_most("energy budget closure |dE/dt + flux + work| / max|work|",
              closure_scale > 0.0 ? d.budget_closure / closure_scale : d.budget_closure, 0.1);
  rep.flag("source continuity residual within 10% of its scale", d.final_conservation.continuity_ok);
  if (rad) {
    rep.at_most("mean outward flux, inner box (negative)", d.mean_flux_inner, 0.0);
    rep.at_most("mean outward flux, outer box (negative)", d.mean_flux_outer, 0.0);
    rep.at_most("inner and outer flux agree (relative gap)", d.flux_disagreement, 0.1);
    rep.notes.push_back("trend window [" + fmt(rs.trend_start) + ", " + fmt(rs.trend_end) +
                        "], plateau drift " + fmt(d.plateau_drift));
    rep.flag("moving-average box energy decreases monotonically while radiation fills the box",
             d.trend_checked && d.energy_trend_monotone);
  }
  if (d.probe_checked) {
    rep.notes.push_back("probe node " + detail::format_vec(d.probe_node) + " from t = " +
                        fmt(rs.probe_start));
    rep.at_most("leapfrog vs retarded phi at probe (relative)", d.probe_phi_error, 0.03);
    rep.at_most("leapfrog vs retarded A at probe (relative)", d.probe_A_error, 0.03);
  }
}

// --- wave -----------------------------------------------------------------

inline void command_wave(const RunConfig& cfg, DiagnosticsReport& rep, ArtifactSink& out) {
  const SimulationUnits& u = cfg.units;
  const PlaneWaveSpec spec = wave_spec(cfg.wave);
  const double duration =
      cfg.wave.duration > 0.0 ? cfg.wave.duration : 0.25 * cfg.grid.counts[0] * cfg.grid.dx / u.c;
  auto fmt = DiagnosticsReport::format;
  rep.title = "wave";

  // Closed-form energy density and flux at sample points.
  double w_gap = 0.0, s_gap = 0.0;
  for (int i = 0; i < 64; ++i) {
    const Vec3 x{cfg.grid.origin[0] + i * (cfg.grid.counts[0] - 1) * cfg.grid.dx / 63.0, 0.0, 0.0};
    const WaveEnergySample e = wave_energy(spec, x, 0.0, u);
    const FieldSample f = plane_wave_fields(spec, x, 0.0, u);
    const StressSample st = stress_from_fields(f.F, f.G, u);
    const double scale = std::max(std::abs(e.W), 1e-300);
    w_gap = std::max(w_gap, std::abs(st.W - e.W) / scale);
    s_gap = std::max({s_gap, norm(st.S - e.S) / (scale * u.c),
                      norm(e.S - Vec3{e.W * u.c, 0.0, 0.0}) / (scale * u.c)});
  }
  rep.at_most("W of the analytic wave matches -c^2/(4 pi kappa)(a1^2 + a2^2)", w_gap, 1e-12);
  rep.at_most("S of the analytic wave equals (W c, 0, 0)", s_gap, 1e-12);

  const SolverConfig solver = cfg.solver;
  aligned_steps(duration, stable_time_step(cfg.grid, solver, u), "wave");
  const WaveDiagnostics single =
      run_translation_test(spec, cfg.grid, solver, u, duration, cfg.run.residual_margin);
  std::vector<std::vector<double>> profile;
  for (std::size_t i = 0; i < single.x.size(); ++i)
    profile.push_back({single.x[i], single.W[i], single.Sx[i]});
  out.write("wave_profile.csv", [&](const auto& p) { emit_table("x,W,Sx", profile, p); });
  rep.notes.push_back("duration " + fmt(duration) + ", relative L2 error of F " +
                      fmt(single.relative_error) + " at " + std::to_string(cfg.grid.counts[0]) +
                      " cells");
  rep.at_most("W <= 0 at every cell", single.max_W, 0.0);
  rep.flag("S_x <= 0 wherever the wave carries energy", single.flux_opposes_propagation);

  const WaveConvergence wc = run_wave_convergence(spec, cfg.grid, cfg.wave.resolutions, solver, u,
                                                  duration, cfg.run.residual_margin);
  std::vector<std::vector<double>> table;
  std::vector<double> r1, r2, r3, r4, scale;
  double worst_W = -std::numeric_limits<double>::infinity();
  bool opposes = true;
  for (const auto& row : wc.rows) {
    table.push_back({static_cast<double>(row.n), row.dx, row.translation_error, row.analytic_r1,
                     row.analytic_r2, row.analytic_r3, row.analytic_r4, row.energy_l2,
                     row.momentum_l2});
    rep.notes.push_back("n " + std::to_string(row.n) + ": translation " +
                        fmt(row.translation_error) + ", analytic r4 " + fmt(row.analytic_r4) +
                        ", conservation energy " + fmt(row.energy_l2) + ", momentum " +
                        fmt(row.momentum_l2));
    r1.push_back(row.analytic_r1);
    r2.push_back(row.analytic_r2);
    r3.push_back(row.analytic_r3);
    r4.push_back(row.analytic_r4);
    scale.push_back(row.analytic_scale);
    worst_W = std::max(worst_W, row.diagnostics.max_W);
    opposes = opposes && row.diagnostics.flux_opposes_propagation;
  }
  out.write("wave_convergence.csv", [&](const auto& p) {
    emit_table("n,dx,translation_error,r1,r2,r3,r4,energy_l2,momentum_l2", table, p);
  });
  rep.within("translation error fitted order", wc.order_translation, 2.0, 0.3);
  check_order(rep, "sampled wave r1", r1, scale, wc.order_r1);
  check_order(rep, "sampled wave r2", r2, scale, wc.order_r2);
  check_order(rep, "sampled wave r3", r3, scale, wc.order_r3);
  check_order(rep, "sampled wave r4", r4, scale, wc.order_r4);
  rep.within("leapfrog energy conservation residual fitted order", wc.order_energy, 2.0, 0.3);
  rep.within("leapfrog momentum conservation residual fitted order", wc.order_momentum, 2.0, 0.3);
  rep.at_most("W <= 0 at every cell of every refinement run", worst_W, 0.0);
  rep.flag("S_x <= 0 in every refinement run", opposes);
}

// --- identities -----------------------------------------------------------

inline void command_identities(const RunConfig& cfg, DiagnosticsReport& rep) {
  IdentitySuiteSettings s;
  s.samples = cfg.identities.samples;
  s.seed = cfg.run.seed;
  s.params = cfg.force;
  StressSuiteSettings t;
  t.samples = std::max(1L, cfg.identities.samples / 10);
  t.seed = cfg.run.seed;
  rep.title = "identities";
  rep.append(run_identity_suite(s, cfg.units));
  rep.append(run_stress_suite(t, cfg.units));
}

// --- convergence ----------------------------------------------------------

inline void command_convergence(const RunConfig& cfg, DiagnosticsReport& rep, ArtifactSink& out) {
  SourceConvergenceSetup s;
  s.base = cfg.grid;
  s.solver = cfg.solver;
  s.source = require_scenario(cfg, "convergence");
  s.init = cfg.run.init;
  s.resolutions = cfg.convergence.resolutions;
  s.time = cfg.convergence.time;
  s.margin = cfg.run.residual_margin;
  s.box_half_width = cfg.run.inner_box > 0.0 ? cfg.run.inner_box
                                             : 0.25 * (cfg.grid.counts[0] - 1) * cfg.grid.dx;
  const SourceConvergence c = run_source_convergence(s, cfg.units);

  auto fmt = DiagnosticsReport::format;
  rep.title = "convergence";
  rep.notes.push_back(std::string("scenario ") + scenario_name(s.source) + ", time " + fmt(s.time) +
                      ", budget box half-width " + fmt(s.box_half_width));
  std::vector<std::vector<double>> table;
  std::vector<double> r1, r2, r3, r4, scale;
  for (const auto& row : c.rows) {
    table.push_back({static_cast<double>(row.n), row.dx, row.r1, row.r2, row.r3, row.r4,
                     row.chi_max, row.chi_l2, row.energy_l2, row.momentum_l2, row.budget_closure,
                     row.work});
    rep.notes.push_back("n " + std::to_string(row.n) + ": r1 " + fmt(row.r1) + ", r2 " +
                        fmt(row.r2) + ", r3 " + fmt(row.r3) + ", r4 " + fmt(row.r4) +
                        ", chi max " + fmt(row.chi_max) + ", closure " + fmt(row.budget_closure));
    r1.push_back(row.r1);
    r2.push_back(row.r2);
    r3.push_back(row.r3);
    r4.push_back(row.r4);
    scale.push_back(row.derivative_scale);
  }
  rep.notes.push_back("fitted orders: r1 " + fmt(c.order_r1) + ", r2 " + fmt(c.order_r2) +
                      ", r3 " + fmt(c.order_r3) + ", r4 " + fmt(c.order_r4) + ", chi " +
                      fmt(c.order_chi) + ", energy " + fmt(c.order_energy) + ", momentum " +
                      fmt(c.order_momentum) + ", closure " + fmt(c.order_closure));
  out.write("convergence.csv", [&](const auto& p) {
    emit_table("n,dx,r1,r2,r3,r4,chi_max,chi_l2,energy_l2,momentum_l2,budget_closure,work", table, p);
  });
  check_order(rep, "r1 (div G)", r1, scale, c.order_r1);
  check_order(rep, "r2 (dG/dt + curl F)", r2, scale, c.order_r2);
  check_order(rep, "r3 (div F - 4 pi kappa sigma + dchi/dt)", r3, scale, c.order_r3);
  check_order(rep, "r4 (curl G - dF/dt/c^2 - 4 pi kappa s/c^2 - grad chi)", r4, scale, c.order_r4);
  rep.at_least("gauge scalar chi max fitted order", c.order_chi, 1.7);
  rep.within("energy conservation residual fitted order", c.order_energy, 2.0, 0.3);
  rep.within("momentum conservation residual fitted order", c.order_momentum, 2.0, 0.3);
  rep.within("energy budget closure fitted order", c.order_closure, 2.0, 0.3);
}

}  // namespace detail

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"run", "static", "wave", "identities", "convergence"};
  return names;
}

/// Runs one subcommand and writes its artifacts. Module errors are caught,
/// recorded in the manifest and turned into exit_runtime.
inline CommandResult run_command(const std::string& sub, const RunConfig& cfg) {
  CommandResult res;
  res.manifest.subcommand = sub;
  if (std::find(subcommands().begin(), subcommands().end(), sub) == subcommands().end())
    throw UsageError("unknown subcommand '" + sub + "'");
  const std::filesystem::path dir(cfg.output.directory);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  detail::ArtifactSink sink(dir, res.manifest);
  auto finish = [&] {
    write_text(res.manifest.text(), dir / "manifest.txt");
  };
  try {
    sink.write("config.txt", [&](const auto& p) { write_text(serialize_config(cfg), p); });
    if (sub == "run") detail::command_run(cfg, res.report, sink);
    else if (sub == "static") detail::command_static(cfg, res.report, sink);
    else if (sub == "wave") detail::command_wave(cfg, res.report, sink);
    else if (sub == "identities") detail::command_identities(cfg, res.report);
    else detail::command_convergence(cfg, res.report, sink);
    sink.write("report.txt", [&](const auto& p) { write_text(res.report.text(), p); });
  } catch (const Error& e) {
    res.manifest.status = "error";
    res.manifest.error = e.what();
    res.exit_code = exit_runtime;
    finish();
    return res;
  }
  res.manifest.status = res.report.passed() ? "pass" : "fail";
  res.exit_code = res.report.passed() ? exit_pass : exit_check_failed;
  finish();
  return res;
}

}  // namespace vecgrav
