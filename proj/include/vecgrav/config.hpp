#pragma once

// Line-based run configuration:
//
//   # comment
//   section.key = value
//
// Vectors are whitespace-separated numbers. Every key may appear once;
// unknown keys are errors. Parsing collects all problems before throwing.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vecgrav/errors.hpp"
#include "vecgrav/force_laws.hpp"
#include "vecgrav/grid.hpp"
#include "vecgrav/pipeline.hpp"
#include "vecgrav/potential_solvers.hpp"
#include "vecgrav/sources.hpp"
#include "vecgrav/units.hpp"

namespace vecgrav {

struct RunSettings {
  InitMode init = InitMode::static_equilibrium;
  double duration = 0.0;
  /// Half-widths of the energy boxes; 0 picks a default from the grid.
  double inner_box = 0.0;
  double outer_box = 0.0;
  /// Averaging period; 0 uses the source period (2 pi / omega).
  double period = 0.0;
  int average_cycles = 2;
  std::optional<Vec3> probe;
  double probe_start = 0.0;
  int retarded_resolution = 48;
  int residual_margin = 2;
  std::uint64_t seed = 20240917;
  friend bool operator==(const RunSettings&, const RunSettings&) = default;
};

struct OutputSettings {
  std::string directory = "vecgrav-out";
  /// Steps between snapshots; 0 writes only the final state.
  int snapshot_stride = 0;
  friend bool operator==(const OutputSettings&, const OutputSettings&) = default;
};

struct WaveSettings {
  std::string profile = "gaussian";  ///< gaussian | sinusoid
  double a1 = 1.0;
  double a2 = 0.0;
  double width = 6.0;
  double center = 0.0;
  double wavenumber = 0.0;
  /// 0 means a quarter of the domain length divided by c.
  double duration = 0.0;
  std::vector<int> resolutions{32, 48, 64};
  friend bool operator==(const WaveSettings&, const WaveSettings&) = default;
};

struct IdentitySettings {
  long samples = 100000;
  friend bool operator==(const IdentitySettings&, const IdentitySettings&) = default;
};

struct ConvergenceSettings {
  std::vector<int> resolutions{32, 48, 64};
  double time = 48.0;
  friend bool operator==(const ConvergenceSettings&, const ConvergenceSettings&) = default;
};

struct RunConfig {
  SimulationUnits units;
  Grid3 grid;
  SolverConfig solver;
  std::optional<SourceScenario> scenario;
  RunSettings run;
  OutputSettings output;
  ForceLawParams force;
  WaveSettings wave;
  IdentitySettings identities;
  ConvergenceSettings convergence;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline const char* to_string(InitMode m) {
  return m == InitMode::static_equilibrium ? "static" : "zero";
}

inline const char* scenario_name(const SourceScenario& s) {
  switch (s.index()) {
    case 0: return "static_ball";
    case 1: return "oscillating_blob";
    case 2: return "rotating_ring";
    default: return "two_static_balls";
  }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view w, T& out) {
  const char* end = w.data() + w.size();
  auto [p, ec] = std::from_chars(w.data(), end, out);
  return ec == std::errc() && p == end;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_vec(const Vec3& v) {
  return format_double(v[0]) + " " + format_double(v[1]) + " " + format_double(v[2]);
}

struct Entry {
  int line = 0;
  std::string value;
};

class Reader {
 public:
  Reader(std::map<std::string, Entry> entries, std::vector<ConfigIssue>& issues)
      : entries_(std::move(entries)), issues_(issues) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  int line(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }
  const std::string* raw(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    used_.insert(key);
    return &it->second.value;
  }

  void fail(const std::string& key, const std::string& message) {
    issues_.push_back({line(key), key + ": " + message});
  }

  void get(const std::string& key, double& out) {
    if (const std::string* v = raw(key)) {
      double x = 0.0;
      if (!parse_number(*v, x) || !std::isfinite(x))
        fail(key, "expected a finite number, got '" + *v + "'");
      else
        out = x;
    }
  }
  void get(const std::string& key, int& out) {
    if (const std::string* v = raw(key)) {
      if (!parse_number(*v, out)) fail(key, "expected an integer, got '" + *v + "'");
    }
  }
  void get(const std::string& key, long& out) {
    if (const std::string* v = raw(key)) {
      if (!parse_number(*v, out)) fail(key, "expected an integer, got '" + *v + "'");
    }
  }
  void get(const std::string& key, std::uint64_t& out) {
    if (const std::string* v = raw(key)) {
      if (!parse_number(*v, out)) fail(key, "expected a non-negative integer, got '" + *v + "'");
    }
  }
  void get(const std::string& key, bool& out) {
    if (const std::string* v = raw(key)) {
      if (*v == "true")
        out = true;
      else if (*v == "false")
        out = false;
      else
        fail(key, "expected true or false, got '" + *v + "'");
    }
  }
  void get(const std::string& key, std::string& out) {
    if (const std::string* v = raw(key)) {
      if (v->empty())
        fail(key, "empty value");
      else
        out = *v;
    }
  }
  void get(const std::string& key, Vec3& out) {
    if (const std::string* v = raw(key)) {
      const auto w = words(*v);
      Vec3 x{};
      bool ok = w.size() == 3;
      for (std::size_t a = 0; ok && a < 3; ++a) ok = parse_number(w[a], x[a]) && std::isfinite(x[a]);
      if (!ok)
        fail(key, "expected three numbers, got '" + *v + "'");
      else
        out = x;
    }
  }
  void get(const std::string& key, std::optional<Vec3>& out) {
    if (has(key)) {
      Vec3 v{};
      const std::size_t before = issues_.size();
      get(key, v);
      if (issues_.size() == before) out = v;
    }
  }
  void get(const std::string& key, std::vector<int>& out) {
    if (const std::string* v = raw(key)) {
      std::vector<int> xs;
      bool ok = true;
      for (auto w : words(*v)) {
        int x = 0;
        ok = ok && parse_number(w, x);
        xs.push_back(x);
      }
      if (!ok || xs.empty())
        fail(key, "expected a list of integers, got '" + *v + "'");
      else
        out = xs;
    }
  }

  /// Keys present in the input that no reader consumed.
  std::vector<std::pair<std::string, int>> unused() const {
    std::vector<std::pair<std::string, int>> out;
    for (const auto& [k, e] : entries_)
      if (!used_.count(k)) out.emplace_back(k, e.line);
    return out;
  }
  void mark_used(const std::string& key) { used_.insert(key); }

 private:
  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
  std::vector<ConfigIssue>& issues_;
};

inline void read_ball(Reader& r, const std::string& prefix, StaticBall& b) {
  r.get(prefix + "center", b.center);
  r.get(prefix + "radius", b.radius);
  r.get(prefix + "mass", b.mass);
  r.get(prefix + "width", b.width);
}

/// Runs `check` and records any vecgrav::Error it throws against `key`.
template <class F>
void attribute(Reader& r, const std::string& key, F&& check) {
  try {
    check();
  } catch (const Error& e) {
    r.fail(key, e.what());
  }
}

}  // namespace detail

inline RunConfig parse_config(std::string_view text) {
  using detail::Entry;
  std::vector<ConfigIssue> issues;
  std::map<std::string, Entry> entries;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back({line_no, "expected 'section.key = value', got '" + std::string(line) + "'"});
      continue;
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    const auto dot = key.find('.');
    if (key.empty() || dot == std::string::npos || dot == 0 || dot + 1 == key.size() ||
        key.find_first_of(" \t") != std::string::npos) {
      issues.push_back({line_no, "malformed key '" + key + "' (expected section.key)"});
      continue;
    }
    if (auto it = entries.find(key); it != entries.end()) {
      issues.push_back({line_no, "duplicate key '" + key + "' (first set on line " +
                                     std::to_string(it->second.line) + ", again on line " +
                                     std::to_string(line_no) + ")"});
      continue;
    }
    entries.emplace(key, Entry{line_no, value});
    if (end == text.size()) break;
  }

  RunConfig cfg;
  detail::Reader r(std::move(entries), issues);

  r.get("units.c", cfg.units.c);
  r.get("units.kappa", cfg.units.kappa);
  detail::attribute(r, r.has("units.c") ? "units.c" : "units.kappa", [&] { cfg.units.validate(); });

  if (!r.has("grid.counts")) issues.push_back({0, "missing required key 'grid.counts'"});
  if (!r.has("grid.dx")) issues.push_back({0, "missing required key 'grid.dx'"});
  std::vector<int> counts{3};
  double dx = 1.0;
  r.get("grid.counts", counts);
  r.get("grid.dx", dx);
  if (counts.size() == 1) counts.assign(3, counts[0]);
  if (counts.size() != 3) {
    r.fail("grid.counts", "expected one count or three counts");
    counts.assign(3, 3);
  }
  cfg.grid = Grid3::centered({counts[0], counts[1], counts[2]}, dx);
  detail::attribute(r, "grid.counts", [&] { cfg.grid.validate(); });

  r.get("solver.cfl", cfg.solver.cfl);
  r.get("solver.sponge_width", cfg.solver.sponge_width);
  r.get("solver.sponge_strength", cfg.solver.sponge_strength);
  r.get("solver.static_tolerance", cfg.solver.static_tolerance);
  r.get("solver.max_iterations", cfg.solver.max_iterations);
  r.get("solver.absorbing_boundary", cfg.solver.absorbing_boundary);
  {
    std::string init = to_string(cfg.run.init);
    r.get("solver.init", init);
    if (init == "static")
      cfg.run.init = InitMode::static_equilibrium;
    else if (init == "zero")
      cfg.run.init = InitMode::zero;
    else
      r.fail("solver.init", "expected static or zero, got '" + init + "'");
  }
  if (!(cfg.solver.cfl > 0.0) || cfg.solver.cfl > SolverConfig::max_cfl())
    r.fail("solver.cfl", "must lie in (0, 1/sqrt(3)] for the 3D leapfrog scheme, got " +
                             detail::format_double(cfg.solver.cfl));
  else
    detail::attribute(r, "solver.sponge_width", [&] { cfg.solver.validate(); });

  if (const std::string* type = r.raw("scenario.type")) {
    const std::string t = *type;
    if (t == "static_ball") {
      StaticBall b;
      detail::read_ball(r, "scenario.", b);
      cfg.scenario = b;
    } else if (t == "oscillating_blob") {
      OscillatingBlob b;
      r.get("scenario.center", b.center);
      r.get("scenario.width", b.width);
      r.get("scenario.mass", b.mass);
      r.get("scenario.axis", b.axis);
      r.get("scenario.amplitude", b.amplitude);
      r.get("scenario.omega", b.omega);
      r.get("scenario.ramp_time", b.ramp_time);
      cfg.scenario = b;
    } else if (t == "rotating_ring") {
      RotatingRing b;
      r.get("scenario.center", b.center);
      r.get("scenario.ring_radius", b.ring_radius);
      r.get("scenario.linear_density", b.linear_density);
      r.get("scenario.omega", b.omega);
      r.get("scenario.width", b.width);
      r.get("scenario.ramp_time", b.ramp_time);
      cfg.scenario = b;
    } else if (t == "two_static_balls") {
      TwoStaticBalls b;
      detail::read_ball(r, "scenario.first.", b.first);
      detail::read_ball(r, "scenario.second.", b.second);
      cfg.scenario = b;
    } else {
      r.fail("scenario.type", "unknown scenario '" + t +
                                  "' (static_ball, oscillating_blob, rotating_ring, two_static_balls)");
    }
    if (cfg.scenario)
      detail::attribute(r, "scenario.type", [&] { (void)SourceModel(*cfg.scenario, cfg.units); });
  }

  r.get("run.duration", cfg.run.duration);
  r.get("run.inner_box", cfg.run.inner_box);
  r.get("run.outer_box", cfg.run.outer_box);
  r.get("run.period", cfg.run.period);
  r.get("run.average_cycles", cfg.run.average_cycles);
  r.get("run.probe", cfg.run.probe);
  r.get("run.probe_start", cfg.run.probe_start);
  r.get("run.retarded_resolution", cfg.run.retarded_resolution);
  r.get("run.residual_margin", cfg.run.residual_margin);
  r.get("run.seed", cfg.run.seed);
  if (cfg.run.duration < 0.0) r.fail("run.duration", "must be >= 0");
  if (cfg.run.inner_box < 0.0) r.fail("run.inner_box", "must be >= 0");
  if (cfg.run.outer_box < 0.0) r.fail("run.outer_box", "must be >= 0");
  if (cfg.run.period < 0.0) r.fail("run.period", "must be >= 0");
  if (cfg.run.average_cycles < 1) r.fail("run.average_cycles", "must be >= 1");
  if (cfg.run.retarded_resolution < 2) r.fail("run.retarded_resolution", "must be >= 2");
  if (cfg.run.residual_margin < 1) r.fail("run.residual_margin", "must be >= 1");

  r.get("output.directory", cfg.output.directory);
  r.get("output.snapshot_stride", cfg.output.snapshot_stride);
  if (cfg.output.snapshot_stride < 0) r.fail("output.snapshot_stride", "must be >= 0");

  r.get("force.lambda", cfg.force.lambda);
  r.get("force.mu", cfg.force.mu);
  r.get("force.nu", cfg.force.nu);

  r.get("wave.profile", cfg.wave.profile);
  r.get("wave.a1", cfg.wave.a1);
  r.get("wave.a2", cfg.wave.a2);
  r.get("wave.width", cfg.wave.width);
  r.get("wave.center", cfg.wave.center);
  r.get("wave.wavenumber", cfg.wave.wavenumber);
  r.get("wave.duration", cfg.wave.duration);
  r.get("wave.resolutions", cfg.wave.resolutions);
  if (cfg.wave.profile != "gaussian" && cfg.wave.profile != "sinusoid")
    r.fail("wave.profile", "expected gaussian or sinusoid, got '" + cfg.wave.profile + "'");
  if (!(cfg.wave.width > 0.0)) r.fail("wave.width", "must be > 0");
  if (cfg.wave.duration < 0.0) r.fail("wave.duration", "must be >= 0");
  for (int n : cfg.wave.resolutions)
    if (n < 8) r.fail("wave.resolutions", "every resolution must be >= 8");

  r.get("identities.samples", cfg.identities.samples);
  if (cfg.identities.samples < 1) r.fail("identities.samples", "must be >= 1");

  r.get("convergence.resolutions", cfg.convergence.resolutions);
  r.get("convergence.time", cfg.convergence.time);
  if (cfg.convergence.resolutions.size() < 2)
    r.fail("convergence.resolutions", "need at least two resolutions");
  for (int n : cfg.convergence.resolutions)
    if (n < 8) r.fail("convergence.resolutions", "every resolution must be >= 8");
  if (!(cfg.convergence.time > 0.0)) r.fail("convergence.time", "must be > 0");

  for (const auto& [key, line] : r.unused()) {
    const bool scenario_key = key.rfind("scenario.", 0) == 0;
    if (scenario_key && cfg.scenario)
      issues.push_back({line, "key '" + key + "' does not apply to scenario type " +
                                  scenario_name(*cfg.scenario)});
    else if (scenario_key && !r.has("scenario.type"))
      issues.push_back({line, "key '" + key + "' needs scenario.type"});
    else if (!scenario_key)
      issues.push_back({line, "unknown key '" + key + "'"});
  }

  if (!issues.empty()) {
    std::stable_sort(issues.begin(), issues.end(),
                     [](const ConfigIssue& a, const ConfigIssue& b) { return a.line < b.line; });
    throw ConfigError(std::move(issues));
  }
  return cfg;
}

/// Canonical text form; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const RunConfig& c) {
  using detail::format_double;
  using detail::format_vec;
  std::ostringstream o;
  auto kv = [&](const std::string& k, const std::string& v) { o << k << " = " << v << '\n'; };
  auto ints = [](const std::vector<int>& xs) {
    std::string s;
    for (int x : xs) s += (s.empty() ? "" : " ") + std::to_string(x);
    return s;
  };
  kv("units.c", format_double(c.units.c));
  kv("units.kappa", format_double(c.units.kappa));
  kv("grid.counts", ints({c.grid.counts[0], c.grid.counts[1], c.grid.counts[2]}));
  kv("grid.dx", format_double(c.grid.dx));
  kv("solver.cfl", format_double(c.solver.cfl));
  kv("solver.sponge_width", std::to_string(c.solver.sponge_width));
  kv("solver.sponge_strength", format_double(c.solver.sponge_strength));
  kv("solver.static_tolerance", format_double(c.solver.static_tolerance));
  kv("solver.max_iterations", std::to_string(c.solver.max_iterations));
  kv("solver.absorbing_boundary", c.solver.absorbing_boundary ? "true" : "false");
  kv("solver.init", to_string(c.run.init));
  if (c.scenario) {
    kv("scenario.type", scenario_name(*c.scenario));
    auto ball = [&](const std::string& p, const StaticBall& b) {
      kv(p + "center", format_vec(b.center));
      kv(p + "radius", format_double(b.radius));
      kv(p + "mass", format_double(b.mass));
      kv(p + "width", format_double(b.width));
    };
    if (const auto* b = std::get_if<StaticBall>(&*c.scenario)) {
      ball("scenario.", *b);
    } else if (const auto* o2 = std::get_if<OscillatingBlob>(&*c.scenario)) {
      kv("scenario.center", format_vec(o2->center));
      kv("scenario.width", format_double(o2->width));
      kv("scenario.mass", format_double(o2->mass));
      kv("scenario.axis", format_vec(o2->axis));
      kv("scenario.amplitude", format_double(o2->amplitude));
      kv("scenario.omega", format_double(o2->omega));
      kv("scenario.ramp_time", format_double(o2->ramp_time));
    } else if (const auto* g = std::get_if<RotatingRing>(&*c.scenario)) {
      kv("scenario.center", format_vec(g->center));
      kv("scenario.ring_radius", format_double(g->ring_radius));
      kv("scenario.linear_density", format_double(g->linear_density));
      kv("scenario.omega", format_double(g->omega));
      kv("scenario.width", format_double(g->width));
      kv("scenario.ramp_time", format_double(g->ramp_time));
    } else if (const auto* t = std::get_if<TwoStaticBalls>(&*c.scenario)) {
      ball("scenario.first.", t->first);
      ball("scenario.second.", t->second);
    }
  }
  kv("run.duration", format_double(c.run.duration));
  kv("run.inner_box", format_double(c.run.inner_box));
  kv("run.outer_box", format_double(c.run.outer_box));
  kv("run.period", format_double(c.run.period));
  kv("run.average_cycles", std::to_string(c.run.average_cycles));
  if (c.run.probe) kv("run.probe", format_vec(*c.run.probe));
  kv("run.probe_start", format_double(c.run.probe_start));
  kv("run.retarded_resolution", std::to_string(c.run.retarded_resolution));
  kv("run.residual_margin", std::to_string(c.run.residual_margin));
  kv("run.seed", std::to_string(c.run.seed));
  kv("output.directory", c.output.directory);
  kv("output.snapshot_stride", std::to_string(c.output.snapshot_stride));
  kv("force.lambda", format_double(c.force.lambda));
  kv("force.mu", format_double(c.force.mu));
  kv("force.nu", format_double(c.force.nu));
  kv("wave.profile", c.wave.profile);
  kv("wave.a1", format_double(c.wave.a1));
  kv("wave.a2", format_double(c.wave.a2));
  kv("wave.width", format_double(c.wave.width));
  kv("wave.center", format_double(c.wave.center));
  kv("wave.wavenumber", format_double(c.wave.wavenumber));
  kv("wave.duration", format_double(c.wave.duration));
  kv("wave.resolutions", ints(c.wave.resolutions));
  kv("identities.samples", std::to_string(c.identities.samples));
  kv("convergence.resolutions", ints(c.convergence.resolutions));
  kv("convergence.time", format_double(c.convergence.time));
  return o.str();
}

}  // namespace vecgrav
