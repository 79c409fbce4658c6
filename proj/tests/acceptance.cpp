// Acceptance run: drives the shipped configs through the subcommands and
// prints one PASS/FAIL line per criterion. Exit status is nonzero when any
// criterion fails.
//
//   acceptance <scratch-dir>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "vecgrav/vecgrav.hpp"

using namespace vecgrav;
namespace fs = std::filesystem;

namespace {

struct Timed {
  CommandResult result;
  double seconds = 0.0;
};

Timed run_timed(const std::string& sub, RunConfig cfg, const fs::path& out) {
  cfg.output.directory = out.string();
  fs::remove_all(out);
  const auto t0 = std::chrono::steady_clock::now();
  Timed t{run_command(sub, cfg), 0.0};
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return t;
}

RunConfig config(const char* name) {
  return load_config(fs::path(VECGRAV_CONFIG_DIR) / name);
}

/// Checks of `r` whose names contain any of `keys`; fails if none match.
bool select(const DiagnosticsReport& r, std::initializer_list<const char*> keys, std::string& why) {
  int matched = 0;
  bool ok = true;
  for (const auto& c : r.checks)
    for (const char* k : keys)
      if (c.name.find(k) != std::string::npos) {
        ++matched;
        if (!c.passed) {
          ok = false;
          why += " [" + c.name + ": " + DiagnosticsReport::format(c.observed) + "]";
        }
        break;
      }
  if (matched == 0) {
    why += " [no checks matched]";
    return false;
  }
  return ok;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int failures = 0;

void verdict(int n, bool ok, const std::string& what) {
  std::printf("%s AC%d %s\n", ok ? "PASS" : "FAIL", n, what.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

std::string secs(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1fs", s);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "vecgrav-acceptance";
  fs::create_directories(root);
  std::vector<const DiagnosticsReport*> all;

  // AC1: static ball against the point-mass potential.
  const Timed st = run_timed("static", config("static_ball.cfg"), root / "static");
  {
    std::string why;
    const bool ok = select(st.result.report, {"phi matches", "force density"}, why) && st.seconds < 60.0;
    verdict(1, ok, "static ball 64^3 Newtonian limit and exact force density, " + secs(st.seconds) + why);
  }
  all.push_back(&st.result.report);

  // AC2: force-law identities over 1e5 samples.
  {
    RunConfig cfg = config("identities.cfg");
    IdentitySuiteSettings s;
    s.samples = cfg.identities.samples;
    s.seed = cfg.run.seed;
    s.params = cfg.force;
    const auto t0 = std::chrono::steady_clock::now();
    const DiagnosticsReport r = run_identity_suite(s, cfg.units);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string why;
    const bool ok = r.passed() && s.samples >= 100000 && dt < 30.0;
    for (const auto& c : r.checks)
      if (!c.passed) why += " [" + c.name + "]";
    verdict(2, ok, std::to_string(r.checks.size()) + " identity checks over " +
                       std::to_string(s.samples) + " samples, " + secs(dt) + why);
  }

  // AC3 and the sourced half of AC6: refinement of the oscillating blob.
  const Timed cv = run_timed("convergence", config("convergence.cfg"), root / "convergence");
  {
    std::string why;
    const bool ok = cv.result.manifest.status != "error" &&
                    select(cv.result.report, {"r1 (", "r2 (", "r3 (", "r4 (", "chi"}, why) &&
                    cv.seconds < 600.0;
    verdict(3, ok, "sourced residuals r1-r4 second order or at round-off, chi O(dx^2), " +
                       secs(cv.seconds) + why + cv.result.manifest.error);
  }

  // AC4 and the source-free half of AC6: plane wave.
  const Timed wv = run_timed("wave", config("wave.cfg"), root / "wave");
  {
    std::string why;
    const bool ok = wv.result.manifest.status != "error" &&
                    select(wv.result.report, {"translation", "sampled wave"}, why);
    verdict(4, ok, "plane-wave translation error and sampled residuals, " + secs(wv.seconds) + why +
                       wv.result.manifest.error);
  }
  all.push_back(&wv.result.report);

  // AC7 and AC8 share the oscillating-blob run.
  const Timed rn = run_timed("run", config("oscillating_blob.cfg"), root / "run");
  all.push_back(&rn.result.report);

  // AC5: stress tensor algebra, closed-form plane wave, W <= 0 everywhere.
  {
    StressSuiteSettings s;
    s.samples = 10000;
    const DiagnosticsReport r = run_stress_suite(s);
    std::string why;
    bool ok = r.passed();
    for (const auto& c : r.checks)
      if (!c.passed) why += " [" + c.name + "]";
    const StressSample unit = stress_from_fields({0, 1, 1}, {0, -1, 1}, SimulationUnits{});
    const double gap = std::abs(unit.W + 1.0 / (2.0 * pi));
    if (gap > 1e-12) {
      ok = false;
      why += " [unit plane wave W " + DiagnosticsReport::format(unit.W) + "]";
    }
    ok = select(wv.result.report, {"of the analytic wave"}, why) && ok;
    for (const DiagnosticsReport* rep : all) ok = select(*rep, {"W <= 0"}, why) && ok;
    verdict(5, ok, "tau symmetric and traceless, W two-path, plane-wave W = -1/(2 pi), W <= 0 in every run" + why);
  }

  // AC6: conservation residuals and the energy budget.
  {
    std::string why;
    bool ok = select(wv.result.report, {"conservation residual"}, why);
    ok = select(cv.result.report, {"budget closure", "conservation residual"}, why) && ok;
    verdict(6, ok, "source-free conservation second order, sourced energy budget second order" + why);
  }

  {
    std::string why;
    const bool ok = rn.result.manifest.status != "error" &&
                    select(rn.result.report, {"outward flux", "flux agree", "monotonically"}, why);
    verdict(7, ok, "negative mean flux at two boxes within 10%, interior energy trend, " +
                       secs(rn.seconds) + why + rn.result.manifest.error);
  }
  {
    std::string why;
    const bool ok = rn.result.manifest.status != "error" && select(rn.result.report, {"at probe"}, why);
    verdict(8, ok, "leapfrog vs retarded potential at exterior probe" + why);
  }

  // AC9: a short blob run repeated at a different thread count.
  {
    RunConfig cfg = parse_config(
        "grid.counts = 32\ngrid.dx = 1\nsolver.sponge_width = 0\n"
        "scenario.type = oscillating_blob\nscenario.width = 1\nscenario.amplitude = 0.5\n"
        "scenario.omega = 0.52359877559829882\nscenario.ramp_time = 6\n"
        "run.duration = 40\nrun.inner_box = 8\nrun.outer_box = 12\nrun.average_cycles = 1\n"
        "run.probe = 0 0 10.5\nrun.probe_start = 30\noutput.snapshot_stride = 20\n");
    const int threads = thread_count();
    set_thread_count(1);
    const Timed a = run_timed("run", cfg, root / "det-1");
    set_thread_count(std::max(4, threads));
    const Timed b = run_timed("run", cfg, root / "det-n");
    set_thread_count(threads);
    std::string why;
    int compared = 0;
    bool ok = a.result.manifest.status != "error" && b.result.manifest.status != "error";
    for (const auto& e : fs::directory_iterator(root / "det-1")) {
      const std::string name = e.path().filename().string();
      if (name == "config.txt") continue;  // records the output directory
      ++compared;
      if (slurp(e.path()) != slurp(root / "det-n" / name)) {
        ok = false;
        why += " [" + name + " differs]";
      }
    }
    verdict(9, ok && compared > 0,
            std::to_string(compared) + " artifacts byte-identical at 1 and " +
                std::to_string(std::max(4, threads)) + " threads" + why);
  }

  return failures == 0 ? 0 : 1;
}
