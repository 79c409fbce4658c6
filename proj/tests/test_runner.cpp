#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vecgrav/runner.hpp"

using namespace vecgrav;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vecgrav_runner_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig small_blob(const fs::path& out) {
  RunConfig c = parse_config(
      "grid.counts = 32\ngrid.dx = 1\nsolver.sponge_width = 0\n"
      "scenario.type = oscillating_blob\nscenario.width = 1\nscenario.amplitude = 0.5\n"
      "scenario.omega = 0.52359877559829882\nscenario.ramp_time = 6\n"
      "run.duration = 40\nrun.inner_box = 8\nrun.outer_box = 12\nrun.average_cycles = 1\n"
      "output.snapshot_stride = 40\n");
  c.output.directory = out.string();
  return c;
}

}  // namespace

TEST(Runner, IdentitiesReportListsEveryCheck) {
  RunConfig c = parse_config("grid.counts = 4\ngrid.dx = 1\nidentities.samples = 500\n");
  c.output.directory = scratch_dir("identities").string();
  const CommandResult r = run_command("identities", c);
  EXPECT_EQ(r.exit_code, exit_pass) << r.report.text();
  EXPECT_GE(r.report.checks.size(), 12u);
  const std::string report = slurp(fs::path(c.output.directory) / "report.txt");
  EXPECT_NE(report.find("status PASS"), std::string::npos);
  EXPECT_NE(slurp(fs::path(c.output.directory) / "manifest.txt").find("status pass"), std::string::npos);
}

TEST(Runner, StaticBallPassesNewtonianCheck) {
  RunConfig c = parse_config("grid.counts = 40\ngrid.dx = 1\nscenario.type = static_ball\nscenario.width = 1.5\n");
  c.output.directory = scratch_dir("static").string();
  const CommandResult r = run_command("static", c);
  EXPECT_EQ(r.exit_code, exit_pass) << r.report.text();
  const std::string profile = slurp(fs::path(c.output.directory) / "radial_profile.csv");
  EXPECT_EQ(profile.substr(0, profile.find('\n')), "r,phi,phi_newton,relative_error");
}

TEST(Runner, StaticRejectsMovingSource) {
  RunConfig c = small_blob(scratch_dir("static_blob"));
  const CommandResult r = run_command("static", c);
  EXPECT_EQ(r.exit_code, exit_runtime);
  EXPECT_EQ(r.manifest.status, "error");
  EXPECT_NE(slurp(fs::path(c.output.directory) / "manifest.txt").find("error static"), std::string::npos);
}

TEST(Runner, FailedCheckGivesNonzeroExit) {
  // A loose Poisson tolerance on a 20^3 grid misses the 1% Newtonian bound (about 2%).
  RunConfig c = parse_config("grid.counts = 20\ngrid.dx = 1\nscenario.type = static_ball\nscenario.width = 1.2\n");
  c.output.directory = scratch_dir("static_fail").string();
  c.solver.static_tolerance = 1e-2;
  const CommandResult r = run_command("static", c);
  EXPECT_EQ(r.exit_code, exit_check_failed) << r.report.text();
  EXPECT_EQ(r.manifest.status, "fail");
}

TEST(Runner, RunWritesDocumentedArtifacts) {
  const fs::path out = scratch_dir("run");
  const CommandResult r = run_command("run", small_blob(out));
  EXPECT_EQ(r.manifest.status == "error", false) << r.manifest.error;
  for (const char* f : {"energy.csv", "fields.csv", "report.txt", "config.txt", "snapshot_000040.csv",
                        "snapshot_000081.csv"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  EXPECT_EQ(slurp(out / "energy.csv").substr(0, 38), "t,total_W,surface_flux,work_on_source\n");
  const std::string fields = slurp(out / "fields.csv");
  EXPECT_EQ(fields.substr(0, fields.find('\n')), "x,y,z,Fx,Fy,Fz,Gx,Gy,Gz");
}

TEST(Runner, OutputsIdenticalAcrossThreadCounts) {
  const fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b");
  set_thread_count(1);
  run_command("run", small_blob(a));
  set_thread_count(4);
  run_command("run", small_blob(b));
  for (const auto& e : fs::directory_iterator(a)) {
    const std::string name = e.path().filename().string();
    if (name == "config.txt") continue;  // holds the output directory
    EXPECT_EQ(slurp(e.path()), slurp(b / name)) << name;
  }
}

TEST(Runner, ConfigRejectedBeforeRun) {
  EXPECT_THROW(load_config("/nonexistent/vecgrav.cfg"), IoError);
  EXPECT_THROW(run_command("bogus", parse_config("grid.counts = 4\ngrid.dx = 1\n")), UsageError);
}

TEST(Runner, OverridesApply) {
  RunConfig c = parse_config("grid.counts = 32\ngrid.dx = 2\n");
  Overrides o;
  o.resolution = 64;
  o.lambda = 0.5;
  o.out = "elsewhere";
  apply_overrides(c, o);
  EXPECT_EQ(c.grid.counts[0], 64);
  EXPECT_DOUBLE_EQ(c.grid.dx, 1.0);
  EXPECT_EQ(c.force.lambda, 0.5);
  EXPECT_EQ(c.output.directory, "elsewhere");
}
