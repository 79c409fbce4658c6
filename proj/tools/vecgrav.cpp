// vecgrav <subcommand> --config <path> [--out <dir>] [--threads N]
//         [--resolution N] [--lambda X --mu Y --nu Z]

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vecgrav/runner.hpp"

int main(int argc, char** argv) {
  using namespace vecgrav;
  CLI::App app{"Vector gravity field simulator"};
  app.require_subcommand(1, 1);

  std::string config_path;
  Overrides ov;
  int threads = 0;
  for (const std::string& name : subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "config file")->required();
    sub->add_option("--out", ov.out, "output directory (overrides output.directory)");
    sub->add_option("--threads", threads, "worker threads; does not change outputs")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--resolution", ov.resolution, "cells along x, extent kept");
    sub->add_option("--lambda", ov.lambda, "force-law lambda");
    sub->add_option("--mu", ov.mu, "force-law mu");
    sub->add_option("--nu", ov.nu, "force-law nu");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
    apply_overrides(cfg, ov);
  } catch (const ConfigError& e) {
    for (const auto& issue : e.issues())
      if (issue.line > 0)
        std::fprintf(stderr, "%s:%d: %s\n", config_path.c_str(), issue.line, issue.message.c_str());
      else
        std::fprintf(stderr, "%s: %s\n", config_path.c_str(), issue.message.c_str());
    return exit_usage;
  } catch (const Error& e) {
    std::fprintf(stderr, "%s: %s\n", config_path.c_str(), e.what());
    return exit_usage;
  }
  if (threads > 0) set_thread_count(threads);

  try {
    const CommandResult res = run_command(sub, cfg);
    if (!res.report.title.empty()) std::cout << res.report.text();
    if (!res.manifest.error.empty()) std::fprintf(stderr, "error: %s\n", res.manifest.error.c_str());
    std::printf("artifacts in %s\n", cfg.output.directory.c_str());
    return res.exit_code;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_runtime;
  }
}
