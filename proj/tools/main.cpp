#include <CLI11.hpp>

#include <iostream>

#include "runner.hpp"

using namespace stefan;
using namespace stefan::app;

int main(int argc, char** argv) {
  CLI::App app{"Two-phase Stefan problem with surface tension and kinetic undercooling"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  RunOptions opt;
  app.add_option("--config,-c", config_path, "key = value configuration file");
  app.add_option("--out,-o", out_dir, "output directory (overrides output.dir)");
  app.add_flag("--force", opt.force, "run even when the compatibility check fails");
  app.add_flag("--quiet,-q", opt.quiet, "only report failures");

  auto* run = app.add_subcommand("run", "advance the configured scenario");
  auto* compat = app.add_subcommand("check-compat", "check compatibility of the initial data");
  auto* ls = app.add_subcommand("ls-scan", "scan the Lopatinskii-Shapiro determinant");
  auto* probe = app.add_subcommand("probe", "parameter-derivative table of a written snapshot");
  std::string snapshot;
  probe->add_option("--snapshot", snapshot, "snapshot_<n>.csv written by run")->required()->check(CLI::ExistingFile);
  auto* oracle = app.add_subcommand("oracle-compare", "compare a radial_melt run against the radial oracle");
  auto* sw = app.add_subcommand("sweep", "run several configurations into out/<stem>");
  std::vector<std::string> sweep_configs;
  sw->add_option("configs", sweep_configs, "configuration files")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kFailure;
  }

  try {
    if (*sw) return sweep(sweep_configs, out_dir.empty() ? "out" : out_dir, opt, std::cerr);

    const Config c = config_path.empty() ? Config{} : load_config(config_path);
    const std::filesystem::path out = out_dir.empty() ? c.output.dir : out_dir;
    if (*run) return run_scenario(c, out, opt, std::cerr);
    if (*compat) return check_compat(c, out, std::cerr);
    if (*ls) return ls_scan(c, out, std::cerr);
    if (*probe) return probe_snapshot(c, snapshot, out, std::cerr);
    if (*oracle) return oracle_compare(c, out, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error:\n" << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
