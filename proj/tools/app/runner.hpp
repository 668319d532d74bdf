#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "config.hpp"
#include "emit.hpp"
#include "stefan/manufactured.hpp"
#include "stefan/radial_oracle.hpp"

namespace stefan::app {

enum ExitCode : int { kOk = 0, kFailure = 1, kCompatAbort = 2, kHalted = 3 };

struct RunOptions {
  bool force = false;
  bool quiet = false;
};

inline constexpr const char* kVersion = "stefan 0.1.0";

struct Problem {
  TubularChart chart;
  MaterialLaws laws;
  State initial;
  // Set for the manufactured scenario; owns the forcing closures.
  std::unique_ptr<ManufacturedSolution> manufactured;
};

Problem build_problem(const Config& c);

// Whole-run trajectory kept in memory for emission and for the acceptance experiments.
struct RunResult {
  int exit_code = kOk;
  std::string message;
  std::vector<TimeseriesRow> series;
  std::vector<std::pair<int, State>> snapshots;
  CompatibilityReport compat;
  std::vector<std::string> warnings;
};

// max |zeta'| * max |h|. The metric correction lagged by the stepper outweighs the implicit
// principal part once this exceeds kMetricStrainLimit, and the run then grows a grid-scale mode.
double metric_strain(const TubularChart& chart, const HeightField& h);
inline constexpr double kMetricStrainLimit = 0.29289321881345248;  // 1 - 1/sqrt(2)

RunResult simulate(const Config& c, const RunOptions& opt);

int run_scenario(const Config& c, const std::filesystem::path& out, const RunOptions& opt, std::ostream& log);
int check_compat(const Config& c, const std::filesystem::path& out, std::ostream& log);
int ls_scan(const Config& c, const std::filesystem::path& out, std::ostream& log);
int probe_snapshot(const Config& c, const std::filesystem::path& snapshot, const std::filesystem::path& out,
                   std::ostream& log);

struct OracleComparison {
  // (t, R_main, R_oracle, relative error)
  std::vector<std::array<double, 4>> rows;
  double max_rel = 0.0;
  RunResult main;
  RadialTrajectory oracle;
};

// Main solver on the configured grid against the radial oracle refined by oracle.refine in space
// and oracle.dt_divisor in time, both up to oracle.horizon.
OracleComparison compare_with_oracle(const Config& c);
int oracle_compare(const Config& c, const std::filesystem::path& out, std::ostream& log);

// Runs every config into out/<config stem>; STEFAN_THREADS caps the number of concurrent runs.
int sweep(const std::vector<std::string>& configs, const std::filesystem::path& out, const RunOptions& opt,
          std::ostream& log);

int sweep_threads();

}  // namespace stefan::app
