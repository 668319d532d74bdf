#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stefan/errors.hpp"
#include "stefan/geometry.hpp"
#include "stefan/materials.hpp"

namespace stefan::app {

struct GeometryConfig {
  double R0 = 1.0;
  double a = 0.5;
  double R_in = 0.25;
  double R_out = 2.0;
  int N_s = 64;
  int N_r1 = 32;
  int N_r2 = 32;
  bool operator==(const GeometryConfig&) const = default;
};

struct MaterialConfig {
  double kappa1 = 1.0;
  double kappa2 = 1.5;
  double lm = 1.0;
  double theta_m = 1.0;
  double sigma = 0.1;
  double gamma0 = 0.0;
  double d1 = 1.0;
  double d2 = 1.0;
  double d_exponent = 0.0;
  double theta_lo = 0.5;
  double theta_hi = 2.0;
  bool operator==(const MaterialConfig&) const = default;
};

struct RunConfig {
  double dt = 1e-3;
  int steps = 100;
  int inner_iters = 2;
  int smoothing = 0;
  double tolerance = 1e-10;
  // 0 writes only the first and last snapshot.
  int snapshot_every = 0;
  bool operator==(const RunConfig&) const = default;
};

struct ScenarioConfig {
  std::string kind = "equilibrium";
  std::uint64_t seed = 1;
  double amplitude = 0.02;
  int mode = 2;
  double delta = 0.3;
  bool operator==(const ScenarioConfig&) const = default;
};

struct OracleConfig {
  int refine = 8;
  int dt_divisor = 8;
  double horizon = 0.05;
  bool operator==(const OracleConfig&) const = default;
};

struct ProbeConfig {
  double x_c = 0.0;
  double y_c = 0.5 / 6.0;     // a / 6
  double eps0 = 0.5 / 40.0;   // a / 40
  double t_c = 4.0 * eps0;
  // Divided-difference step; 0 means r0 / 2.
  double step = 0.0;
  bool operator==(const ProbeConfig&) const = default;
};

struct LsConfig {
  int m = 1;
  double l2 = 1.0;
  int directions = 64;
  int n_modulus = 61;
  int n_phase = 41;
  double lambda_min = 1e-3;
  double lambda_max = 1e3;
  bool operator==(const LsConfig&) const = default;
};

struct OutputConfig {
  std::string dir = "out";
  bool operator==(const OutputConfig&) const = default;
};

struct Config {
  GeometryConfig geometry;
  MaterialConfig material;
  RunConfig run;
  ScenarioConfig scenario;
  OracleConfig oracle;
  ProbeConfig probe;
  LsConfig ls;
  OutputConfig output;
  bool operator==(const Config&) const = default;

  TubularChart chart() const;
  DefaultLawParams law_params() const;
};

struct ConfigIssue {
  std::string key;
  int line = 0;  // 0 for values taken from defaults
  std::string message;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

// key = value lines, '#' comments, dotted section keys. Numeric values accept + - * / and parentheses
// over literals and other keys (bare names resolve within the same section first).
Config parse_config(const std::string& text);
Config load_config(const std::string& path);

// Every key with its resolved value; parse_config(serialize_config(c)) == c.
std::string serialize_config(const Config& c);

// Shortest decimal that reads back to the same double.
std::string format_double(double v);

std::vector<std::string> config_keys();

}  // namespace stefan::app
