#include "runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "stefan/diffeo_probe.hpp"
#include "stefan/interface_calc.hpp"
#include "stefan/ls_checker.hpp"
#include "stefan/scenario.hpp"

namespace stefan::app {

namespace fs = std::filesystem;

namespace {

void say(std::ostream& log, const RunOptions& opt, const std::string& s) {
  if (!opt.quiet) log << s << '\n';
}

std::string provenance(const Config& c, const std::string& command, const std::string& outcome) {
  std::ostringstream os;
  os << "version: " << kVersion << '\n';
  os << "command: " << command << '\n';
  os << "outcome: " << outcome << '\n';
  os << "\n# configuration\n" << serialize_config(c);
  return os.str();
}

void write_compat(const fs::path& path, const CompatibilityReport& r) {
  CsvWriter w(path, "condition,residual,pass");
  for (const auto& cond : r.conditions)
    w.text_row({cond.name, format_double(cond.residual), cond.pass ? "1" : "0"});
  w.close();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

std::vector<std::vector<double>> read_csv(const fs::path& path, const std::string& header) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw Error("'" + path.string() + "': expected header '" + header + "', got '" + line + "'");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> r;
    for (const auto& cell : split_csv(line)) r.push_back(std::stod(cell));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

Problem build_problem(const Config& c) {
  Problem p{c.chart(), default_laws(c.law_params()), {}, nullptr};
  p.chart.validate();
  const std::string& kind = c.scenario.kind;
  if (kind == "manufactured") {
    p.manufactured = std::make_unique<ManufacturedSolution>(p.chart, p.laws);
    p.initial = p.manufactured->initial_state();
    return p;
  }
  InitialData id;
  if (kind == "equilibrium") {
    id = equilibrium_data(p.chart, p.laws);
  } else if (kind == "perturbed_circle") {
    id = perturbed_circle_data(p.chart, p.laws, c.scenario.amplitude, c.scenario.mode, c.scenario.seed);
  } else if (kind == "radial_melt") {
    id = radial_melt_data(p.chart, p.laws, c.scenario.delta);
  } else {
    throw Error("unknown scenario kind '" + kind + "'");
  }
  // The initial velocity is filled in by simulate once the data has passed the checks.
  p.initial = State::initial(id.theta, id.h, Eigen::VectorXd::Zero(p.chart.n_s));
  return p;
}

double metric_strain(const TubularChart& chart, const HeightField& h) {
  const DeformationState def = upsilon(chart, h);
  return def.dzeta.cwiseAbs().maxCoeff() * h.values().cwiseAbs().maxCoeff();
}

RunResult simulate(const Config& c, const RunOptions& opt) {
  RunResult res;
  Problem p = build_problem(c);
  State z = p.initial;

  try {
    check_height_invariants(z.h, p.chart.a);
  } catch (const Error& e) {
    res.exit_code = kCompatAbort;
    res.message = std::string("height cap: ") + e.what();
    return res;
  }
  try {
    if (const double strain = metric_strain(p.chart, z.h); strain > kMetricStrainLimit)
      res.warnings.push_back("max |zeta' h| = " + format_double(strain) + " exceeds " +
                             format_double(kMetricStrainLimit) +
                             "; the lagged metric correction is expected to be unstable");
  } catch (const Error& e) {
    res.exit_code = kCompatAbort;
    res.message = std::string("initial deformation: ") + e.what();
    return res;
  }

  if (!p.manufactured) {
    res.compat = check_compatibility(z.theta, z.h, p.laws, c.run.tolerance);
    if (!res.compat.passed() && !opt.force) {
      std::string failed;
      for (const auto& n : res.compat.failed()) failed += (failed.empty() ? "" : ", ") + n;
      res.exit_code = kCompatAbort;
      res.message = "compatibility check failed: " + failed;
      return res;
    }
    try {
      z.dth = initial_velocity(z.theta, z.h, p.laws);
    } catch (const Error& e) {
      res.exit_code = kCompatAbort;
      res.message = std::string("initial velocity: ") + e.what();
      return res;
    }
  }

  const Sources src = p.manufactured ? p.manufactured->sources() : Sources{};
  const Sources* src_ptr = p.manufactured ? &src : nullptr;
  Stepper st(p.laws, freeze_coefficients(z.theta, p.laws, c.run.smoothing), c.run.dt,
             StepOptions{c.run.inner_iters, c.run.tolerance});

  res.series.push_back(timeseries_row(diagnostics(z, p.laws), 0.0));
  res.snapshots.emplace_back(0, z);
  for (int n = 1; n <= c.run.steps; ++n) {
    StepReport rep;
    try {
      z = st.advance(z, src_ptr, &rep);
    } catch (const Error& e) {
      res.exit_code = kHalted;
      res.message = "halted at step " + std::to_string(n) + ": " + e.what();
      if (res.snapshots.back().first != n - 1) res.snapshots.emplace_back(n - 1, z);
      return res;
    }
    res.series.push_back(timeseries_row(diagnostics(z, p.laws), rep.res_inner));
    const bool periodic = c.run.snapshot_every > 0 && n % c.run.snapshot_every == 0;
    if (periodic || n == c.run.steps) res.snapshots.emplace_back(n, z);
  }
  res.message = "completed " + std::to_string(c.run.steps) + " steps";
  return res;
}

int run_scenario(const Config& c, const fs::path& out, const RunOptions& opt, std::ostream& log) {
  fs::create_directories(out);
  RunResult res = simulate(c, opt);
  if (!res.series.empty()) write_timeseries(out / "timeseries.csv", res.series);
  for (const auto& [n, z] : res.snapshots) write_snapshot(out, n, z);
  if (!res.compat.conditions.empty()) write_compat(out / "compat.csv", res.compat);
  write_text(out / "provenance.txt", provenance(c, "run", res.message));
  for (const auto& w : res.warnings) log << "warning: " << w << '\n';
  if (res.exit_code == kOk) {
    say(log, opt, c.scenario.kind + ": " + res.message);
  } else {
    log << c.scenario.kind << ": " << res.message << '\n';
  }
  return res.exit_code;
}

int check_compat(const Config& c, const fs::path& out, std::ostream& log) {
  const Problem p = build_problem(c);
  if (p.manufactured) {
    log << "manufactured scenario carries forcing terms; compatibility is not checked\n";
    return kOk;
  }
  const CompatibilityReport r = check_compatibility(p.initial.theta, p.initial.h, p.laws, c.run.tolerance);
  for (const auto& cond : r.conditions)
    log << (cond.pass ? "pass  " : "FAIL  ") << cond.name << "  residual " << format_double(cond.residual) << '\n';
  log << "min |l(theta0)| on Sigma: " << format_double(r.min_abs_latent_heat) << '\n';
  if (!out.empty()) {
    fs::create_directories(out);
    write_compat(out / "compat.csv", r);
  }
  return r.passed() ? kOk : kCompatAbort;
}

int ls_scan(const Config& c, const fs::path& out, std::ostream& log) {
  FrozenCoefficients fc = FrozenCoefficients::isotropic(c.ls.m);
  fc.l2 = c.ls.l2;
  ScanGrid g;
  g.directions = c.ls.directions;
  g.n_modulus = c.ls.n_modulus;
  g.n_phase = c.ls.n_phase;
  g.lambda_min = c.ls.lambda_min;
  g.lambda_max = c.ls.lambda_max;
  const bool admissible = fc.l2 * fc.l0 > 0.0;
  if (!admissible) log << "l2 l0 <= 0: coefficients are outside the admissible set, scanning anyway\n";
  const ScanReport r = scan(fc, g, admissible);

  fs::create_directories(out);
  CsvWriter w(out / "ls_scan.csv", "variant,min_abs,min_normalized,argmin_xi_norm,argmin_lambda_re,argmin_lambda_im,samples");
  auto emit = [&](const VariantResult& v) {
    w.text_row({variant_name(v.variant), format_double(v.min_abs), format_double(v.min_normalized),
                format_double(v.argmin_xi.norm()), format_double(v.argmin_lambda.real()),
                format_double(v.argmin_lambda.imag()), std::to_string(v.samples)});
    log << variant_name(v.variant) << ": min|det| = " << format_double(v.min_abs)
        << ", min normalized = " << format_double(v.min_normalized) << '\n';
  };
  for (const auto& v : r.variants) emit(v);
  emit(r.latent_as_shown);
  w.close();
  log << "min Re mu = " << format_double(r.min_re_mu) << '\n';
  if (!admissible) {
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(c.ls.m);
    xi(0) = 1.0;
    const AxisZero zr = locate_real_axis_zero(fc, LsVariant::ls, xi, c.ls.lambda_min, c.ls.lambda_max);
    if (zr.found)
      log << "real-axis zero of the LS determinant at lambda = " << format_double(zr.lambda)
          << " (|det| = " << format_double(zr.abs_det) << ")\n";
    else
      log << "no real-axis zero of the LS determinant in the scan range\n";
  }
  write_text(out / "provenance.txt", provenance(c, "ls-scan", "scanned"));
  return kOk;
}

int probe_snapshot(const Config& c, const fs::path& snapshot, const fs::path& out, std::ostream& log) {
  const auto rows = read_csv(snapshot, kSnapshotHeader);
  if (rows.empty()) throw Error("'" + snapshot.string() + "' holds no data rows");
  std::vector<double> ss, rs;
  for (const auto& r : rows) {
    if (r.size() != 3) throw Error("'" + snapshot.string() + "': expected 3 columns");
    ss.push_back(r[0]);
    rs.push_back(r[1]);
  }
  auto uniq = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const std::vector<double> s_nodes = uniq(ss), r_nodes = uniq(rs);
  const int nx = static_cast<int>(s_nodes.size()), ny = static_cast<int>(r_nodes.size());
  if (static_cast<std::size_t>(nx) * ny != rows.size()) throw Error("snapshot is not a full tensor grid");

  const double R0 = c.geometry.R0;
  ProbeGrid g;
  g.nx = nx;
  g.y.resize(ny);
  for (int i = 0; i < ny; ++i) {
    g.y(i) = r_nodes[i] - R0;
    if (std::abs(g.y(i)) < 1e-9 * R0) {
      g.y(i) = 0.0;
      g.y_break = i;
    }
  }
  // A single snapshot is placed at the temporal centre, where xi = 1.
  g.t = Eigen::VectorXd::Constant(1, c.probe.t_c);
  g.validate();

  std::map<double, int> col, row;
  for (int j = 0; j < nx; ++j) col[s_nodes[j]] = j;
  for (int i = 0; i < ny; ++i) row[r_nodes[i]] = i;
  SpaceTimeField theta{g, {Eigen::ArrayXXd(ny, nx)}};
  for (const auto& r : rows) theta.frames[0](row[r[1]], col[r[0]]) = r[2];

  ProbeGrid gh = g;
  gh.y = Eigen::VectorXd::Zero(1);
  gh.y_break = -1;
  SpaceTimeField h{gh, {Eigen::ArrayXXd::Zero(1, nx)}};
  fs::path iface = snapshot;
  iface.replace_filename(snapshot.stem().string() + "_interface.csv");
  if (fs::exists(iface)) {
    for (const auto& r : read_csv(iface, kInterfaceHeader)) {
      if (!col.count(r[0])) throw Error("interface nodes do not match the snapshot grid");
      h.frames[0](0, col[r[0]]) = r[1];
    }
  } else {
    log << "no interface file next to the snapshot; h taken as 0\n";
  }

  const ParamDiffeo d = ParamDiffeo::make(c.probe.x_c, c.probe.y_c, c.probe.eps0, c.geometry.a, c.probe.t_c);
  const double step = c.probe.step > 0.0 ? c.probe.step : 0.5 * d.r0;
  const auto table = smoothness_probe(d, theta, h, step);
  log << "single snapshot: lambda rows vanish because the time shift has nothing to interpolate\n";

  fs::create_directories(out);
  CsvWriter w(out / "probe_table.csv", "field,direction,order,sup_norm");
  for (const auto& r : table) {
    w.text_row({r.field, direction_name(r.direction), std::to_string(r.order), format_double(r.sup_norm)});
    log << r.field << " " << direction_name(r.direction) << " order " << r.order << ": "
        << format_double(r.sup_norm) << '\n';
  }
  w.close();
  if (g.y_break >= 4 && ny - 1 - g.y_break >= 4) {
    const NormalDerivativeReport nd = normal_derivative_invariance(d, 0.5 * d.r0, 0.5 * d.r0, theta);
    log << "normal-derivative invariance residual: " << format_double(nd.max_residual)
        << (nd.standard_configuration ? "" : " (nonstandard configuration: " + nd.note + ")") << '\n';
  }
  write_text(out / "provenance.txt", provenance(c, "probe " + snapshot.string(), "probed"));
  return kOk;
}

OracleComparison compare_with_oracle(const Config& c) {
  if (c.scenario.kind != "radial_melt") throw Error("oracle comparison needs scenario.kind = radial_melt");
  Config mc = c;
  mc.run.steps = static_cast<int>(std::lround(c.oracle.horizon / c.run.dt));
  OracleComparison cmp;
  cmp.main = simulate(mc, {});
  if (cmp.main.exit_code != kOk) throw Error("main solver: " + cmp.main.message);

  const TubularChart chart = c.chart();
  const MaterialLaws laws = default_laws(c.law_params());
  RadialGrid grid{chart.R_in, chart.R_out, c.oracle.refine * chart.n_r1, c.oracle.refine * chart.n_r2};
  const RadialState init = radial_initial(grid, chart.R0, radial_melt_profile(chart, laws, c.scenario.delta));
  cmp.oracle = solve_radial(laws, grid, init, c.run.dt / c.oracle.dt_divisor, c.oracle.horizon);

  const auto& os = cmp.oracle.samples;
  for (const auto& row : cmp.main.series) {
    auto it = std::lower_bound(os.begin(), os.end(), row.t - 1e-12, [](const RadialSample& s, double t) { return s.t < t; });
    if (it == os.end()) it = std::prev(os.end());
    double Ro = it->R;
    if (it != os.begin() && std::abs(it->t - row.t) > 1e-12) {
      const auto& a = *std::prev(it);
      Ro = a.R + (it->R - a.R) * (row.t - a.t) / (it->t - a.t);
    }
    const double rel = std::abs(row.R_mean - Ro) / Ro;
    cmp.rows.push_back({row.t, row.R_mean, Ro, rel});
    cmp.max_rel = std::max(cmp.max_rel, rel);
  }
  return cmp;
}

int oracle_compare(const Config& c, const fs::path& out, std::ostream& log) {
  const OracleComparison cmp = compare_with_oracle(c);
  fs::create_directories(out);
  CsvWriter w(out / "oracle_compare.csv", "t,R_main,R_oracle,rel_err");
  for (const auto& r : cmp.rows) w.row({r[0], r[1], r[2], r[3]});
  w.close();
  CsvWriter o(out / "oracle_series.csv", "t,R,E_total,S_total");
  for (const auto& s : cmp.oracle.samples) o.row({s.t, s.R, s.E_total, s.S_total});
  o.close();
  write_timeseries(out / "timeseries.csv", cmp.main.series);
  std::ostringstream msg;
  msg << "max relative radius error " << format_double(cmp.max_rel);
  write_text(out / "provenance.txt", provenance(c, "oracle-compare", msg.str()));
  log << msg.str() << '\n';
  return kOk;
}

int sweep_threads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("STEFAN_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) n = v;
  }
  return std::max(1, n);
}

int sweep(const std::vector<std::string>& configs, const fs::path& out, const RunOptions& opt, std::ostream& log) {
  std::vector<int> codes(configs.size(), kOk);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      const fs::path dir = out / fs::path(configs[i]).stem();
      std::ostringstream local;
      try {
        codes[i] = run_scenario(load_config(configs[i]), dir, opt, local);
      } catch (const std::exception& e) {
        local << configs[i] << ": " << e.what() << '\n';
        codes[i] = kFailure;
      }
      std::lock_guard<std::mutex> lock(log_mutex);
      log << "[" << dir.string() << "] exit " << codes[i] << '\n' << local.str();
    }
  };
  const int n = std::min<int>(sweep_threads(), static_cast<int>(configs.size()));
  std::vector<std::thread> pool;
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return codes.empty() ? kOk : *std::max_element(codes.begin(), codes.end());
}

}  // namespace stefan::app
