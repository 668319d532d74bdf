#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "stefan/diffeo_probe.hpp"

namespace stefan::app {

namespace {

enum class Kind { real, integer, text };

struct Entry {
  std::string key;
  Kind kind;
  std::string fallback;
  std::function<void(Config&, double, const std::string&)> set;
  std::function<std::string(const Config&)> get;
};

template <typename T>
Entry real(const std::string& key, const std::string& fallback, T Config::*section, double T::*field) {
  return {key, Kind::real, fallback, [=](Config& c, double v, const std::string&) { (c.*section).*field = v; },
          [=](const Config& c) { return format_double((c.*section).*field); }};
}

template <typename T, typename I>
Entry integer(const std::string& key, const std::string& fallback, T Config::*section, I T::*field) {
  return {key, Kind::integer, fallback,
          [=](Config& c, double v, const std::string&) { (c.*section).*field = static_cast<I>(std::llround(v)); },
          [=](const Config& c) { return std::to_string((c.*section).*field); }};
}

template <typename T>
Entry text(const std::string& key, const std::string& fallback, T Config::*section, std::string T::*field) {
  return {key, Kind::text, fallback, [=](Config& c, double, const std::string& s) { (c.*section).*field = s; },
          [=](const Config& c) { return (c.*section).*field; }};
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      real("geometry.R0", "1", &Config::geometry, &GeometryConfig::R0),
      real("geometry.a", "R0/2", &Config::geometry, &GeometryConfig::a),
      real("geometry.R_in", "R0/4", &Config::geometry, &GeometryConfig::R_in),
      real("geometry.R_out", "2*R0", &Config::geometry, &GeometryConfig::R_out),
      integer("geometry.N_s", "64", &Config::geometry, &GeometryConfig::N_s),
      integer("geometry.N_r1", "32", &Config::geometry, &GeometryConfig::N_r1),
      integer("geometry.N_r2", "32", &Config::geometry, &GeometryConfig::N_r2),
      real("material.kappa1", "1", &Config::material, &MaterialConfig::kappa1),
      real("material.kappa2", "1.5", &Config::material, &MaterialConfig::kappa2),
      real("material.lm", "1", &Config::material, &MaterialConfig::lm),
      real("material.theta_m", "1", &Config::material, &MaterialConfig::theta_m),
      real("material.sigma", "0.1", &Config::material, &MaterialConfig::sigma),
      real("material.gamma0", "0", &Config::material, &MaterialConfig::gamma0),
      real("material.d1", "1", &Config::material, &MaterialConfig::d1),
      real("material.d2", "1", &Config::material, &MaterialConfig::d2),
      real("material.d_exponent", "0", &Config::material, &MaterialConfig::d_exponent),
      real("material.theta_lo", "0.5", &Config::material, &MaterialConfig::theta_lo),
      real("material.theta_hi", "2", &Config::material, &MaterialConfig::theta_hi),
      real("run.dt", "1e-3", &Config::run, &RunConfig::dt),
      integer("run.steps", "100", &Config::run, &RunConfig::steps),
      integer("run.inner_iters", "2", &Config::run, &RunConfig::inner_iters),
      integer("run.smoothing", "0", &Config::run, &RunConfig::smoothing),
      real("run.tolerance", "1e-10", &Config::run, &RunConfig::tolerance),
      integer("run.snapshot_every", "0", &Config::run, &RunConfig::snapshot_every),
      text("scenario.kind", "equilibrium", &Config::scenario, &ScenarioConfig::kind),
      integer("scenario.seed", "1", &Config::scenario, &ScenarioConfig::seed),
      real("scenario.amplitude", "0.02", &Config::scenario, &ScenarioConfig::amplitude),
      integer("scenario.mode", "2", &Config::scenario, &ScenarioConfig::mode),
      real("scenario.delta", "0.3", &Config::scenario, &ScenarioConfig::delta),
      integer("oracle.refine", "8", &Config::oracle, &OracleConfig::refine),
      integer("oracle.dt_divisor", "8", &Config::oracle, &OracleConfig::dt_divisor),
      real("oracle.horizon", "0.05", &Config::oracle, &OracleConfig::horizon),
      real("probe.x_c", "0", &Config::probe, &ProbeConfig::x_c),
      real("probe.y_c", "geometry.a/6", &Config::probe, &ProbeConfig::y_c),
      real("probe.eps0", "geometry.a/40", &Config::probe, &ProbeConfig::eps0),
      real("probe.t_c", "4*eps0", &Config::probe, &ProbeConfig::t_c),
      real("probe.step", "0", &Config::probe, &ProbeConfig::step),
      integer("ls.m", "1", &Config::ls, &LsConfig::m),
      real("ls.l2", "1", &Config::ls, &LsConfig::l2),
      integer("ls.directions", "64", &Config::ls, &LsConfig::directions),
      integer("ls.n_modulus", "61", &Config::ls, &LsConfig::n_modulus),
      integer("ls.n_phase", "41", &Config::ls, &LsConfig::n_phase),
      real("ls.lambda_min", "1e-3", &Config::ls, &LsConfig::lambda_min),
      real("ls.lambda_max", "1e3", &Config::ls, &LsConfig::lambda_max),
      text("output.dir", "out", &Config::output, &OutputConfig::dir),
  };
  return entries;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string section_of(const std::string& key) { return key.substr(0, key.find('.')); }

struct Raw {
  std::string text;
  int line = 0;
};

struct EvalFailure {
  std::string message;
};

// Recursive-descent evaluation with lazy, cycle-checked resolution of referenced keys.
class Evaluator {
 public:
  Evaluator(const std::map<std::string, Raw>& given, const std::map<std::string, const Entry*>& index)
      : given_(given), index_(index) {}

  double value(const std::string& key) {
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    if (active_.count(key)) throw EvalFailure{"circular reference through " + key};
    const Entry* e = index_.at(key);
    if (e->kind == Kind::text) throw EvalFailure{key + " is not numeric"};
    active_.insert(key);
    const std::string expr = given_.count(key) ? given_.at(key).text : e->fallback;
    const std::string saved_section = section_;
    const std::string saved_src = src_;
    const std::size_t saved_pos = pos_;
    section_ = section_of(key);
    src_ = expr;
    pos_ = 0;
    const double v = expression();
    skip();
    if (pos_ != src_.size()) throw EvalFailure{"unexpected '" + src_.substr(pos_) + "' in '" + expr + "'"};
    section_ = saved_section;
    src_ = saved_src;
    pos_ = saved_pos;
    active_.erase(key);
    cache_[key] = v;
    return v;
  }

 private:
  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  double expression() {
    double v = term();
    for (;;) {
      skip();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
        const char op = src_[pos_++];
        const double r = term();
        v = op == '+' ? v + r : v - r;
      } else {
        return v;
      }
    }
  }

  double term() {
    double v = factor();
    for (;;) {
      skip();
      if (pos_ < src_.size() && (src_[pos_] == '*' || src_[pos_] == '/')) {
        const char op = src_[pos_++];
        const double r = factor();
        v = op == '*' ? v * r : v / r;
      } else {
        return v;
      }
    }
  }

  double factor() {
    skip();
    if (pos_ >= src_.size()) throw EvalFailure{"expression ends early in '" + src_ + "'"};
    const char c = src_[pos_];
    if (c == '+' || c == '-') {
      ++pos_;
      const double v = factor();
      return c == '-' ? -v : v;
    }
    if (c == '(') {
      ++pos_;
      const double v = expression();
      skip();
      if (pos_ >= src_.size() || src_[pos_] != ')') throw EvalFailure{"missing ')' in '" + src_ + "'"};
      ++pos_;
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      const auto res = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), v);
      if (res.ec != std::errc()) throw EvalFailure{"bad number in '" + src_ + "'"};
      pos_ = static_cast<std::size_t>(res.ptr - src_.data());
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' || src_[pos_] == '.'))
        ++pos_;
      return value(resolve(src_.substr(start, pos_ - start)));
    }
    throw EvalFailure{std::string("unexpected '") + c + "' in '" + src_ + "'"};
  }

  std::string resolve(const std::string& name) const {
    if (index_.count(name)) return name;
    const std::string local = section_ + "." + name;
    if (index_.count(local)) return local;
    std::string found;
    for (const auto& [k, e] : index_) {
      if (k.substr(k.find('.') + 1) == name) {
        if (!found.empty()) throw EvalFailure{"ambiguous name '" + name + "'"};
        found = k;
      }
    }
    if (found.empty()) throw EvalFailure{"unknown name '" + name + "'"};
    return found;
  }

  const std::map<std::string, Raw>& given_;
  const std::map<std::string, const Entry*>& index_;
  std::map<std::string, double> cache_;
  std::set<std::string> active_;
  std::string section_;
  std::string src_;
  std::size_t pos_ = 0;
};

class Issues {
 public:
  explicit Issues(const std::map<std::string, Raw>& given) : given_(given) {}
  void add(const std::string& key, const std::string& message) {
    const auto it = given_.find(key);
    list.push_back({key, it == given_.end() ? 0 : it->second.line, message});
  }
  void require(bool ok, const std::string& key, const std::string& message) {
    if (!ok) add(key, message);
  }
  std::vector<ConfigIssue> list;

 private:
  const std::map<std::string, Raw>& given_;
};

void validate(const Config& c, Issues& is) {
  const auto& g = c.geometry;
  is.require(g.R0 > 0.0, "geometry.R0", "invariant R0 > 0 violated");
  is.require(g.a > 0.0 && g.a < g.R0, "geometry.a",
             "invariant 0 < a < R0 violated (a = " + format_double(g.a) + ", R0 = " + format_double(g.R0) + ")");
  is.require(g.R_in > 0.0 && g.R_in < g.R0 - g.a, "geometry.R_in", "invariant 0 < R_in < R0 - a violated");
  is.require(g.R_out > g.R0 + g.a, "geometry.R_out", "invariant R_out > R0 + a violated");
  is.require(g.N_s >= 8, "geometry.N_s", "need N_s >= 8");
  is.require(g.N_r1 >= 4, "geometry.N_r1", "need N_r1 >= 4");
  is.require(g.N_r2 >= 4, "geometry.N_r2", "need N_r2 >= 4");

  const auto& m = c.material;
  is.require(m.kappa1 > 0.0 && m.kappa2 > 0.0, "material.kappa1", "heat capacities must be positive");
  is.require(m.lm > 0.0, "material.lm", "latent heat at melting must be positive");
  is.require(m.theta_m > 0.0, "material.theta_m", "melting temperature must be positive");
  is.require(m.sigma >= 0.0, "material.sigma", "surface tension must be non-negative");
  is.require(m.gamma0 >= 0.0, "material.gamma0", "kinetic coefficient must be non-negative");
  is.require(m.d1 > 0.0 && m.d2 > 0.0, "material.d1", "conductivities must be positive");
  is.require(m.theta_lo > 0.0 && m.theta_lo < m.theta_hi, "material.theta_lo", "need 0 < theta_lo < theta_hi");
  if (is.list.empty()) {
    try {
      (void)default_laws(c.law_params());
    } catch (const Error& e) {
      is.add("material", e.what());
    }
  }

  const auto& r = c.run;
  is.require(r.dt > 0.0, "run.dt", "dt must be positive");
  is.require(r.steps >= 0, "run.steps", "steps must be non-negative");
  is.require(r.inner_iters >= 1, "run.inner_iters", "inner_iters must be at least 1");
  is.require(r.smoothing >= 0, "run.smoothing", "smoothing must be non-negative");
  is.require(r.tolerance > 0.0, "run.tolerance", "tolerance must be positive");
  is.require(r.snapshot_every >= 0, "run.snapshot_every", "snapshot_every must be non-negative");

  const auto& s = c.scenario;
  static const std::set<std::string> kinds = {"equilibrium", "perturbed_circle", "radial_melt", "manufactured"};
  is.require(kinds.count(s.kind) == 1, "scenario.kind",
             "unknown scenario '" + s.kind + "' (equilibrium, perturbed_circle, radial_melt, manufactured)");
  is.require(s.amplitude >= 0.0, "scenario.amplitude", "amplitude must be non-negative");
  is.require(s.mode >= 0, "scenario.mode", "mode must be non-negative");
  is.require(std::isfinite(s.delta), "scenario.delta", "delta must be finite");

  const auto& o = c.oracle;
  is.require(o.refine >= 1, "oracle.refine", "refine must be at least 1");
  is.require(o.dt_divisor >= 1, "oracle.dt_divisor", "dt_divisor must be at least 1");
  is.require(o.horizon > 0.0, "oracle.horizon", "horizon must be positive");

  if (g.a > 0.0) {
    try {
      const ParamDiffeo d = ParamDiffeo::make(c.probe.x_c, c.probe.y_c, c.probe.eps0, g.a, c.probe.t_c);
      is.require(c.probe.step >= 0.0 && c.probe.step <= d.r0, "probe.step", "step must lie in [0, r0]");
    } catch (const DomainError& e) {
      is.add("probe", e.what());
    }
  }

  const auto& l = c.ls;
  is.require(l.m >= 1, "ls.m", "m must be at least 1");
  is.require(l.l2 != 0.0, "ls.l2", "l2 must be nonzero");
  is.require(l.directions >= 1, "ls.directions", "directions must be at least 1");
  is.require(l.n_modulus >= 2 && l.n_phase >= 2, "ls.n_modulus", "need at least 2 moduli and phases");
  is.require(l.lambda_min > 0.0 && l.lambda_min < l.lambda_max, "ls.lambda_min", "need 0 < lambda_min < lambda_max");

  is.require(!c.output.dir.empty(), "output.dir", "output directory must be non-empty");
}

}  // namespace

TubularChart Config::chart() const {
  TubularChart c;
  c.R0 = geometry.R0;
  c.a = geometry.a;
  c.R_in = geometry.R_in;
  c.R_out = geometry.R_out;
  c.n_s = geometry.N_s;
  c.n_r1 = geometry.N_r1;
  c.n_r2 = geometry.N_r2;
  return c;
}

DefaultLawParams Config::law_params() const {
  DefaultLawParams p;
  p.kappa1 = material.kappa1;
  p.kappa2 = material.kappa2;
  p.lm = material.lm;
  p.theta_m = material.theta_m;
  p.sigma = material.sigma;
  p.gamma0 = material.gamma0;
  p.d1 = material.d1;
  p.d2 = material.d2;
  p.d_exponent = material.d_exponent;
  p.theta_lo = material.theta_lo;
  p.theta_hi = material.theta_hi;
  return p;
}

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : Error([&] {
        std::ostringstream os;
        os << "invalid configuration:";
        for (const auto& i : issues) {
          os << "\n  " << i.key;
          if (i.line > 0) os << " (line " << i.line << ")";
          os << ": " << i.message;
        }
        return os.str();
      }()),
      issues_(std::move(issues)) {}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& e : registry()) keys.push_back(e.key);
  return keys;
}

Config parse_config(const std::string& text) {
  std::map<std::string, const Entry*> index;
  for (const auto& e : registry()) index[e.key] = &e;

  std::map<std::string, Raw> given;
  std::vector<ConfigIssue> issues;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back({"", lineno, "expected 'key = value'"});
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!index.count(key)) {
      issues.push_back({key, lineno, "unknown key"});
      continue;
    }
    if (given.count(key)) {
      issues.push_back({key, lineno, "duplicate key (first on line " + std::to_string(given[key].line) + ")"});
      continue;
    }
    if (value.empty()) {
      issues.push_back({key, lineno, "missing value"});
      continue;
    }
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    given[key] = {value, lineno};
  }

  Config c;
  for (const auto& e : registry()) {
    const int at = given.count(e.key) ? given.at(e.key).line : 0;
    if (e.kind == Kind::text) {
      e.set(c, 0.0, given.count(e.key) ? given.at(e.key).text : e.fallback);
      continue;
    }
    try {
      Evaluator ev(given, index);
      const double v = ev.value(e.key);
      if (!std::isfinite(v)) {
        issues.push_back({e.key, at, "value is not finite"});
        continue;
      }
      if (e.kind == Kind::integer) {
        if (std::abs(v - std::round(v)) > 1e-9 || std::abs(v) > 9.0e15) {
          issues.push_back({e.key, at, "type mismatch: expected an integer, got " + format_double(v)});
          continue;
        }
        if (e.key == "scenario.seed" && v < 0.0) {
          issues.push_back({e.key, at, "seed must be non-negative"});
          continue;
        }
      }
      e.set(c, v, "");
    } catch (const EvalFailure& f) {
      issues.push_back({e.key, at, "type mismatch or bad expression: " + f.message});
    }
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));

  Issues is(given);
  validate(c, is);
  if (!is.list.empty()) throw ConfigError(std::move(is.list));
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const Config& c) {
  std::ostringstream os;
  std::string section;
  for (const auto& e : registry()) {
    const std::string s = section_of(e.key);
    if (s != section) {
      if (!section.empty()) os << '\n';
      os << "# " << s << '\n';
      section = s;
    }
    os << e.key << " = " << e.get(c) << '\n';
  }
  return os.str();
}

}  // namespace stefan::app
