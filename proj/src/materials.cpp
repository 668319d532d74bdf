#include "stefan/materials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "stefan/errors.hpp"

namespace stefan {

namespace {

void require_positive_temperature(double theta) {
  if (!(theta > 0.0)) {
    std::ostringstream msg;
    msg << "temperature must be positive, got " << theta;
    throw DomainError(msg.str());
  }
}

}  // namespace

MaterialLaws::MaterialLaws(PhaseLaw inner, PhaseLaw outer, ScalarFn gamma, ScalarFn dgamma, double sigma,
                           double theta_lo, double theta_hi)
    : phase_{std::move(inner), std::move(outer)},
      gamma_(std::move(gamma)),
      dgamma_(std::move(dgamma)),
      sigma_(sigma),
      theta_lo_(theta_lo),
      theta_hi_(theta_hi) {
  if (!(sigma_ > 0.0)) throw LawError("sigma > 0 violated");
  if (!(theta_lo_ > 0.0 && theta_hi_ > theta_lo_)) throw LawError("working range needs 0 < theta_lo < theta_hi");
  constexpr int samples = 1024;
  for (int k = 0; k < samples; ++k) {
    const double th = theta_lo_ + (theta_hi_ - theta_lo_) * k / (samples - 1);
    for (int p = 0; p < 2; ++p) {
      if (!(heat_capacity(p, th) > 0.0)) {
        std::ostringstream msg;
        msg << "heat capacity of phase " << p + 1 << " not positive at theta=" << th;
        throw LawError(msg.str());
      }
      if (!(conductivity(p, th) > 0.0)) {
        std::ostringstream msg;
        msg << "conductivity of phase " << p + 1 << " not positive at theta=" << th;
        throw LawError(msg.str());
      }
    }
    if (gamma_ && !(gamma_(th) > 0.0)) {
      std::ostringstream msg;
      msg << "undercooling coefficient not positive at theta=" << th;
      throw LawError(msg.str());
    }
  }
}

double MaterialLaws::psi(int phase, double theta) const {
  require_positive_temperature(theta);
  return phase_[phase].psi(theta);
}
double MaterialLaws::dpsi(int phase, double theta) const {
  require_positive_temperature(theta);
  return phase_[phase].dpsi(theta);
}
double MaterialLaws::d2psi(int phase, double theta) const {
  require_positive_temperature(theta);
  return phase_[phase].d2psi(theta);
}
double MaterialLaws::d3psi(int phase, double theta) const {
  require_positive_temperature(theta);
  return phase_[phase].d3psi(theta);
}
double MaterialLaws::conductivity(int phase, double theta) const {
  require_positive_temperature(theta);
  return phase_[phase].d(theta);
}
double MaterialLaws::conductivity_derivative(int phase, double theta) const {
  require_positive_temperature(theta);
  return phase_[phase].dd(theta);
}

Thermo MaterialLaws::derived(double theta, int phase) const {
  require_positive_temperature(theta);
  const auto& law = phase_[phase];
  Thermo t;
  t.eta = -law.dpsi(theta);
  t.eps = law.psi(theta) + theta * t.eta;
  t.kappa = -theta * law.d2psi(theta);
  t.d = law.d(theta);
  return t;
}

double MaterialLaws::latent_heat(double theta) const {
  require_positive_temperature(theta);
  return theta * jump_dpsi(theta);
}

DefaultCoefficients default_coefficients(double kappa1, double kappa2, double lm, double theta_m) {
  const double jk = kappa2 - kappa1;
  DefaultCoefficients c;
  c.jump_A = lm / theta_m + jk * std::log(theta_m);
  c.jump_B = -jk * (theta_m - theta_m * std::log(theta_m)) - c.jump_A * theta_m;
  return c;
}

MaterialLaws default_laws(const DefaultLawParams& p) {
  if (!(p.kappa1 > 0.0 && p.kappa2 > 0.0 && p.lm > 0.0 && p.theta_m > 0.0))
    throw LawError("default laws need kappa1, kappa2, lm, theta_m > 0");
  const DefaultCoefficients c = default_coefficients(p.kappa1, p.kappa2, p.lm, p.theta_m);
  auto make = [&](double k, double A, double B, double d0) {
    PhaseLaw law;
    law.psi = [=](double th) { return k * (th - th * std::log(th)) + A * th + B; };
    law.dpsi = [=](double th) { return -k * std::log(th) + A; };
    law.d2psi = [=](double th) { return -k / th; };
    law.d3psi = [=](double th) { return k / (th * th); };
    const double q = p.d_exponent;
    if (q == 0.0) {
      law.d = [=](double) { return d0; };
      law.dd = [](double) { return 0.0; };
    } else {
      law.d = [=](double th) { return d0 * std::pow(th, q); };
      law.dd = [=](double th) { return d0 * q * std::pow(th, q - 1.0); };
    }
    return law;
  };
  ScalarFn gamma, dgamma;
  if (p.gamma0 != 0.0) {
    const double g = p.gamma0;
    gamma = [=](double) { return g; };
    dgamma = [](double) { return 0.0; };
  }
  return MaterialLaws(make(p.kappa1, 0.0, 0.0, p.d1), make(p.kappa2, c.jump_A, c.jump_B, p.d2), gamma, dgamma,
                      p.sigma, p.theta_lo, p.theta_hi);
}

MaterialLaws default_laws(double kappa1, double kappa2, double lm, double theta_m) {
  DefaultLawParams p;
  p.kappa1 = kappa1;
  p.kappa2 = kappa2;
  p.lm = lm;
  p.theta_m = theta_m;
  return default_laws(p);
}

double bracketed_root(const ScalarFn& f, const ScalarFn& df, double lo, double hi, double ftol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    std::ostringstream msg;
    msg << "no sign change on [" << lo << ", " << hi << "]";
    throw NotFoundError(msg.str());
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fx = f(x);
    if (fx == 0.0 || std::abs(fx) <= ftol) return x;
    if ((fx > 0.0) == (flo > 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) return x;
    double next = 0.5 * (lo + hi);
    if (df) {
      const double d = df(x);
      if (d != 0.0) {
        const double newton = x - fx / d;
        if (newton > lo && newton < hi) next = newton;
      }
    }
    if (next == x) return x;
    x = next;
  }
  return x;
}

double jump_psi_root(const MaterialLaws& laws, double target, double lo, double hi) {
  return bracketed_root([&](double th) { return laws.jump_psi(th) - target; },
                        [&](double th) { return laws.jump_dpsi(th); }, lo, hi);
}

double melting_temperature(const MaterialLaws& laws, double lo, double hi) {
  return jump_psi_root(laws, 0.0, lo, hi);
}

double melting_temperature(const MaterialLaws& laws) {
  return melting_temperature(laws, laws.theta_lo(), laws.theta_hi());
}

}  // namespace stefan
