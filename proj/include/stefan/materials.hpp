#pragma once

#include <functional>

namespace stefan {

using ScalarFn = std::function<double(double)>;

// Free energy psi with three derivatives plus a conductivity law d with its derivative.
struct PhaseLaw {
  ScalarFn psi, dpsi, d2psi, d3psi;
  ScalarFn d, dd;
};

struct Thermo {
  double kappa = 0.0;
  double eta = 0.0;
  double eps = 0.0;
  double d = 0.0;
};

class MaterialLaws {
 public:
  // An empty gamma means gamma is identically zero.
  MaterialLaws(PhaseLaw inner, PhaseLaw outer, ScalarFn gamma, ScalarFn dgamma, double sigma, double theta_lo,
               double theta_hi);

  // phase is 0 (inside Sigma) or 1 (outside).
  double psi(int phase, double theta) const;
  double dpsi(int phase, double theta) const;
  double d2psi(int phase, double theta) const;
  double d3psi(int phase, double theta) const;
  double conductivity(int phase, double theta) const;
  double conductivity_derivative(int phase, double theta) const;
  double heat_capacity(int phase, double theta) const { return -theta * d2psi(phase, theta); }
  double energy(int phase, double theta) const { return psi(phase, theta) - theta * dpsi(phase, theta); }
  double entropy(int phase, double theta) const { return -dpsi(phase, theta); }

  Thermo derived(double theta, int phase) const;

  // Jumps are outer minus inner.
  double jump_psi(double theta) const { return psi(1, theta) - psi(0, theta); }
  double jump_dpsi(double theta) const { return dpsi(1, theta) - dpsi(0, theta); }
  double latent_heat(double theta) const;

  bool has_undercooling() const { return static_cast<bool>(gamma_); }
  double gamma(double theta) const { return gamma_ ? gamma_(theta) : 0.0; }
  double gamma_derivative(double theta) const { return dgamma_ ? dgamma_(theta) : 0.0; }
  double sigma() const { return sigma_; }
  double theta_lo() const { return theta_lo_; }
  double theta_hi() const { return theta_hi_; }

 private:
  PhaseLaw phase_[2];
  ScalarFn gamma_, dgamma_;
  double sigma_;
  double theta_lo_, theta_hi_;
};

struct DefaultLawParams {
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double lm = 1.0;
  double theta_m = 1.0;
  double sigma = 1.0;
  double gamma0 = 0.0;
  double d1 = 1.0;
  double d2 = 1.0;
  // d_i(theta) = d_i * theta^p; p = 0 gives constant conductivities.
  double d_exponent = 0.0;
  double theta_lo = 0.5;
  double theta_hi = 2.0;
};

// psi_i = kappa_i (theta - theta log theta) + A_i theta + B_i with A_1 = B_1 = 0.
MaterialLaws default_laws(const DefaultLawParams& p);
MaterialLaws default_laws(double kappa1, double kappa2, double lm, double theta_m);

struct DefaultCoefficients {
  double jump_A = 0.0;
  double jump_B = 0.0;
};
DefaultCoefficients default_coefficients(double kappa1, double kappa2, double lm, double theta_m);

// Safeguarded Newton/bisection on a sign-changing bracket. Throws NotFoundError otherwise.
double bracketed_root(const ScalarFn& f, const ScalarFn& df, double lo, double hi, double ftol = 0.0);

double melting_temperature(const MaterialLaws& laws, double lo, double hi);
double melting_temperature(const MaterialLaws& laws);

// Root of [[psi(theta)]] = target, e.g. target = sigma / R for a circle of radius R.
double jump_psi_root(const MaterialLaws& laws, double target, double lo, double hi);

}  // namespace stefan
