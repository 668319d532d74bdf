#pragma once

#include <Eigen/Core>
#include <complex>
#include <string>
#include <vector>

namespace stefan {

using cplx = std::complex<double>;

// Constant coefficients of the half-space model problem linearized at the interface.
struct FrozenCoefficients {
  int m = 1;
  Eigen::MatrixXd P;   // (m+1) x (m+1), last row/column is the normal direction
  Eigen::MatrixXd S;   // m x m
  Eigen::VectorXd a0;  // m
  double kappa0 = 1.0;
  double d0 = 1.0;
  double l0 = 1.0;
  double l2 = 1.0;

  static FrozenCoefficients isotropic(int m = 1);
  // Throws DomainError naming the first violated invariant.
  void validate() const;
};

// Decaying bulk exponent: v(y) = exp(-mu y) v(0) with Re mu > 0.
cplx stable_root(const FrozenCoefficients& c, const Eigen::VectorXd& xi, cplx lambda);

// Principal-part exponent sqrt(kappa0 lambda / P_{m+1}) used by the asymptotic systems.
cplx principal_root(const FrozenCoefficients& c, cplx lambda);

cplx ls_determinant(const FrozenCoefficients& c, const Eigen::VectorXd& xi, cplx lambda);

enum class LsVariant {
  ls,                  // full system with latent and transport rows
  inf_transport,       // full bulk operator, flux plus transport row without l0 lambda
  inf_latent,          // principal bulk, l0 lambda delta row oriented as in the full system
  inf_flux,            // principal bulk, pure flux row
  inf_latent_as_shown  // principal bulk, l0 lambda delta + d0 dy v(0) taken literally
};

std::string variant_name(LsVariant v);
cplx variant_determinant(const FrozenCoefficients& c, LsVariant v, const Eigen::VectorXd& xi, cplx lambda);
// |det| divided by the sum of the moduli of its terms; scale free, 1 means no cancellation.
double normalized_determinant(const FrozenCoefficients& c, LsVariant v, const Eigen::VectorXd& xi, cplx lambda);

struct ScanGrid {
  std::vector<double> radii{0.5, 1.0, 2.0};
  int directions = 64;
  double lambda_min = 1e-3;
  double lambda_max = 1e3;
  int n_modulus = 61;
  int n_phase = 41;

  std::vector<Eigen::VectorXd> xi_directions(int m) const;
  std::vector<cplx> lambdas() const;
};

struct VariantResult {
  LsVariant variant = LsVariant::ls;
  double min_abs = 0.0;
  double min_normalized = 0.0;
  Eigen::VectorXd argmin_xi;
  cplx argmin_lambda;
  long samples = 0;
};

struct ScanReport {
  // Certificate variants: ls, inf_transport, inf_latent, inf_flux.
  std::vector<VariantResult> variants;
  // Literal reading of the second asymptotic system, reported next to the certificate.
  VariantResult latent_as_shown;
  double min_abs = 0.0;
  double min_normalized = 0.0;
  double min_re_mu = 0.0;

  const VariantResult& find(LsVariant v) const;
};

// Scans (LS) on every radius and the asymptotic systems on |xi| = 1.
ScanReport scan(const FrozenCoefficients& c, const ScanGrid& grid = {}, bool check_invariants = true);

struct AxisZero {
  bool found = false;
  double lambda = 0.0;
  double abs_det = 0.0;
};

// Bisection for a sign change of the (real) determinant on lambda in [lo, hi], log-spaced bracketing.
AxisZero locate_real_axis_zero(const FrozenCoefficients& c, LsVariant v, const Eigen::VectorXd& xi, double lo,
                               double hi);

}  // namespace stefan
