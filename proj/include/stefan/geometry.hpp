#pragma once

#include <Eigen/Core>
#include <cmath>
#include <numbers>

namespace stefan {

struct TubularChart {
  double R0 = 1.0;
  double a = 0.5;
  double R_in = 0.25;
  double R_out = 2.0;
  int n_s = 64;
  int n_r1 = 32;
  int n_r2 = 32;

  // a = R0/2, R_in = R0/4, R_out = 2 R0.
  static TubularChart with_defaults(double R0, int n_s = 64, int n_r1 = 32, int n_r2 = 32);

  void validate() const;

  int n_radial() const { return n_r1 + n_r2 + 1; }
  int interface_row() const { return n_r1; }
  double dr1() const { return (R0 - R_in) / n_r1; }
  double dr2() const { return (R_out - R0) / n_r2; }
  double ds() const { return 2.0 * std::numbers::pi / n_s; }
  // Radius of global radial row i, 0 <= i < n_radial().
  double rho(int i) const;
  double angle(int j) const { return ds() * j; }
  // 0 for rows of the inner block (interface row included), 1 for the outer block.
  int block_of_row(int i) const { return i <= n_r1 ? 0 : 1; }
};

struct TubularCoords {
  double s = 0.0;
  double r = 0.0;
};

TubularCoords project_and_distance(const TubularChart& chart, const Eigen::Vector2d& z);

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> extend_unchecked(Scalar R0, Scalar s, Scalar r) {
  using std::cos;
  using std::sin;
  Eigen::Matrix<Scalar, 2, 1> p;
  p << (R0 + r) * cos(s), (R0 + r) * sin(s);
  return p;
}

Eigen::Vector2d extend(const TubularChart& chart, double s, double r);

// True when |r| >= a, i.e. outside the tubular neighbourhood.
inline bool outside_tube(const TubularChart& chart, double r) { return std::abs(r) >= chart.a; }

template <typename Scalar>
Scalar bump_e(Scalar x) {
  using std::exp;
  return x > Scalar(0) ? exp(Scalar(-1) / x) : Scalar(0);
}

// C-infinity step: 0 for t <= 0, 1 for t >= 1.
template <typename Scalar>
Scalar smoothstep(Scalar t) {
  if (t <= Scalar(0)) return Scalar(0);
  if (t >= Scalar(1)) return Scalar(1);
  const Scalar e0 = bump_e(t);
  const Scalar e1 = bump_e(Scalar(1) - t);
  return e0 / (e0 + e1);
}

template <typename Scalar>
Scalar smoothstep_derivative(Scalar t) {
  if (t <= Scalar(0) || t >= Scalar(1)) return Scalar(0);
  const Scalar s = smoothstep(t);
  const Scalar u = Scalar(1) - t;
  return s * (Scalar(1) - s) * (Scalar(1) / (t * t) + Scalar(1) / (u * u));
}

template <typename Scalar>
Scalar smoothstep_second_derivative(Scalar t) {
  if (t <= Scalar(0) || t >= Scalar(1)) return Scalar(0);
  const Scalar s = smoothstep(t);
  const Scalar u = Scalar(1) - t;
  const Scalar q = Scalar(1) / (t * t) + Scalar(1) / (u * u);
  const Scalar dq = Scalar(-2) / (t * t * t) + Scalar(2) / (u * u * u);
  const Scalar ds = s * (Scalar(1) - s) * q;
  return ds * (Scalar(1) - Scalar(2) * s) * q + s * (Scalar(1) - s) * dq;
}

enum class CutoffKind { zeta, chi_m, chi, varpi, xi_time, varsigma };

// Radial bump: 1 on |x - center| <= plateau, 0 on |x - center| >= support.
struct CutoffProfile {
  CutoffKind kind = CutoffKind::zeta;
  double center = 0.0;
  double plateau = 0.0;
  double support = 1.0;

  static CutoffProfile zeta(double a) { return {CutoffKind::zeta, 0.0, a / 3.0, 2.0 * a / 3.0}; }
  static CutoffProfile varpi(double a) { return {CutoffKind::varpi, 0.0, 2.0 * a / 3.0, 13.0 * a / 18.0}; }
  static CutoffProfile chi_m(double x_c, double eps0) { return {CutoffKind::chi_m, x_c, eps0, 2.0 * eps0}; }
  static CutoffProfile chi(double y_c, double eps0) { return {CutoffKind::chi, y_c, eps0, 2.0 * eps0}; }
  static CutoffProfile xi_time(double t_c, double eps0) { return {CutoffKind::xi_time, t_c, eps0, 2.0 * eps0}; }
  // One factor of the tensor-product cutoff on the box B_{5 eps0, 17a/18}.
  static CutoffProfile varsigma_x(double x_c, double eps0) {
    return {CutoffKind::varsigma, x_c, 4.0 * eps0, 5.0 * eps0};
  }
  static CutoffProfile varsigma_y(double a) { return {CutoffKind::varsigma, 0.0, 8.0 * a / 9.0, 17.0 * a / 18.0}; }

  template <typename Scalar>
  Scalar value(Scalar x) const {
    using std::abs;
    const Scalar d = abs(x - Scalar(center));
    return smoothstep((Scalar(support) - d) / Scalar(support - plateau));
  }

  double derivative(double x) const;
  double second_derivative(double x) const;
};

double cutoff(const CutoffProfile& profile, double x);

}  // namespace stefan
