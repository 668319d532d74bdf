#pragma once

#include <Eigen/Core>
#include <cmath>

namespace stefan {

// Periodic samples h(s_j), s_j = 2 pi j / N, with s-derivatives cached at construction.
class HeightField {
 public:
  HeightField() = default;
  HeightField(Eigen::VectorXd values, double R0);

  static HeightField constant(int n, double c, double R0) { return {Eigen::VectorXd::Constant(n, c), R0}; }

  const Eigen::VectorXd& values() const { return values_; }
  double R0() const { return R0_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int j) const { return values_[j]; }
  const Eigen::VectorXd& ds() const { return ds_; }
  const Eigen::VectorXd& dss() const { return dss_; }

 private:
  Eigen::VectorXd values_;
  Eigen::VectorXd ds_;
  Eigen::VectorXd dss_;
  double R0_ = 1.0;
};

struct SurfaceDerivatives {
  Eigen::VectorXd h_sigma;
  Eigen::VectorXd h_sigmasigma;
};

SurfaceDerivatives surface_derivatives(const HeightField& h);

// Laplace-Beltrami on the reference circle, spectral.
Eigen::VectorXd surface_laplacian(const Eigen::VectorXd& u, double R0);
Eigen::VectorXd surface_gradient(const Eigen::VectorXd& u, double R0);

double m0(double h, double R0);

template <typename Scalar>
Scalar alpha_pointwise(Scalar h, Scalar h_sigma, Scalar R0) {
  return h_sigma / (Scalar(1) + h / R0);
}

template <typename Scalar>
Scalar beta_from_alpha(Scalar alpha) {
  using std::sqrt;
  return Scalar(1) / sqrt(Scalar(1) + alpha * alpha);
}

// R = R0 + h; derivatives with respect to the angle s.
template <typename Scalar>
Scalar polar_curvature(Scalar R, Scalar Rs, Scalar Rss) {
  using std::pow;
  const Scalar q = R * R + Rs * Rs;
  return -(R * R + Scalar(2) * Rs * Rs - R * Rss) / pow(q, Scalar(1.5));
}

Eigen::VectorXd alpha(const HeightField& h);
Eigen::VectorXd beta(const HeightField& h);
// Columns are Cartesian unit normals at s_j.
Eigen::Matrix2Xd normal(const HeightField& h);
Eigen::VectorXd mean_curvature(const HeightField& h);
Eigen::VectorXd surface_semigroup(const Eigen::VectorXd& u0, double t, double R0);

// Length of the polar graph R = R0 + h by the periodic trapezoidal rule.
double interface_length(const HeightField& h);

// sup|h| < a/3 and 1 + h/R0 > 0; throws HaltError / SingularGeometryError.
void check_height_invariants(const HeightField& h, double a);

}  // namespace stefan
