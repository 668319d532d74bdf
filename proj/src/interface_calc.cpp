#include "stefan/interface_calc.hpp"

#include <numbers>
#include <sstream>

#include "stefan/errors.hpp"
#include "stefan/spectral.hpp"

namespace stefan {

HeightField::HeightField(Eigen::VectorXd values, double R0) : values_(std::move(values)), R0_(R0) {
  PeriodicSpectral sp(size());
  ds_ = sp.derivative(values_, 1);
  dss_ = sp.derivative(values_, 2);
}

SurfaceDerivatives surface_derivatives(const HeightField& h) {
  return {h.ds() / h.R0(), h.dss() / (h.R0() * h.R0())};
}

Eigen::VectorXd surface_laplacian(const Eigen::VectorXd& u, double R0) {
  return PeriodicSpectral(static_cast<int>(u.size())).derivative(u, 2) / (R0 * R0);
}

Eigen::VectorXd surface_gradient(const Eigen::VectorXd& u, double R0) {
  return PeriodicSpectral(static_cast<int>(u.size())).derivative(u, 1) / R0;
}

double m0(double h, double R0) {
  const double q = 1.0 + h / R0;
  if (!(q > 0.0)) {
    std::ostringstream msg;
    msg << "1 + h/R0 = " << q << " is not positive";
    throw SingularGeometryError(msg.str());
  }
  return 1.0 / q;
}

Eigen::VectorXd alpha(const HeightField& h) {
  Eigen::VectorXd out(h.size());
  for (int j = 0; j < h.size(); ++j) out[j] = h.ds()[j] / h.R0() * m0(h[j], h.R0());
  return out;
}

Eigen::VectorXd beta(const HeightField& h) {
  const Eigen::VectorXd al = alpha(h);
  return al.unaryExpr([](double x) { return beta_from_alpha(x); });
}

Eigen::Matrix2Xd normal(const HeightField& h) {
  const Eigen::VectorXd al = alpha(h);
  Eigen::Matrix2Xd nu(2, h.size());
  const double ds = 2.0 * std::numbers::pi / h.size();
  for (int j = 0; j < h.size(); ++j) {
    const double s = ds * j;
    const Eigen::Vector2d rhat(std::cos(s), std::sin(s));
    const Eigen::Vector2d shat(-std::sin(s), std::cos(s));
    nu.col(j) = beta_from_alpha(al[j]) * (rhat - al[j] * shat);
  }
  return nu;
}

Eigen::VectorXd mean_curvature(const HeightField& h) {
  Eigen::VectorXd out(h.size());
  for (int j = 0; j < h.size(); ++j) out[j] = polar_curvature(h.R0() + h[j], h.ds()[j], h.dss()[j]);
  return out;
}

Eigen::VectorXd surface_semigroup(const Eigen::VectorXd& u0, double t, double R0) {
  if (t < 0.0) throw DomainError("surface semigroup needs t >= 0");
  if (t == 0.0) return u0;
  const double c = t / (R0 * R0);
  return PeriodicSpectral(static_cast<int>(u0.size())).apply(u0, [c](int k) {
    return std::complex<double>(std::exp(-c * k * k), 0.0);
  });
}

double interface_length(const HeightField& h) {
  double sum = 0.0;
  for (int j = 0; j < h.size(); ++j) {
    const double R = h.R0() + h[j];
    sum += std::sqrt(R * R + h.ds()[j] * h.ds()[j]);
  }
  return sum * 2.0 * std::numbers::pi / h.size();
}

void check_height_invariants(const HeightField& h, double a) {
  for (int j = 0; j < h.size(); ++j) {
    if (!(1.0 + h[j] / h.R0() > 0.0)) throw SingularGeometryError("1 + h/R0 <= 0 on the interface");
    if (!(std::abs(h[j]) < a / 3.0)) {
      std::ostringstream msg;
      msg << "height cap exceeded: |h| = " << std::abs(h[j]) << " >= a/3 = " << a / 3.0 << " at node " << j;
      throw HaltError(msg.str());
    }
  }
}

}  // namespace stefan
