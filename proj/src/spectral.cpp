#include "stefan/spectral.hpp"

#include <unsupported/Eigen/FFT>

namespace stefan {

PeriodicSpectral::PeriodicSpectral(int n) : n_(n) {}

Eigen::VectorXd PeriodicSpectral::apply(const Eigen::VectorXd& u,
                                        const std::function<std::complex<double>(int)>& multiplier) const {
  Eigen::FFT<double> fft;
  Eigen::VectorXcd spec;
  Eigen::VectorXd in = u;
  fft.fwd(spec, in);
  for (int m = 0; m < n_; ++m) spec[m] *= multiplier(wavenumber(m));
  // Keep the Nyquist slot real so the inverse stays real.
  if (n_ % 2 == 0) spec[n_ / 2] = std::complex<double>(spec[n_ / 2].real(), 0.0);
  Eigen::VectorXcd back;
  fft.inv(back, spec);
  return back.real();
}

Eigen::VectorXd PeriodicSpectral::derivative(const Eigen::VectorXd& u, int order) const {
  if (order == 0) return u;
  const int nyq = n_ / 2;
  return apply(u, [&](int k) -> std::complex<double> {
    if (order % 2 == 1 && n_ % 2 == 0 && k == nyq) return 0.0;
    return std::pow(std::complex<double>(0.0, k), order);
  });
}

Eigen::MatrixXd PeriodicSpectral::derivative_matrix(int order) const {
  Eigen::MatrixXd D(n_, n_);
  for (int j = 0; j < n_; ++j) D.col(j) = derivative(Eigen::VectorXd::Unit(n_, j), order);
  return D;
}

Eigen::MatrixXd PeriodicSpectral::derivative_rows(const Eigen::MatrixXd& u, int order) const {
  Eigen::MatrixXd out(u.rows(), u.cols());
  for (Eigen::Index i = 0; i < u.rows(); ++i) out.row(i) = derivative(u.row(i).transpose(), order).transpose();
  return out;
}

}  // namespace stefan
