#pragma once

#include <Eigen/Core>
#include <complex>
#include <functional>

namespace stefan {

// Trigonometric differentiation and filtering of periodic samples on [0, 2 pi).
class PeriodicSpectral {
 public:
  explicit PeriodicSpectral(int n);

  int size() const { return n_; }
  // Signed wavenumber of FFT slot m; the Nyquist slot reports +n/2.
  int wavenumber(int m) const { return m <= n_ / 2 ? m : m - n_; }

  Eigen::VectorXd derivative(const Eigen::VectorXd& u, int order) const;
  // Multiplies mode k by multiplier(k); odd-symmetric multipliers should vanish at Nyquist.
  Eigen::VectorXd apply(const Eigen::VectorXd& u, const std::function<std::complex<double>(int)>& multiplier) const;
  Eigen::MatrixXd derivative_matrix(int order) const;
  // Applies derivative(., order) to each row of a matrix (rows are periodic in s).
  Eigen::MatrixXd derivative_rows(const Eigen::MatrixXd& u, int order) const;

 private:
  int n_;
};

}  // namespace stefan
