#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "stefan/errors.hpp"
#include "stefan/interface_calc.hpp"

using namespace stefan;
using std::numbers::pi;

namespace {

Eigen::VectorXd sample(int n, const std::function<double(double)>& f) {
  Eigen::VectorXd v(n);
  for (int j = 0; j < n; ++j) v[j] = f(2 * pi * j / n);
  return v;
}

Eigen::VectorXd random_smooth(int n, std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<double, 8> c, d;
  for (auto& x : c) x = u(rng);
  for (auto& x : d) x = u(rng);
  return sample(n, [&](double s) {
    double v = 0.0;
    for (int k = 0; k < 4; ++k) v += amp * (c[k] * std::cos(k * s) + d[k] * std::sin(k * s)) / (1.0 + k * k);
    return v;
  });
}

}  // namespace

TEST(SurfaceDerivatives, Examples) {
  const int n = 64;
  const double R0 = 1.7, eps = 0.05;
  const SurfaceDerivatives c = surface_derivatives(HeightField::constant(n, 0.3, R0));
  EXPECT_LE(c.h_sigma.cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE(c.h_sigmasigma.cwiseAbs().maxCoeff(), 1e-14);
  const SurfaceDerivatives d = surface_derivatives({sample(n, [&](double s) { return eps * std::sin(s); }), R0});
  EXPECT_LE((d.h_sigma - sample(n, [&](double s) { return eps / R0 * std::cos(s); })).cwiseAbs().maxCoeff(), 1e-12);
  for (int k = 1; k < 10; ++k) {
    const Eigen::VectorXd u = sample(n, [&](double s) { return std::sin(k * s); });
    EXPECT_LE((surface_laplacian(u, R0) + (k / R0) * (k / R0) * u).cwiseAbs().maxCoeff(), 1e-11);
  }
}

TEST(M0, Examples) {
  EXPECT_EQ(m0(0.0, 1.3), 1.0);
  EXPECT_DOUBLE_EQ(m0(1.3, 1.3), 0.5);
  EXPECT_THROW(m0(-1.3, 1.3), SingularGeometryError);
  EXPECT_THROW(m0(-1.31, 1.3), SingularGeometryError);
  EXPECT_NO_THROW(m0(-1.29, 1.3));
}

TEST(Alpha, Examples) {
  const int n = 64;
  const double R0 = 1.2, eps = 0.07;
  EXPECT_LE(alpha(HeightField::constant(n, 0.1, R0)).cwiseAbs().maxCoeff(), 1e-15);
  const Eigen::VectorXd a = alpha({sample(n, [&](double s) { return eps * std::sin(s); }), R0});
  const Eigen::VectorXd ex = sample(n, [&](double s) { return eps * std::cos(s) / (R0 + eps * std::sin(s)); });
  EXPECT_LE((a - ex).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Beta, ExamplesAndIdentity) {
  const int n = 64;
  const double R0 = 1.0, eps = 0.1;
  EXPECT_LE((beta(HeightField::constant(n, 0.2, R0)).array() - 1.0).abs().maxCoeff(), 1e-15);
  const HeightField h(sample(n, [&](double s) { return eps * std::sin(s); }), R0);
  EXPECT_NEAR(beta(h)[0], std::pow(1.0 + (eps / R0) * (eps / R0), -0.5), 1e-13);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const HeightField g(random_smooth(n, rng, 0.1), R0);
    const Eigen::VectorXd b = beta(g), al = alpha(g);
    for (int j = 0; j < n; ++j) {
      EXPECT_LE(b[j], 1.0);
      EXPECT_NEAR(b[j] * b[j] * (1 + al[j] * al[j]), 1.0, 1e-12);
    }
  }
}

TEST(Normal, PolarGraphAndSymmetry) {
  const int n = 64;
  const double R0 = 0.9, eps = 0.08;
  const Eigen::Matrix2Xd n0 = normal(HeightField::constant(n, 0.0, R0));
  for (int j = 0; j < n; ++j) {
    EXPECT_NEAR(n0(0, j), std::cos(2 * pi * j / n), 1e-15);
    EXPECT_NEAR(n0(1, j), std::sin(2 * pi * j / n), 1e-15);
  }
  const HeightField h(sample(n, [&](double s) { return eps * std::sin(s); }), R0);
  const Eigen::Matrix2Xd nu = normal(h);
  for (int j = 0; j < n; ++j) {
    const double s = 2 * pi * j / n, R = R0 + eps * std::sin(s), Rp = eps * std::cos(s);
    const Eigen::Vector2d rh(std::cos(s), std::sin(s)), sh(-std::sin(s), std::cos(s));
    const Eigen::Vector2d ex = (R * rh - Rp * sh) / std::sqrt(R * R + Rp * Rp);
    EXPECT_LE((nu.col(j) - ex).norm(), 1e-12);
    EXPECT_NEAR(nu.col(j).norm(), 1.0, 1e-12);
  }
  std::mt19937_64 rng(9);
  const Eigen::VectorXd v = random_smooth(n, rng, 0.1);
  Eigen::VectorXd refl(n);
  for (int j = 0; j < n; ++j) refl[j] = v[(n - j) % n];
  const Eigen::Matrix2Xd a = normal({v, R0}), b = normal({refl, R0});
  for (int j = 0; j < n; ++j) {
    const int m = (n - j) % n;
    EXPECT_NEAR(b(0, j), a(0, m), 1e-12);
    EXPECT_NEAR(b(1, j), -a(1, m), 1e-12);
  }
}

TEST(MeanCurvature, Circles) {
  for (double R0 : {0.5, 1.0, 2.0}) {
    const Eigen::VectorXd H = mean_curvature(HeightField::constant(64, 0.0, R0));
    EXPECT_LE((H.array() + 1.0 / R0).abs().maxCoeff(), 1e-12);
    const Eigen::VectorXd Hc = mean_curvature(HeightField::constant(64, 0.1 * R0, R0));
    EXPECT_LE((Hc.array() + 1.0 / (1.1 * R0)).abs().maxCoeff(), 1e-12);
  }
}

TEST(MeanCurvature, Linearization) {
  const int n = 64;
  const double R0 = 1.4;
  const Eigen::VectorXd H0 = mean_curvature(HeightField::constant(n, 0.0, R0));
  for (int k : {1, 2, 5}) {
    const Eigen::VectorXd phi = sample(n, [&](double s) { return std::sin(k * s); });
    const Eigen::VectorXd lin = (1.0 - k * k) / (R0 * R0) * phi;
    double prev = 0.0;
    for (double eps : {1e-3, 5e-4}) {
      const Eigen::VectorXd q = (mean_curvature({eps * phi, R0}) - H0) / eps;
      const double err = (q - lin).cwiseAbs().maxCoeff();
      EXPECT_LE(err, 50 * eps * k * k);
      if (prev > 0) EXPECT_NEAR(prev / err, 2.0, 0.2);
      prev = err;
    }
  }
}

TEST(MeanCurvature, AgreesWithParametricFiniteDifferences) {
  const double R0 = 1.0;
  auto h_of = [](double s) { return 0.05 * std::cos(2 * s) + 0.03 * std::sin(3 * s); };
  std::vector<double> errs;
  for (int n : {64, 128, 256}) {
    const Eigen::VectorXd hv = sample(n, h_of);
    const Eigen::VectorXd H = mean_curvature({hv, R0});
    double err = 0.0;
    const double ds = 2 * pi / n;
    for (int j = 0; j < n; ++j) {
      auto X = [&](int m) {
        m = (m + n) % n;
        const double s = 2 * pi * m / n;
        return Eigen::Vector2d((R0 + hv[m]) * std::cos(s), (R0 + hv[m]) * std::sin(s));
      };
      const Eigen::Vector2d d1 = (X(j + 1) - X(j - 1)) / (2 * ds);
      const Eigen::Vector2d d2 = (X(j + 1) - 2 * X(j) + X(j - 1)) / (ds * ds);
      const double kappa = (d1.x() * d2.y() - d1.y() * d2.x()) / std::pow(d1.squaredNorm(), 1.5);
      err = std::max(err, std::abs(H[j] + kappa));
    }
    errs.push_back(err);
  }
  EXPECT_GE(std::log2(errs[0] / errs[1]), 1.9);
  EXPECT_GE(std::log2(errs[1] / errs[2]), 1.9);
}

TEST(MeanCurvature, RotationEquivariance) {
  const int n = 64;
  std::mt19937_64 rng(21);
  const Eigen::VectorXd v = random_smooth(n, rng, 0.1);
  const Eigen::VectorXd H = mean_curvature({v, 1.0});
  Eigen::Index imax, imin;
  H.maxCoeff(&imax);
  H.minCoeff(&imin);
  for (int shift : {1, 7, 31}) {
    Eigen::VectorXd r(n);
    for (int j = 0; j < n; ++j) r[j] = v[(j + n - shift) % n];
    const Eigen::VectorXd Hr = mean_curvature({r, 1.0});
    Eigen::Index jmax, jmin;
    Hr.maxCoeff(&jmax);
    Hr.minCoeff(&jmin);
    EXPECT_EQ(jmax, (imax + shift) % n);
    EXPECT_EQ(jmin, (imin + shift) % n);
  }
}

TEST(Semigroup, Examples) {
  const int n = 64;
  const Eigen::VectorXd u = sample(n, [](double s) { return std::cos(s) + 0.3 * std::sin(5 * s); });
  EXPECT_EQ(surface_semigroup(u, 0.0, 1.0), u);
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(n, 1.7);
  EXPECT_LE((surface_semigroup(c, 3.0, 1.0) - c).cwiseAbs().maxCoeff(), 1e-14);
  const Eigen::VectorXd s3 = sample(n, [](double s) { return std::sin(3 * s); });
  EXPECT_LE((surface_semigroup(s3, 0.1, 1.0) - std::exp(-0.9) * s3).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(surface_semigroup(u, -0.1, 1.0), DomainError);
}

TEST(Semigroup, Law) {
  std::mt19937_64 rng(8);
  const Eigen::VectorXd u = random_smooth(64, rng, 1.0);
  const Eigen::VectorXd a = surface_semigroup(surface_semigroup(u, 0.03, 1.3), 0.05, 1.3);
  EXPECT_LE((a - surface_semigroup(u, 0.08, 1.3)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(InterfaceLength, CircleAndCap) {
  EXPECT_NEAR(interface_length(HeightField::constant(64, 0.0, 1.5)), 2 * pi * 1.5, 1e-13);
  EXPECT_NO_THROW(check_height_invariants(HeightField::constant(16, 0.16, 1.0), 0.5));
  EXPECT_THROW(check_height_invariants(HeightField::constant(16, 0.17, 1.0), 0.5), HaltError);
}
