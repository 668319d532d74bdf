#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "stefan/errors.hpp"
#include "stefan/ls_checker.hpp"

using namespace stefan;

namespace {

Eigen::VectorXd e1() { return Eigen::VectorXd::Constant(1, 1.0); }

FrozenCoefficients anisotropic() {
  FrozenCoefficients c = FrozenCoefficients::isotropic(1);
  c.P << 2.0, 0.6, 0.6, 1.5;
  c.S << 0.8;
  c.a0 << 0.7;
  c.kappa0 = 1.3;
  c.d0 = 0.9;
  c.l0 = 2.0;
  c.l2 = 0.4;
  return c;
}

}  // namespace

TEST(StableRoot, IsotropicExamples) {
  const FrozenCoefficients c = FrozenCoefficients::isotropic();
  EXPECT_NEAR(std::abs(stable_root(c, e1(), 1.0) - std::sqrt(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(stable_root(c, Eigen::VectorXd::Zero(1), 1.0) - 1.0), 0.0, 1e-15);
}

TEST(StableRoot, MixedEntryShiftsImaginaryPart) {
  const FrozenCoefficients c = anisotropic();
  for (double x : {0.5, -1.0, 2.0}) {
    const Eigen::VectorXd xi = Eigen::VectorXd::Constant(1, x);
    const cplx mu = stable_root(c, xi, 0.7);
    // Decaying convention: the imaginary part is -P_m.xi / P_{m+1}.
    EXPECT_DOUBLE_EQ(mu.imag(), -0.6 * x / 1.5);
  }
}

TEST(StableRoot, SolvesCharacteristicEquationAndDecays) {
  const FrozenCoefficients c = anisotropic();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-2.0, 2.0), V(0.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const Eigen::VectorXd xi = Eigen::VectorXd::Constant(1, U(rng));
    const cplx lam(V(rng), U(rng));
    const cplx mu = stable_root(c, xi, lam);
    // v = exp(-mu y) in (kappa lambda + P(xi) + 2 i P_m xi dy - P_n dy^2) v = 0.
    const double x = xi[0];
    const cplx res = c.kappa0 * lam + 2.0 * x * x - 2.0 * cplx(0, 1) * 0.6 * x * mu - 1.5 * mu * mu;
    EXPECT_LT(std::abs(res), 1e-12 * (1.0 + std::abs(lam)));
    EXPECT_GT(mu.real(), 0.0);
  }
}

TEST(StableRoot, RejectsDegenerateAndLeftHalfPlane) {
  const FrozenCoefficients c = FrozenCoefficients::isotropic();
  EXPECT_THROW(stable_root(c, Eigen::VectorXd::Zero(1), 0.0), DomainError);
  EXPECT_THROW(stable_root(c, e1(), cplx(-0.5, 0.0)), DomainError);
}

TEST(LsDeterminant, IsotropicExamplesUnderDecayConvention) {
  const FrozenCoefficients c = FrozenCoefficients::isotropic();
  EXPECT_NEAR(std::abs(ls_determinant(c, e1(), 1.0) - (std::sqrt(2.0) + 1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(ls_determinant(c, Eigen::VectorXd::Zero(1), 1.0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(ls_determinant(c, e1(), 0.0) - 1.0), 0.0, 1e-15);
}

TEST(LsDeterminant, EqualsDeterminantOfBoundaryRows) {
  // Rows for (v(0), delta) after inserting dy v(0) = -mu v(0):
  //   l2 v - S delta = 0,   l0 lambda delta - (i a0.xi - d0 mu) v = 0.
  const FrozenCoefficients c = anisotropic();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-2.0, 2.0), V(0.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd xi = Eigen::VectorXd::Constant(1, U(rng));
    const cplx lam(V(rng), U(rng));
    const cplx mu = stable_root(c, xi, lam);
    const double S = xi.dot(c.S * xi), ax = c.a0.dot(xi);
    Eigen::Matrix2cd B;
    B << c.l2, -S, -(cplx(0, ax) - c.d0 * mu), c.l0 * lam;
    EXPECT_LT(std::abs(B.determinant() - ls_determinant(c, xi, lam)), 1e-12 * (1.0 + std::abs(B.determinant())));
  }
}

TEST(LsDeterminant, HomogeneousUnderCoefficientScaling) {
  const FrozenCoefficients c = anisotropic();
  FrozenCoefficients s = c;
  s.d0 *= 10.0;
  s.S *= 10.0;
  s.a0 *= 10.0;
  s.l2 *= 100.0;
  for (double lam : {0.1, 1.0, 7.0}) {
    const Eigen::VectorXd xi = Eigen::VectorXd::Constant(1, 0.8);
    EXPECT_NEAR(std::abs(ls_determinant(s, xi, lam)), 100.0 * std::abs(ls_determinant(c, xi, lam)),
                1e-12 * std::abs(ls_determinant(s, xi, lam)));
  }
}

TEST(Scan, IsotropicCertificate) {
  const ScanReport rep = scan(FrozenCoefficients::isotropic());
  EXPECT_GT(rep.min_re_mu, 0.0);
  EXPECT_GE(rep.min_normalized, 0.4);
  for (const auto& v : rep.variants) EXPECT_GT(v.min_abs, 0.0) << variant_name(v.variant);
  // Raw minimum of the full system sits at the smallest sphere and modulus: S mu + lambda.
  const VariantResult& ls = rep.find(LsVariant::ls);
  EXPECT_DOUBLE_EQ(std::abs(ls.argmin_xi[0]), 0.5);
  EXPECT_NEAR(std::abs(ls.argmin_lambda), 1e-3, 1e-15);
  EXPECT_EQ(ls.samples, 3L * 2 * 61 * 41);
  EXPECT_EQ(rep.find(LsVariant::inf_flux).samples, 2L * 61 * 41);
}

TEST(Scan, RefinementChangesMinimumByLessThanFivePercent) {
  const FrozenCoefficients c = anisotropic();
  const ScanReport coarse = scan(c);
  ScanGrid fine;
  fine.n_modulus = 121;
  fine.n_phase = 81;
  const ScanReport refined = scan(c, fine);
  for (std::size_t k = 0; k < coarse.variants.size(); ++k) {
    const double a = coarse.variants[k].min_abs, b = refined.variants[k].min_abs;
    EXPECT_LT(std::abs(a - b) / a, 0.05) << variant_name(coarse.variants[k].variant);
  }
}

TEST(Scan, RefusesInvalidCoefficients) {
  FrozenCoefficients c = FrozenCoefficients::isotropic();
  c.l2 = -1.0;
  EXPECT_THROW(scan(c), DomainError);
  c = FrozenCoefficients::isotropic();
  c.P(0, 0) = -1.0;
  EXPECT_THROW(scan(c), DomainError);
}

TEST(Scan, FlippedLatentSignHasRealAxisZero) {
  FrozenCoefficients c = FrozenCoefficients::isotropic();
  c.l2 = -1.0;
  const AxisZero z = locate_real_axis_zero(c, LsVariant::ls, e1(), 1e-3, 1e3);
  ASSERT_TRUE(z.found);
  EXPECT_LT(z.abs_det, 1e-6);
  // sqrt(1 + lambda) = lambda
  EXPECT_NEAR(z.lambda, 0.5 * (1.0 + std::sqrt(5.0)), 1e-12);
  const ScanReport rep = scan(c, {}, false);
  EXPECT_LT(rep.find(LsVariant::ls).min_normalized, 0.05);
}

TEST(Scan, LiteralSecondAsymptoticSystemVanishesAtUnitLambda) {
  const FrozenCoefficients c = FrozenCoefficients::isotropic();
  const AxisZero z = locate_real_axis_zero(c, LsVariant::inf_latent_as_shown, e1(), 1e-3, 1e3);
  ASSERT_TRUE(z.found);
  EXPECT_NEAR(z.lambda, 1.0, 1e-12);
  EXPECT_FALSE(locate_real_axis_zero(c, LsVariant::inf_latent, e1(), 1e-3, 1e3).found);
  EXPECT_LT(scan(c).latent_as_shown.min_abs, 1e-1);
}
