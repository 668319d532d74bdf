#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "stefan/errors.hpp"
#include "stefan/materials.hpp"

using namespace stefan;

namespace {

PhaseLaw log_phase(double k) {
  PhaseLaw p;
  p.psi = [=](double t) { return k * (t - t * std::log(t)); };
  p.dpsi = [=](double t) { return -k * std::log(t); };
  p.d2psi = [=](double t) { return -k / t; };
  p.d3psi = [=](double t) { return k / (t * t); };
  p.d = [](double) { return 1.0; };
  p.dd = [](double) { return 0.0; };
  return p;
}

PhaseLaw shifted(PhaseLaw p, double c) {
  auto psi = p.psi;
  p.psi = [=](double t) { return psi(t) + c; };
  return p;
}

}  // namespace

TEST(Derived, DefaultLawsAtUnitTemperature) {
  DefaultLawParams p;
  p.kappa1 = 1.7;
  p.kappa2 = 0.8;
  const MaterialLaws laws = default_laws(p);
  const Thermo t = laws.derived(1.0, 0);
  EXPECT_NEAR(t.eta, 0.0, 1e-15);  // -A_1 with A_1 = 0
  EXPECT_NEAR(t.kappa, 1.7, 1e-15);
  const DefaultCoefficients c = default_coefficients(1.7, 0.8, 1.0, 1.0);
  EXPECT_NEAR(laws.derived(1.0, 1).eta, -c.jump_A, 1e-15);
}

TEST(Derived, DefiningIdentityAndFiniteDifference) {
  DefaultLawParams p;
  p.kappa1 = 1.3;
  p.kappa2 = 2.1;
  p.lm = 0.7;
  p.theta_m = 1.2;
  const MaterialLaws laws = default_laws(p);
  for (int phase = 0; phase < 2; ++phase)
    for (double th : {0.6, 0.9, 1.2, 1.7}) {
      const Thermo t = laws.derived(th, phase);
      EXPECT_NEAR(t.eps - laws.psi(phase, th) - th * t.eta, 0.0, 4e-16 * (std::abs(t.eps) + 1.0));
      double prev = 0.0;
      for (double h : {1e-2, 5e-3}) {
        const double fd = (laws.energy(phase, th + h) - laws.energy(phase, th - h)) / (2 * h);
        const double err = std::abs(t.kappa - fd);
        EXPECT_LE(err, 10 * h * h);
        if (prev > 1e-9) EXPECT_GT(prev / std::max(err, 1e-300), 3.0);
        prev = err;
      }
    }
  EXPECT_THROW(laws.derived(0.0, 0), DomainError);
  EXPECT_THROW(laws.derived(-1.0, 1), DomainError);
}

TEST(LatentHeat, Examples) {
  DefaultLawParams p;
  p.lm = 0.8;
  p.theta_m = 1.1;
  p.kappa2 = 1.4;
  const MaterialLaws laws = default_laws(p);
  EXPECT_NEAR(laws.latent_heat(1.1), 0.8, 1e-14);
  EXPECT_GT(laws.latent_heat(1.1), 0.0);
  for (double th : {0.6, 1.0, 1.9})
    EXPECT_NEAR(laws.latent_heat(th), -th * (laws.entropy(1, th) - laws.entropy(0, th)), 1e-14);

  const MaterialLaws same(log_phase(1.0), log_phase(1.0), {}, {}, 1.0, 0.5, 2.0);
  for (double th : {0.6, 1.0, 1.9}) EXPECT_EQ(same.latent_heat(th), 0.0);
  EXPECT_THROW(laws.latent_heat(0.0), DomainError);
}

TEST(MeltingTemperature, DefaultRoundtrip) {
  EXPECT_NEAR(melting_temperature(default_laws(1.0, 1.0, 1.0, 1.0)), 1.0, 1e-12);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> k(0.5, 2.0), tm(0.8, 1.4);
  for (int n = 0; n < 20; ++n) {
    const double t = tm(rng);
    const MaterialLaws laws = default_laws(k(rng), k(rng), k(rng), t);
    const double root = melting_temperature(laws, 0.5, 2.0);
    EXPECT_NEAR(root, t, 1e-12);
    EXPECT_LE(std::abs(laws.jump_psi(root)), 1e-12);
  }
}

TEST(MeltingTemperature, ConstantShiftHasNoRoot) {
  const MaterialLaws laws(log_phase(1.0), shifted(log_phase(1.0), 0.3), {}, {}, 1.0, 0.5, 2.0);
  EXPECT_THROW(melting_temperature(laws, 0.5, 2.0), NotFoundError);
}

TEST(MeltingTemperature, LogProfileAgainstDenseScan) {
  const double lm = 0.9, theta0 = 1.3;
  PhaseLaw outer = log_phase(1.0);
  auto psi = outer.psi, dpsi = outer.dpsi, d2psi = outer.d2psi, d3psi = outer.d3psi;
  outer.psi = [=](double t) { return psi(t) + lm * std::log(t / theta0); };
  outer.dpsi = [=](double t) { return dpsi(t) + lm / t; };
  outer.d2psi = [=](double t) { return d2psi(t) - lm / (t * t); };
  outer.d3psi = [=](double t) { return d3psi(t) + 2 * lm / (t * t * t); };
  const MaterialLaws laws(log_phase(1.0), outer, {}, {}, 1.0, 0.5, 2.0);
  const double root = melting_temperature(laws, 0.5, 2.0);

  // Oracle: dense sign scan, then plain bisection.
  const int n = 100000;
  double lo = 0.5, hi = 2.0;
  for (int k = 0; k < n; ++k) {
    const double a = 0.5 + 1.5 * k / n, b = 0.5 + 1.5 * (k + 1) / n;
    if ((laws.jump_psi(a) < 0) != (laws.jump_psi(b) < 0)) {
      lo = a;
      hi = b;
      break;
    }
  }
  for (int it = 0; it < 80; ++it) {
    const double m = 0.5 * (lo + hi);
    ((laws.jump_psi(m) < 0) == (laws.jump_psi(lo) < 0) ? lo : hi) = m;
  }
  EXPECT_NEAR(root, 0.5 * (lo + hi), 1e-10);
  EXPECT_NEAR(root, theta0, 1e-10);
}

TEST(DefaultLaws, ConstraintEquations) {
  const DefaultCoefficients c = default_coefficients(1.0, 1.0, 1.0, 1.0);
  EXPECT_NEAR(c.jump_A, 1.0, 1e-15);
  // [[kappa + A + B]] = 0 with [[kappa]] = 0.
  EXPECT_NEAR(0.0 + c.jump_A + c.jump_B, 0.0, 1e-15);
  const MaterialLaws laws = default_laws(1.0, 1.0, 1.0, 1.0);
  for (double th : {0.5, 0.7, 1.3, 2.0}) {
    EXPECT_NEAR(laws.heat_capacity(0, th), 1.0, 1e-14);
    EXPECT_NEAR(laws.heat_capacity(1, th), 1.0, 1e-14);
    EXPECT_NEAR(laws.jump_psi(th), th - 1.0, 1e-14);
    EXPECT_NEAR(laws.latent_heat(th), th, 1e-14);
  }
}

TEST(DefaultLaws, PowerConductivityAndUndercooling) {
  DefaultLawParams p;
  p.d1 = 2.0;
  p.d2 = 0.5;
  p.d_exponent = 1.5;
  p.gamma0 = 0.3;
  const MaterialLaws laws = default_laws(p);
  EXPECT_TRUE(laws.has_undercooling());
  EXPECT_DOUBLE_EQ(laws.gamma(1.4), 0.3);
  EXPECT_NEAR(laws.conductivity(0, 1.2), 2.0 * std::pow(1.2, 1.5), 1e-14);
  const double h = 1e-6;
  EXPECT_NEAR(laws.conductivity_derivative(1, 1.2),
              (laws.conductivity(1, 1.2 + h) - laws.conductivity(1, 1.2 - h)) / (2 * h), 1e-8);
  p.gamma0 = 0.0;
  EXPECT_FALSE(default_laws(p).has_undercooling());
  EXPECT_EQ(default_laws(p).gamma(1.0), 0.0);
}

TEST(Validation, SampledPositivity) {
  PhaseLaw bad = log_phase(1.0);
  bad.d = [](double t) { return t - 1.5; };
  EXPECT_THROW(MaterialLaws(log_phase(1.0), bad, {}, {}, 1.0, 0.5, 2.0), LawError);
  PhaseLaw concave = log_phase(-1.0);
  EXPECT_THROW(MaterialLaws(concave, log_phase(1.0), {}, {}, 1.0, 0.5, 2.0), LawError);
  EXPECT_THROW(MaterialLaws(log_phase(1.0), log_phase(1.0), {}, {}, 0.0, 0.5, 2.0), LawError);
  EXPECT_THROW(MaterialLaws(log_phase(1.0), log_phase(1.0), [](double t) { return 1.0 - t; }, {}, 1.0, 0.5, 2.0),
               LawError);
}

// A law with temperature-dependent heat capacity, where the finite difference has a visible O(h^2) error.
TEST(Derived, HeatCapacityMatchesEnergySlopeForCurvedLaw) {
  PhaseLaw p;
  p.psi = [](double t) { return -t * t * t / 6.0 - t * std::log(t); };
  p.dpsi = [](double t) { return -t * t / 2.0 - std::log(t) - 1.0; };
  p.d2psi = [](double t) { return -t - 1.0 / t; };
  p.d3psi = [](double t) { return -1.0 + 1.0 / (t * t); };
  p.d = [](double) { return 1.0; };
  p.dd = [](double) { return 0.0; };
  const MaterialLaws laws(p, p, {}, {}, 1.0, 0.5, 2.0);
  for (double th : {0.7, 1.3}) {
    const double k = laws.derived(th, 0).kappa;
    std::vector<double> errs;
    for (double h : {1e-2, 5e-3}) {
      errs.push_back(std::abs(k - (laws.energy(0, th + h) - laws.energy(0, th - h)) / (2 * h)));
    }
    EXPECT_NEAR(errs[0] / errs[1], 4.0, 0.2);
  }
}
