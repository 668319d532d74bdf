#include "stefan/ls_checker.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "stefan/errors.hpp"

namespace stefan {

namespace {

constexpr cplx I{0.0, 1.0};

bool positive_definite(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols() || A.rows() == 0) return false;
  if (!A.isApprox(A.transpose(), 1e-12)) return false;
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A, Eigen::EigenvaluesOnly).eigenvalues().minCoeff() > 0.0;
}

struct Symbols {
  double Pxi, Sxi, Pm_xi, Pn, a_xi;
};

Symbols symbols(const FrozenCoefficients& c, const Eigen::VectorXd& xi) {
  if (xi.size() != c.m) throw DomainError("xi has the wrong dimension");
  Symbols s;
  s.Pxi = xi.dot(c.P.topLeftCorner(c.m, c.m) * xi);
  s.Sxi = xi.dot(c.S * xi);
  s.Pm_xi = c.P.row(c.m).head(c.m).dot(xi);
  s.Pn = c.P(c.m, c.m);
  s.a_xi = c.a0.dot(xi);
  return s;
}

void check_point(const Eigen::VectorXd& xi, cplx lambda) {
  if (lambda.real() < -1e-14) throw DomainError("lambda must lie in the closed right half-plane");
  if (xi.norm() + std::abs(lambda) == 0.0) throw DomainError("xi and lambda vanish simultaneously");
}

}  // namespace

FrozenCoefficients FrozenCoefficients::isotropic(int m) {
  FrozenCoefficients c;
  c.m = m;
  c.P = Eigen::MatrixXd::Identity(m + 1, m + 1);
  c.S = Eigen::MatrixXd::Identity(m, m);
  c.a0 = Eigen::VectorXd::Zero(m);
  return c;
}

void FrozenCoefficients::validate() const {
  if (m < 1) throw DomainError("tangential dimension m must be >= 1");
  if (P.rows() != m + 1 || S.rows() != m || a0.size() != m) throw DomainError("coefficient shapes do not match m");
  if (!positive_definite(P)) throw DomainError("P is not symmetric positive definite");
  if (!positive_definite(S)) throw DomainError("S is not symmetric positive definite");
  if (!(kappa0 > 0.0)) throw DomainError("kappa0 > 0 violated");
  if (!(d0 > 0.0)) throw DomainError("d0 > 0 violated");
  if (!(l2 * l0 > 0.0)) throw DomainError("l2 * l0 > 0 violated");
}

cplx stable_root(const FrozenCoefficients& c, const Eigen::VectorXd& xi, cplx lambda) {
  check_point(xi, lambda);
  const Symbols s = symbols(c, xi);
  const cplx disc = -s.Pm_xi * s.Pm_xi + s.Pn * c.kappa0 * lambda + s.Pn * s.Pxi;
  return (std::sqrt(disc) - I * s.Pm_xi) / s.Pn;
}

cplx principal_root(const FrozenCoefficients& c, cplx lambda) {
  if (lambda == 0.0) throw DomainError("asymptotic systems need lambda != 0");
  if (lambda.real() < -1e-14) throw DomainError("lambda must lie in the closed right half-plane");
  return std::sqrt(c.kappa0 * lambda / c.P(c.m, c.m));
}

cplx ls_determinant(const FrozenCoefficients& c, const Eigen::VectorXd& xi, cplx lambda) {
  return variant_determinant(c, LsVariant::ls, xi, lambda);
}

std::string variant_name(LsVariant v) {
  switch (v) {
    case LsVariant::ls: return "LS";
    case LsVariant::inf_transport: return "LSinf_transport";
    case LsVariant::inf_latent: return "LSinf_latent";
    case LsVariant::inf_flux: return "LSinf_flux";
    case LsVariant::inf_latent_as_shown: return "LSinf_latent_as_shown";
  }
  return "?";
}

namespace {

// Terms whose sum is the determinant; the normalized metric divides by the sum of their moduli.
std::vector<cplx> terms(const FrozenCoefficients& c, LsVariant v, const Eigen::VectorXd& xi, cplx lambda) {
  const Symbols s = symbols(c, xi);
  const double ll = c.l2 * c.l0;
  switch (v) {
    case LsVariant::ls: {
      const cplx mu = stable_root(c, xi, lambda);
      return {s.Sxi * c.d0 * mu, ll * lambda, -I * s.Sxi * s.a_xi};
    }
    case LsVariant::inf_transport: {
      const cplx mu = stable_root(c, xi, lambda);
      return {s.Sxi * c.d0 * mu, -I * s.Sxi * s.a_xi};
    }
    case LsVariant::inf_latent:
      return {s.Sxi * c.d0 * principal_root(c, lambda), ll * lambda};
    case LsVariant::inf_flux:
      return {s.Sxi * c.d0 * principal_root(c, lambda)};
    case LsVariant::inf_latent_as_shown:
      return {-s.Sxi * c.d0 * principal_root(c, lambda), ll * lambda};
  }
  return {};
}

}  // namespace

cplx variant_determinant(const FrozenCoefficients& c, LsVariant v, const Eigen::VectorXd& xi, cplx lambda) {
  check_point(xi, lambda);
  cplx sum = 0.0;
  for (const cplx& t : terms(c, v, xi, lambda)) sum += t;
  return sum;
}

double normalized_determinant(const FrozenCoefficients& c, LsVariant v, const Eigen::VectorXd& xi, cplx lambda) {
  check_point(xi, lambda);
  cplx sum = 0.0;
  double scale = 0.0;
  for (const cplx& t : terms(c, v, xi, lambda)) {
    sum += t;
    scale += std::abs(t);
  }
  return scale > 0.0 ? std::abs(sum) / scale : 0.0;
}

std::vector<Eigen::VectorXd> ScanGrid::xi_directions(int m) const {
  std::vector<Eigen::VectorXd> out;
  if (m == 1) {
    out.push_back(Eigen::VectorXd::Constant(1, 1.0));
    out.push_back(Eigen::VectorXd::Constant(1, -1.0));
  } else if (m == 2) {
    for (int k = 0; k < directions; ++k) {
      const double t = 2.0 * std::numbers::pi * k / directions;
      out.push_back(Eigen::Vector2d(std::cos(t), std::sin(t)));
    }
  } else {
    std::mt19937_64 rng(0);
    std::normal_distribution<double> N;
    for (int k = 0; k < directions; ++k) {
      Eigen::VectorXd v(m);
      for (int i = 0; i < m; ++i) v[i] = N(rng);
      out.push_back(v.normalized());
    }
  }
  return out;
}

std::vector<cplx> ScanGrid::lambdas() const {
  std::vector<cplx> out;
  const double a = std::log10(lambda_min), b = std::log10(lambda_max);
  for (int i = 0; i < n_modulus; ++i) {
    const double r = std::pow(10.0, n_modulus > 1 ? a + (b - a) * i / (n_modulus - 1) : a);
    for (int k = 0; k < n_phase; ++k) {
      const double phi = n_phase > 1 ? -0.5 * std::numbers::pi + std::numbers::pi * k / (n_phase - 1) : 0.0;
      // Snap the imaginary-axis endpoints so Re lambda is exactly zero there.
      if (k == 0 || k == n_phase - 1)
        out.emplace_back(0.0, phi > 0 ? r : -r);
      else
        out.push_back(std::polar(r, phi));
    }
  }
  return out;
}

const VariantResult& ScanReport::find(LsVariant v) const {
  if (v == LsVariant::inf_latent_as_shown) return latent_as_shown;
  for (const auto& r : variants)
    if (r.variant == v) return r;
  throw NotFoundError("variant not in scan report: " + variant_name(v));
}

ScanReport scan(const FrozenCoefficients& c, const ScanGrid& grid, bool check_invariants) {
  if (check_invariants) c.validate();
  const std::vector<Eigen::VectorXd> dirs = grid.xi_directions(c.m);
  const std::vector<cplx> lams = grid.lambdas();
  ScanReport rep;
  rep.min_re_mu = std::numeric_limits<double>::infinity();

  auto run = [&](LsVariant v, bool all_radii) {
    VariantResult r;
    r.variant = v;
    r.min_abs = r.min_normalized = std::numeric_limits<double>::infinity();
    const std::vector<double> radii = all_radii ? grid.radii : std::vector<double>{1.0};
    for (double rad : radii)
      for (const auto& d : dirs) {
        const Eigen::VectorXd xi = rad * d;
        for (const cplx& lam : lams) {
          const cplx det = variant_determinant(c, v, xi, lam);
          const double a = std::abs(det);
          r.min_normalized = std::min(r.min_normalized, normalized_determinant(c, v, xi, lam));
          if (a < r.min_abs) {
            r.min_abs = a;
            r.argmin_xi = xi;
            r.argmin_lambda = lam;
          }
          if (v == LsVariant::ls) rep.min_re_mu = std::min(rep.min_re_mu, stable_root(c, xi, lam).real());
          ++r.samples;
        }
      }
    return r;
  };

  rep.variants.push_back(run(LsVariant::ls, true));
  rep.variants.push_back(run(LsVariant::inf_transport, true));
  rep.variants.push_back(run(LsVariant::inf_latent, false));
  rep.variants.push_back(run(LsVariant::inf_flux, false));
  rep.latent_as_shown = run(LsVariant::inf_latent_as_shown, false);
  rep.min_abs = rep.min_normalized = std::numeric_limits<double>::infinity();
  for (const auto& r : rep.variants) {
    rep.min_abs = std::min(rep.min_abs, r.min_abs);
    rep.min_normalized = std::min(rep.min_normalized, r.min_normalized);
  }
  return rep;
}

AxisZero locate_real_axis_zero(const FrozenCoefficients& c, LsVariant v, const Eigen::VectorXd& xi, double lo,
                               double hi) {
  AxisZero z;
  auto f = [&](double lam) { return variant_determinant(c, v, xi, cplx(lam, 0.0)).real(); };
  const int n = 400;
  double a = lo, fa = f(a);
  for (int k = 1; k <= n; ++k) {
    const double b = lo * std::pow(hi / lo, static_cast<double>(k) / n);
    const double fb = f(b);
    if ((fa < 0.0) != (fb < 0.0)) {
      double x0 = a, x1 = b, f0 = fa;
      for (int it = 0; it < 200 && x1 - x0 > 1e-15 * x1; ++it) {
        const double mid = 0.5 * (x0 + x1);
        const double fm = f(mid);
        if ((fm < 0.0) == (f0 < 0.0)) {
          x0 = mid;
          f0 = fm;
        } else {
          x1 = mid;
        }
      }
      z.found = true;
      z.lambda = 0.5 * (x0 + x1);
      z.abs_det = std::abs(variant_determinant(c, v, xi, cplx(z.lambda, 0.0)));
      return z;
    }
    a = b;
    fa = fb;
  }
  return z;
}

}  // namespace stefan
