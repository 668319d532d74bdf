#include "stefan/diffeo_probe.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <random>
#include <thread>

#include "stefan/errors.hpp"

namespace stefan {

namespace {

// Up to six nodes; piecewise cubic Hermite with fourth-order slopes spans i-2 .. i+3.
struct Stencil {
  std::array<int, 6> idx{};
  std::array<double, 6> w{};
  int n = 0;
};

// Weights of the derivative of the interpolating polynomial through z, evaluated at p.
std::vector<double> derivative_weights(const std::vector<double>& z, double p) {
  const int n = static_cast<int>(z.size());
  std::vector<double> w(n, 0.0);
  for (int k = 0; k < n; ++k) {
    double denom = 1.0;
    for (int m = 0; m < n; ++m)
      if (m != k) denom *= z[k] - z[m];
    double num = 0.0;
    for (int q = 0; q < n; ++q) {
      if (q == k) continue;
      double prod = 1.0;
      for (int m = 0; m < n; ++m)
        if (m != k && m != q) prod *= p - z[m];
      num += prod;
    }
    w[k] = num / denom;
  }
  return w;
}

struct Hermite {
  double h00, h01, h10, h11;
  explicit Hermite(double f) {
    const double g = 1.0 - f;
    h00 = (1.0 + 2.0 * f) * g * g;
    h01 = f * f * (3.0 - 2.0 * f);
    h10 = f * g * g;
    h11 = -f * f * g;
  }
};

Stencil periodic_stencil(int nx, double period, double x) {
  double u = x / period * nx;
  const double near = std::round(u);
  if (std::abs(u - near) < 1e-12) u = near;
  const double base = std::floor(u);
  const int j0 = static_cast<int>(base);
  const Hermite H(u - base);
  // Offsets -2 .. 3 around j0; slopes (u[-2] - 8 u[-1] + 8 u[1] - u[2]) / 12 in grid units.
  Stencil s;
  s.n = 6;
  s.w = {H.h10 / 12.0,
         -8.0 * H.h10 / 12.0 + H.h11 / 12.0,
         H.h00 - 8.0 * H.h11 / 12.0,
         H.h01 + 8.0 * H.h10 / 12.0,
         -H.h10 / 12.0 + 8.0 * H.h11 / 12.0,
         -H.h11 / 12.0};
  for (int k = 0; k < 6; ++k) s.idx[k] = ((j0 - 2 + k) % nx + nx) % nx;
  return s;
}

// Stencil on increasing nodes restricted to [lo, hi]; slopes from five-node windows inside the range.
Stencil bounded_stencil(const Eigen::VectorXd& z, int lo, int hi, double p) {
  Stencil s;
  const int count = hi - lo + 1;
  if (count == 1) {
    s.n = 1;
    s.idx[0] = lo;
    s.w[0] = 1.0;
    return s;
  }
  const double* begin = z.data() + lo;
  const double* end = z.data() + hi + 1;
  int i = static_cast<int>(std::upper_bound(begin, end, p) - z.data()) - 1;
  i = std::clamp(i, lo, hi - 1);
  const double delta = z(i + 1) - z(i);
  const Hermite H((p - z(i)) / delta);
  const int m = std::min(5, count);
  const int first = std::clamp(i - 2, lo, hi - m + 1);
  const int last = std::min(std::max(i + 3, first + m - 1), hi);
  s.n = last - first + 1;
  for (int k = 0; k < s.n; ++k) s.idx[k] = first + k;
  s.w.fill(0.0);
  s.w[i - first] += H.h00;
  s.w[i + 1 - first] += H.h01;
  for (int node : {i, i + 1}) {
    const int ws = std::clamp(node - 2, lo, hi - m + 1);
    std::vector<double> zz(m);
    for (int k = 0; k < m; ++k) zz[k] = z(ws + k);
    const std::vector<double> dw = derivative_weights(zz, z(node));
    const double c = (node == i ? H.h10 : H.h11) * delta;
    for (int k = 0; k < m; ++k) s.w[ws + k - first] += c * dw[k];
  }
  return s;
}

void check_ball(const ParamDiffeo& d, double lambda, double mu, double eta) {
  const double norm = std::sqrt(lambda * lambda + mu * mu + eta * eta);
  if (!(norm <= d.r0 * (1.0 + 1e-12)))
    throw DomainError("diffeo parameters outside the ball of radius r0 = " + std::to_string(d.r0));
}

}  // namespace

ParamDiffeo ParamDiffeo::make(double x_c, double y_c, double eps0, double a, double t_c) {
  ParamDiffeo d;
  d.x_c = x_c;
  d.y_c = y_c;
  d.eps0 = eps0;
  d.t_c = t_c;
  d.r0 = eps0 / 4.0;
  d.a = a;
  d.chi_m = CutoffProfile::chi_m(0.0, eps0);
  d.chi = CutoffProfile::chi(y_c, eps0);
  d.varpi = CutoffProfile::varpi(a);
  d.xi_time = CutoffProfile::xi_time(t_c, eps0);
  d.validate();
  return d;
}

void ParamDiffeo::validate() const {
  if (!(eps0 > 0.0) || !(a > 0.0) || !(period > 0.0)) throw DomainError("diffeo: eps0, a and period must be positive");
  if (y_c == 0.0) throw DomainError("diffeo: centre must lie off the interface (y_c != 0)");
  if (!(5.0 * eps0 <= 0.5 * period)) throw DomainError("diffeo: 5 eps0 exceeds half the period");
  const double y = std::abs(y_c);
  if (!(y - 5.0 * eps0 > 0.0 && y + 5.0 * eps0 < a / 3.0))
    throw DomainError("diffeo: B(y_c, 5 eps0) must sit inside one side of (-a/3, a/3)");
  if (!(t_c - 2.0 * eps0 > 0.0)) throw DomainError("diffeo: temporal bump must vanish at t = 0");
  if (!(r0 > 0.0 && r0 < 0.5 * eps0)) throw DomainError("diffeo: r0 must lie in (0, eps0/2)");
}

double ParamDiffeo::offset(double x) const {
  const double v = x - x_c;
  return v - period * std::floor(v / period + 0.5);
}

Eigen::Vector2d forward(const ParamDiffeo& d, double mu, double eta, const Eigen::Vector2d& p) {
  check_ball(d, 0.0, mu, eta);
  const double cm = d.chi_m_at(p.x());
  return {p.x() + cm * d.varpi.value(p.y()) * mu, p.y() + cm * d.chi.value(p.y()) * eta};
}

Eigen::Vector2d forward_horizontal(const ParamDiffeo& d, double mu, const Eigen::Vector2d& p) {
  check_ball(d, 0.0, mu, 0.0);
  return {p.x() + d.chi_m_at(p.x()) * d.varpi.value(p.y()) * mu, p.y()};
}

Eigen::Vector2d forward_vertical(const ParamDiffeo& d, double eta, const Eigen::Vector2d& p) {
  check_ball(d, 0.0, 0.0, eta);
  return {p.x(), p.y() + d.chi_m_at(p.x()) * d.chi.value(p.y()) * eta};
}

Eigen::Matrix2d forward_jacobian(const ParamDiffeo& d, double mu, double eta, const Eigen::Vector2d& p) {
  const double cm = d.chi_m_at(p.x()), dcm = d.chi_m_prime(p.x());
  const double w = d.varpi.value(p.y()), dw = d.varpi.derivative(p.y());
  const double c = d.chi.value(p.y()), dc = d.chi.derivative(p.y());
  Eigen::Matrix2d J;
  J << 1.0 + dcm * w * mu, cm * dw * mu, dcm * c * eta, 1.0 + cm * dc * eta;
  return J;
}

Eigen::Vector2d inverse(const ParamDiffeo& d, double mu, double eta, const Eigen::Vector2d& q) {
  check_ball(d, 0.0, mu, eta);
  const double tol = 1e-13 * (1.0 + q.cwiseAbs().maxCoeff());
  Eigen::Vector2d p = q;
  for (int it = 0; it < 50; ++it) {
    const Eigen::Vector2d r = forward(d, mu, eta, p) - q;
    if (r.cwiseAbs().maxCoeff() <= tol) return p;
    p -= forward_jacobian(d, mu, eta, p).partialPivLu().solve(r);
  }
  throw ProbeError("diffeo inverse: Newton did not converge in 50 iterations (r0 too large?)");
}

double time_shift(const ParamDiffeo& d, double lambda, double t) { return t + d.xi(t) * lambda; }

void ProbeGrid::validate() const {
  if (nx < 4) throw DomainError("probe grid: need at least 4 periodic x nodes");
  if (y.size() < 1 || t.size() < 1) throw DomainError("probe grid: empty y or t nodes");
  for (Eigen::Index i = 1; i < y.size(); ++i)
    if (!(y(i) > y(i - 1))) throw DomainError("probe grid: y nodes must increase");
  for (Eigen::Index k = 1; k < t.size(); ++k)
    if (!(t(k) > t(k - 1))) throw DomainError("probe grid: t nodes must increase");
  if (y_break >= y.size()) throw DomainError("probe grid: break row out of range");
}

ProbeGrid chart_grid(const TubularChart& chart, Eigen::VectorXd t) {
  ProbeGrid g;
  g.nx = chart.n_s;
  g.y.resize(chart.n_radial());
  for (int i = 0; i < chart.n_radial(); ++i) g.y(i) = chart.rho(i) - chart.R0;
  g.y(chart.interface_row()) = 0.0;
  g.y_break = chart.interface_row();
  g.t = std::move(t);
  g.validate();
  return g;
}

double SpaceTimeField::interpolate(double t, double x, double y) const {
  const auto& g = grid;
  const int ny = static_cast<int>(g.y.size()), nt = static_cast<int>(g.t.size());
  const double ty = 1e-12 * (1.0 + std::abs(y)), tt = 1e-12 * (1.0 + std::abs(t));
  if (ny > 1 && (y < g.y(0) - ty || y > g.y(ny - 1) + ty))
    throw DomainError("probe interpolation: y = " + std::to_string(y) + " outside the grid");
  if (nt > 1 && (t < g.t(0) - tt || t > g.t(nt - 1) + tt))
    throw DomainError("probe interpolation: t = " + std::to_string(t) + " outside the grid");

  Stencil sy;
  if (ny == 1) {
    sy = bounded_stencil(g.y, 0, 0, y);
  } else if (g.y_break > 0 && g.y_break < ny - 1) {
    sy = y < g.y(g.y_break) ? bounded_stencil(g.y, 0, g.y_break, y) : bounded_stencil(g.y, g.y_break, ny - 1, y);
  } else {
    sy = bounded_stencil(g.y, 0, ny - 1, y);
  }
  const Stencil st = bounded_stencil(g.t, 0, nt - 1, t);
  const Stencil sx = periodic_stencil(g.nx, g.period, x);

  double v = 0.0;
  for (int a = 0; a < st.n; ++a) {
    const Eigen::ArrayXXd& F = frames[st.idx[a]];
    double vy = 0.0;
    for (int b = 0; b < sy.n; ++b) {
      double vx = 0.0;
      for (int c = 0; c < sx.n; ++c) vx += sx.w[c] * F(sy.idx[b], sx.idx[c]);
      vy += sy.w[b] * vx;
    }
    v += st.w[a] * vy;
  }
  return v;
}

double SpaceTimeField::sup_norm() const {
  double m = 0.0;
  for (const auto& f : frames) m = std::max(m, f.abs().maxCoeff());
  return m;
}

SpaceTimeField pullback_spacetime(const ParamDiffeo& d, double lambda, double mu, double eta,
                                  const SpaceTimeField& u) {
  check_ball(d, lambda, mu, eta);
  if (lambda == 0.0 && mu == 0.0 && eta == 0.0) return u;
  const auto& g = u.grid;
  SpaceTimeField out{g, u.frames};
  auto frame = [&](Eigen::Index k) {
    const double s = d.xi(g.t(k));
    const double tk = g.t.size() > 1 ? time_shift(d, lambda, g.t(k)) : g.t(k);
    for (Eigen::Index i = 0; i < g.y.size(); ++i) {
      for (int j = 0; j < g.nx; ++j) {
        Eigen::Vector2d q;
        if (u.surface()) {
          q = {g.x(j) + d.chi_m_at(g.x(j)) * d.varpi.value(g.y(i)) * s * mu, g.y(i)};
        } else {
          q = forward(d, s * mu, s * eta, {g.x(j), g.y(i)});
        }
        out.frames[k](i, j) = u.interpolate(tk, q.x(), q.y());
      }
    }
  };
  // Frames are independent; strided over the available hardware threads.
  const Eigen::Index nt = g.t.size();
  const int workers = static_cast<int>(std::min<Eigen::Index>(std::max(1u, std::thread::hardware_concurrency()), nt));
  if (workers <= 1) {
    for (Eigen::Index k = 0; k < nt; ++k) frame(k);
    return out;
  }
  std::vector<std::future<void>> jobs;
  for (int w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (Eigen::Index k = w; k < nt; k += workers) frame(k);
    }));
  for (auto& j : jobs) j.get();
  return out;
}

SpaceTimeField time_derivative(const SpaceTimeField& u) {
  const int nt = static_cast<int>(u.frames.size());
  SpaceTimeField out{u.grid, {}};
  if (nt == 1) {
    out.frames.push_back(Eigen::ArrayXXd::Zero(u.frames[0].rows(), u.frames[0].cols()));
    return out;
  }
  if (nt < 5) throw DomainError("time_derivative: need at least 5 time levels");
  const double h12 = 12.0 * u.grid.dt();
  const auto& f = u.frames;
  for (int k = 0; k < nt; ++k) {
    Eigen::ArrayXXd v;
    if (k == 0) {
      v = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / h12;
    } else if (k == 1) {
      v = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / h12;
    } else if (k == nt - 2) {
      v = (3.0 * f[nt - 1] + 10.0 * f[nt - 2] - 18.0 * f[nt - 3] + 6.0 * f[nt - 4] - f[nt - 5]) / h12;
    } else if (k == nt - 1) {
      v = (25.0 * f[nt - 1] - 48.0 * f[nt - 2] + 36.0 * f[nt - 3] - 16.0 * f[nt - 4] + 3.0 * f[nt - 5]) / h12;
    } else {
      v = (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]) / h12;
    }
    out.frames.push_back(std::move(v));
  }
  return out;
}

SpaceTimeField commutator_B(const ParamDiffeo& d, double lambda, double mu, double eta, const SpaceTimeField& u) {
  SpaceTimeField lhs = time_derivative(pullback_spacetime(d, lambda, mu, eta, u));
  const SpaceTimeField rhs = pullback_spacetime(d, lambda, mu, eta, time_derivative(u));
  for (std::size_t k = 0; k < lhs.frames.size(); ++k) {
    const double factor = 1.0 + d.xi_prime(u.grid.t(static_cast<Eigen::Index>(k))) * lambda;
    lhs.frames[k] -= factor * rhs.frames[k];
  }
  return lhs;
}

CommutatorCheck commutator_check(const ParamDiffeo& d, double lambda, double mu, double eta, const SpaceTimeField& u) {
  const int nt = static_cast<int>(u.frames.size());
  if (nt < 9 || nt % 2 == 0) throw DomainError("commutator_check: need an odd number (>= 9) of time levels");
  SpaceTimeField coarse{u.grid, {}};
  coarse.grid.t.resize((nt + 1) / 2);
  for (int k = 0; k < nt; k += 2) {
    coarse.grid.t(k / 2) = u.grid.t(k);
    coarse.frames.push_back(u.frames[k]);
  }
  const SpaceTimeField bf = commutator_B(d, lambda, mu, eta, u);
  const SpaceTimeField bc = commutator_B(d, lambda, mu, eta, coarse);
  CommutatorCheck out;
  out.b_max = bf.sup_norm();
  out.b_coarse_max = bc.sup_norm();
  double diff = 0.0;
  for (int k = 0; k < nt; k += 2) diff = std::max(diff, (bc.frames[k / 2] - bf.frames[k]).abs().maxCoeff());
  out.error_estimate = diff / 15.0;
  return out;
}

NormalDerivativeReport normal_derivative_invariance(const ParamDiffeo& d, double mu, double eta,
                                                    const SpaceTimeField& u, int frame) {
  const auto& g = u.grid;
  const int br = g.y_break;
  const int ny = static_cast<int>(g.y.size());
  if (br < 0 || std::abs(g.y(br)) > 1e-14) throw DomainError("normal_derivative_invariance: grid needs an interface row");
  constexpr int kWidth = 4;
  if (br < kWidth || ny - 1 - br < kWidth)
    throw DomainError("normal_derivative_invariance: need 4 rows on each side of the interface");
  check_ball(d, 0.0, mu, eta);

  NormalDerivativeReport rep;
  for (int i = br - kWidth; i <= br + kWidth; ++i) {
    const double y = g.y(i);
    if (d.chi.value(y) != 0.0 || std::abs(y - d.y_c) < d.chi.support + d.r0) {
      rep.standard_configuration = false;
      rep.note = "vertical bump reaches the interface stencil";
    }
    if (d.varpi.value(y) != 1.0) {
      rep.standard_configuration = false;
      rep.note = "varpi is not flat on the interface stencil";
    }
  }

  const Eigen::ArrayXXd& U = u.frames[frame];
  const double t = g.t(frame);
  Eigen::ArrayXXd W = U;
  for (int i = br - kWidth; i <= br + kWidth; ++i)
    for (int j = 0; j < g.nx; ++j) {
      const Eigen::Vector2d p = inverse(d, mu, eta, {g.x(j), g.y(i)});
      W(i, j) = u.interpolate(t, p.x(), p.y());
    }

  for (int side : {-1, 1}) {
    std::vector<double> z;
    std::vector<int> rows;
    for (int k = 0; k <= kWidth; ++k) {
      rows.push_back(br + side * k);
      z.push_back(g.y(br + side * k));
    }
    const std::vector<double> wd = derivative_weights(z, 0.0);
    Eigen::VectorXd dw = Eigen::VectorXd::Zero(g.nx), du = Eigen::VectorXd::Zero(g.nx);
    for (int j = 0; j < g.nx; ++j)
      for (int k = 0; k <= kWidth; ++k) {
        dw(j) += wd[k] * W(rows[k], j);
        du(j) += wd[k] * U(rows[k], j);
      }
    const double w0 = d.varpi.value(0.0);
    for (int j = 0; j < g.nx; ++j) {
      const double xs = g.x(j) + d.chi_m_at(g.x(j)) * w0 * mu;
      const Stencil sx = periodic_stencil(g.nx, g.period, xs);
      double v = 0.0;
      for (int c = 0; c < sx.n; ++c) v += sx.w[c] * dw(sx.idx[c]);
      rep.max_residual = std::max(rep.max_residual, std::abs(v - du(j)));
    }
  }
  return rep;
}

const char* direction_name(ParamDirection p) {
  switch (p) {
    case ParamDirection::lambda:
      return "lambda";
    case ParamDirection::mu:
      return "mu";
    case ParamDirection::eta:
      return "eta";
  }
  return "?";
}

SpaceTimeField parameter_derivative(const ParamDiffeo& d, const SpaceTimeField& u, ParamDirection dir, int order,
                                    double step) {
  if (order != 1 && order != 2) throw DomainError("parameter_derivative: order must be 1 or 2");
  auto at = [&](double s) {
    return pullback_spacetime(d, dir == ParamDirection::lambda ? s : 0.0, dir == ParamDirection::mu ? s : 0.0,
                              dir == ParamDirection::eta ? s : 0.0, u);
  };
  const SpaceTimeField p = at(step), m = at(-step);
  SpaceTimeField out{u.grid, {}};
  for (std::size_t k = 0; k < u.frames.size(); ++k) {
    if (order == 1)
      out.frames.push_back((p.frames[k] - m.frames[k]) / (2.0 * step));
    else
      out.frames.push_back((p.frames[k] - 2.0 * u.frames[k] + m.frames[k]) / (step * step));
  }
  return out;
}

std::vector<SmoothnessRow> smoothness_probe(const ParamDiffeo& d, const SpaceTimeField& theta,
                                            const SpaceTimeField& h, double step) {
  std::vector<SmoothnessRow> rows;
  for (ParamDirection dir : {ParamDirection::lambda, ParamDirection::mu, ParamDirection::eta})
    for (int order : {1, 2}) rows.push_back({"theta", dir, order, parameter_derivative(d, theta, dir, order, step).sup_norm()});
  for (ParamDirection dir : {ParamDirection::lambda, ParamDirection::mu})
    for (int order : {1, 2}) rows.push_back({"h", dir, order, parameter_derivative(d, h, dir, order, step).sup_norm()});
  return rows;
}

bool in_invariance_ball(const ParamDiffeo& d, const Eigen::Vector2d& p) {
  return std::abs(d.offset(p.x())) < 3.0 * d.eps0 && std::abs(p.y()) < 7.0 * d.a / 9.0;
}

InvarianceReport invariance_check(const ParamDiffeo& d, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0), turn(0.0, 2.0 * std::numbers::pi), rad(0.0, 1.0);
  InvarianceReport rep;
  rep.samples = samples;
  for (int n = 0; n < samples; ++n) {
    const Eigen::Vector2d p{d.x_c + 3.0 * d.eps0 * unit(rng), 7.0 * d.a / 9.0 * unit(rng)};
    const double r = d.r0 * std::sqrt(rad(rng)), phi = turn(rng);
    const double mu = r * std::cos(phi), eta = r * std::sin(phi);
    if (!in_invariance_ball(d, p)) continue;
    const Eigen::Vector2d q = forward(d, mu, eta, p);
    if (!in_invariance_ball(d, q)) ++rep.ball_violations;
    const double back = (inverse(d, mu, eta, q) - p).cwiseAbs().maxCoeff();
    rep.max_roundtrip = std::max(rep.max_roundtrip, back);
    if (back > 1e-12) ++rep.roundtrip_failures;
    const Eigen::Vector2d c = forward_horizontal(d, mu, forward_vertical(d, eta, p));
    rep.max_composition = std::max(rep.max_composition, (c - q).cwiseAbs().maxCoeff());
    const double det = forward_jacobian(d, mu, eta, p).determinant();
    rep.min_det = std::min(rep.min_det, det);
    if (r > 0.0) rep.jacobian_constant = std::max(rep.jacobian_constant, std::abs(det - 1.0) / r);
  }
  return rep;
}

}  // namespace stefan
