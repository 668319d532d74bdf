#include "stefan/stepper.hpp"

#include <unsupported/Eigen/FFT>
#include <numbers>
#include <sstream>

#include "stefan/errors.hpp"
#include "stefan/spectral.hpp"

namespace stefan {

State State::initial(BulkField theta, HeightField h, Eigen::VectorXd dth) {
  State z;
  const auto rows = theta.values().rows(), cols = theta.values().cols();
  z.theta = std::move(theta);
  z.h = std::move(h);
  z.dth = std::move(dth);
  z.dtheta = Eigen::ArrayXXd::Zero(rows, cols);
  return z;
}

Eigen::ArrayXXd smooth_field(const TubularChart& chart, const Eigen::ArrayXXd& v, int smoothing) {
  Eigen::ArrayXXd cur = v;
  const int nr = chart.n_radial();
  const int ns = chart.n_s;
  for (int pass = 0; pass < smoothing; ++pass) {
    Eigen::ArrayXXd next(nr, ns);
    for (int i = 0; i < nr; ++i) {
      const int ip = i + 1 < nr ? i + 1 : nr - 2;
      const int im = i > 0 ? i - 1 : 1;
      for (int j = 0; j < ns; ++j)
        next(i, j) = (4.0 * cur(i, j) + cur(ip, j) + cur(im, j) + cur(i, (j + 1) % ns) + cur(i, (j + ns - 1) % ns)) / 8.0;
    }
    cur = std::move(next);
  }
  return cur;
}

Eigen::VectorXd PrincipalCoefficients::smoothed_trace(double t) const {
  return surface_semigroup(theta_A.interface_trace(), t, theta_A.chart().R0);
}

Eigen::VectorXd PrincipalCoefficients::l1(double t, const MaterialLaws& laws) const {
  const Eigen::VectorXd u = smoothed_trace(t);
  return u.unaryExpr([&](double th) { return laws.jump_dpsi(th); });
}

Eigen::VectorXd PrincipalCoefficients::gamma1(double t, const MaterialLaws& laws) const {
  if (!undercooling) return Eigen::VectorXd::Zero(theta_A.chart().n_s);
  const Eigen::VectorXd u = smoothed_trace(t);
  return u.unaryExpr([&](double th) { return laws.gamma(th); });
}

PrincipalCoefficients freeze_coefficients(const BulkField& theta0, const MaterialLaws& laws, int smoothing) {
  const TubularChart& c = theta0.chart();
  if (!(theta0.values().minCoeff() > 0.0)) throw FrozenCoefficientError("initial temperature is not positive");
  if (smoothing < 0) throw FrozenCoefficientError("smoothing must be >= 0");
  PrincipalCoefficients co;
  co.theta_A = smoothing == 0 ? theta0 : BulkField(c, smooth_field(c, theta0.values(), smoothing));
  if (!(co.theta_A.values().minCoeff() > 0.0)) throw FrozenCoefficientError("smoothed temperature is not positive");
  for (int b = 0; b < 2; ++b) {
    const Eigen::ArrayXXd blk = co.theta_A.block(b);
    co.kappa_A[b] = blk.unaryExpr([&](double th) { return laws.heat_capacity(b, th); });
    co.d_A[b] = blk.unaryExpr([&](double th) { return laws.conductivity(b, th); });
    if (!(co.kappa_A[b].minCoeff() > 0.0)) throw FrozenCoefficientError("frozen heat capacity not positive");
    if (!(co.d_A[b].minCoeff() > 0.0)) throw FrozenCoefficientError("frozen conductivity not positive");
  }
  const Eigen::VectorXd tr = co.theta_A.interface_trace();
  co.l_A = tr.unaryExpr([&](double th) { return laws.latent_heat(th); });
  co.sigma0 = laws.sigma();
  co.undercooling = laws.has_undercooling();
  if (!co.undercooling) {
    if (!(co.l_A.cwiseAbs().minCoeff() > 1e-8))
      throw FrozenCoefficientError("latent heat of the frozen trace is not bounded away from zero");
  } else {
    const Eigen::VectorXd g = co.gamma1(0.0, laws);
    if (!(g.minCoeff() > 0.0)) throw FrozenCoefficientError("frozen undercooling coefficient not positive");
  }
  return co;
}

namespace {

struct InterfaceGradients {
  Eigen::VectorXd trace, dr[2], dsig;
};

InterfaceGradients interface_gradients(const BulkField& theta) {
  InterfaceGradients g;
  g.trace = theta.interface_trace();
  g.dr[0] = interface_radial_derivative(theta, 0);
  g.dr[1] = interface_radial_derivative(theta, 1);
  g.dsig = ring_derivative(g.trace, theta.chart().ds()) / theta.chart().R0;
  return g;
}

}  // namespace

PerBlock<Eigen::ArrayXXd> F_eval(const State& z, const PrincipalCoefficients& co, const DeformationState& def,
                                 const MFields& m, const MaterialLaws& laws) {
  const TubularChart& c = z.theta.chart();
  const PerBlock<Eigen::ArrayXXd> R = convect_R(z.theta, def);
  PerBlock<Eigen::ArrayXXd> out;
  for (int b = 0; b < 2; ++b) {
    const int i0 = block_begin(c, b);
    const int nb = block_rows(c, b);
    const BlockDerivatives d = block_derivatives(c, b, z.theta.block(b));
    const Eigen::ArrayXXd lap = polar_laplacian(d);
    out[b].resize(nb, c.n_s);
    for (int j = 0; j < c.n_s; ++j) {
      const double s = c.angle(j);
      for (int k = 0; k < nb; ++k) {
        const int i = i0 + k;
        const double th = d.f(k, j);
        const double kap = laws.heat_capacity(b, th);
        const double dc = laws.conductivity(b, th);
        const double ddc = laws.conductivity_derivative(b, th);
        const Eigen::Vector2d g = cartesian_gradient(d, k, j, s);
        double f = (co.kappa_A[b](k, j) - kap) * z.dtheta(i, j) + (dc - co.d_A[b](k, j)) * lap(k, j);
        if (def.zeta[i] != 0.0 || def.dzeta[i] != 0.0) {
          const Eigen::Matrix2d H = cartesian_hessian(d, k, j, s);
          const Eigen::Matrix2d K = Eigen::Matrix2d::Identity() - m.M1.at(i, j);
          f += -dc * (m.M2.at(i, j).array() * H.array()).sum() + ddc * (K * g).squaredNorm() -
               dc * m.M3[b].at(k, j).dot(g) + kap * R[b](k, j);
        } else {
          f += ddc * g.squaredNorm();
        }
        out[b](k, j) = f;
      }
    }
  }
  return out;
}

PerBlock<Eigen::ArrayXXd> F_eval(const State& z, const PrincipalCoefficients& co, const MaterialLaws& laws) {
  const DeformationState def = upsilon(z.theta.chart(), z.h, z.dth);
  return F_eval(z, co, def, m2_m3_m4(def, z.h), laws);
}

Eigen::VectorXd G_eval(const State& z, const PrincipalCoefficients& co, const MaterialLaws& laws, double t) {
  const Eigen::VectorXd tr = z.theta.interface_trace();
  const Eigen::VectorXd H = mean_curvature(z.h);
  const Eigen::VectorXd be = beta(z.h);
  const Eigen::VectorXd l1 = co.l1(t, laws);
  const Eigen::VectorXd g1 = co.gamma1(t, laws);
  const double R0 = z.h.R0();
  Eigen::VectorXd G(tr.size());
  for (Eigen::Index j = 0; j < tr.size(); ++j) {
    const double lap_h = z.h.dss()[j] / (R0 * R0);
    G[j] = -(laws.jump_psi(tr[j]) + laws.sigma() * H[j]) + l1[j] * tr[j] + co.sigma0 * lap_h +
           (laws.gamma(tr[j]) * be[j] - g1[j]) * z.dth[j];
  }
  return G;
}

Eigen::VectorXd Q_eval(const State& z, const PrincipalCoefficients& co, const MaterialLaws& laws,
                       const std::vector<Eigen::Matrix2d>& M4) {
  const TubularChart& c = z.theta.chart();
  const InterfaceGradients ig = interface_gradients(z.theta);
  const Eigen::VectorXd be = beta(z.h);
  const Eigen::VectorXd hsig = z.h.ds() / c.R0;
  Eigen::VectorXd Q(c.n_s);
  for (int j = 0; j < c.n_s; ++j) {
    const double th = ig.trace[j];
    const double d1 = laws.conductivity(0, th), d2 = laws.conductivity(1, th);
    const double dA1 = co.d_A[0](c.n_r1, j), dA2 = co.d_A[1](0, j);
    const Eigen::Matrix2d P = polar_frame(c.angle(j));
    const Eigen::Vector2d jump = P * Eigen::Vector2d(d2 * ig.dr[1][j] - d1 * ig.dr[0][j], (d2 - d1) * ig.dsig[j]);
    const Eigen::Vector2d grad_h = hsig[j] * P.col(1);
    const double v = z.dth[j];
    Q[j] = (d2 - dA2) * ig.dr[1][j] - (d1 - dA1) * ig.dr[0][j] + (co.l_A[j] - laws.latent_heat(th)) * v -
           jump.dot(M4[j] * grad_h) + laws.gamma(th) * be[j] * v * v;
  }
  return Q;
}

Eigen::VectorXd Q_eval(const State& z, const PrincipalCoefficients& co, const MaterialLaws& laws) {
  const DeformationState def = upsilon(z.theta.chart(), z.h);
  return Q_eval(z, co, laws, m2_m3_m4(def, z.h).M4);
}

Stepper::Stepper(MaterialLaws laws, PrincipalCoefficients coeffs, double dt, StepOptions options)
    : laws_(std::move(laws)), co_(std::move(coeffs)), dt_(dt), opt_(options) {
  if (!(dt_ > 0.0)) throw DomainError("time step must be positive");
  if (opt_.inner_iters < 1) throw DomainError("inner_iters must be >= 1");
  const TubularChart& c = co_.theta_A.chart();
  D2_ = PeriodicSpectral(c.n_s).derivative_matrix(2) / (c.R0 * c.R0);
}

void Stepper::factor(double t_new) {
  const Eigen::VectorXd l1 = co_.l1(t_new, laws_);
  const Eigen::VectorXd g1 = co_.gamma1(t_new, laws_);
  if (lu_ && l1 == l1_ && g1 == gamma1_) return;
  l1_ = l1;
  gamma1_ = g1;
  const TubularChart& c = co_.theta_A.chart();
  const int ns = c.n_s, nr = c.n_radial(), is = c.interface_row();
  const int ntheta = nr * ns;
  auto id = [ns](int i, int j) { return i * ns + ((j % ns) + ns) % ns; };
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(ntheta) * 6 + static_cast<std::size_t>(ns) * (ns + 8));
  const double ds = c.ds();
  for (int j = 0; j < ns; ++j) {
    {
      const double h = c.dr1();
      const int row = id(0, j);
      trip.emplace_back(row, id(0, j), -3.0 / (2 * h));
      trip.emplace_back(row, id(1, j), 4.0 / (2 * h));
      trip.emplace_back(row, id(2, j), -1.0 / (2 * h));
    }
    {
      const double h = c.dr2();
      const int e = nr - 1;
      const int row = id(e, j);
      trip.emplace_back(row, id(e, j), 3.0 / (2 * h));
      trip.emplace_back(row, id(e - 1, j), -4.0 / (2 * h));
      trip.emplace_back(row, id(e - 2, j), 1.0 / (2 * h));
    }
    for (int i = 1; i < nr - 1; ++i) {
      if (i == is) continue;
      const int b = i < is ? 0 : 1;
      const int k = i - block_begin(c, b);
      const double h = block_spacing(c, b);
      const double rho = c.rho(i);
      const double kA = co_.kappa_A[b](k, j), dA = co_.d_A[b](k, j);
      const int row = id(i, j);
      trip.emplace_back(row, row, kA / dt_ + dA * (2.0 / (h * h) + 2.0 / (rho * rho * ds * ds)));
      trip.emplace_back(row, id(i + 1, j), -dA * (1.0 / (h * h) + 1.0 / (2 * h * rho)));
      trip.emplace_back(row, id(i - 1, j), -dA * (1.0 / (h * h) - 1.0 / (2 * h * rho)));
      trip.emplace_back(row, id(i, j + 1), -dA / (rho * rho * ds * ds));
      trip.emplace_back(row, id(i, j - 1), -dA / (rho * rho * ds * ds));
    }
    // Gibbs-Thomson row on the theta trace slot.
    const int grow = id(is, j);
    trip.emplace_back(grow, grow, l1_[j]);
    for (int m = 0; m < ns; ++m) {
      double v = co_.sigma0 * D2_(j, m);
      if (m == j) v -= gamma1_[j] / dt_;
      if (v != 0.0) trip.emplace_back(grow, ntheta + m, v);
    }
    // Stefan row on the h slot.
    const int qrow = ntheta + j;
    const double dA1 = co_.d_A[0](c.n_r1, j), dA2 = co_.d_A[1](0, j);
    const double h1 = c.dr1(), h2 = c.dr2();
    trip.emplace_back(qrow, ntheta + j, co_.l_A[j] / dt_);
    trip.emplace_back(qrow, id(is, j), -dA2 * (-3.0 / (2 * h2)) + dA1 * (3.0 / (2 * h1)));
    trip.emplace_back(qrow, id(is + 1, j), -dA2 * (4.0 / (2 * h2)));
    trip.emplace_back(qrow, id(is + 2, j), -dA2 * (-1.0 / (2 * h2)));
    trip.emplace_back(qrow, id(is - 1, j), dA1 * (-4.0 / (2 * h1)));
    trip.emplace_back(qrow, id(is - 2, j), dA1 * (1.0 / (2 * h1)));
  }
  Eigen::SparseMatrix<double> A(ntheta + ns, ntheta + ns);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  lu_->analyzePattern(A);
  lu_->factorize(A);
  if (lu_->info() != Eigen::Success) {
    lu_.reset();
    throw StepFailure("principal linear system is singular: " + std::string("sparse LU factorization failed"));
  }
}

State Stepper::advance(const State& z, const Sources* sources, StepReport* report) {
  const TubularChart& c = z.theta.chart();
  const int ns = c.n_s, nr = c.n_radial(), is = c.interface_row();
  const int ntheta = nr * ns;
  const double t_new = z.t + dt_;
  factor(t_new);

  PerBlock<Eigen::ArrayXXd> fsrc;
  Eigen::VectorXd gsrc = Eigen::VectorXd::Zero(ns), qsrc = Eigen::VectorXd::Zero(ns);
  if (sources) {
    if (sources->f) fsrc = sources->f(t_new);
    if (sources->g) gsrc = sources->g(t_new);
    if (sources->q) qsrc = sources->q(t_new);
  }

  State it = z;
  StepReport rep;
  for (int k = 0; k < opt_.inner_iters; ++k) {
    const DeformationState def = upsilon(c, it.h, it.dth);
    const MFields m = m2_m3_m4(def, it.h);
    const PerBlock<Eigen::ArrayXXd> F = F_eval(it, co_, def, m, laws_);
    const Eigen::VectorXd G = G_eval(it, co_, laws_, t_new);
    const Eigen::VectorXd Q = Q_eval(it, co_, laws_, m.M4);

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ntheta + ns);
    for (int i = 1; i < nr - 1; ++i) {
      if (i == is) continue;
      const int b = i < is ? 0 : 1;
      const int kk = i - block_begin(c, b);
      for (int j = 0; j < ns; ++j) {
        double v = co_.kappa_A[b](kk, j) / dt_ * z.theta(i, j) + F[b](kk, j);
        if (sources && sources->f) v += fsrc[b](kk, j);
        rhs[i * ns + j] = v;
      }
    }
    for (int j = 0; j < ns; ++j) {
      rhs[is * ns + j] = G[j] + gsrc[j] - gamma1_[j] / dt_ * z.h[j];
      rhs[ntheta + j] = Q[j] + qsrc[j] + co_.l_A[j] / dt_ * z.h[j];
    }
    const Eigen::VectorXd x = lu_->solve(rhs);
    if (!x.allFinite()) throw StepFailure("linear solve produced non-finite values");

    Eigen::ArrayXXd th(nr, ns);
    for (int i = 0; i < nr; ++i) th.row(i) = x.segment(i * ns, ns).transpose().array();
    const Eigen::VectorXd hn = x.tail(ns);
    const double res = std::max((th - it.theta.values()).abs().maxCoeff(), (hn - it.h.values()).cwiseAbs().maxCoeff());
    it.theta = BulkField(c, th);
    it.h = HeightField(hn, c.R0);
    it.dth = (hn - z.h.values()) / dt_;
    rep.res_inner = res;
    rep.iterations = k + 1;
    if (res < opt_.tolerance) break;
  }

  it.theta.check_positive();
  check_height_invariants(it.h, c.a);
  upsilon(c, it.h);
  it.dtheta = (it.theta.values() - z.theta.values()) / dt_;
  it.t = t_new;
  if (report) *report = rep;
  return it;
}

State advance(const State& z, const PrincipalCoefficients& co, const MaterialLaws& laws, double dt, int inner_iters) {
  StepOptions opt;
  opt.inner_iters = inner_iters;
  Stepper st(laws, co, dt, opt);
  return st.advance(z);
}

namespace {

// [[d grad theta]] on Sigma in Cartesian components, per angular node.
std::vector<Eigen::Vector2d> flux_jump_vectors(const TubularChart& c, const InterfaceGradients& ig,
                                               const MaterialLaws& laws) {
  std::vector<Eigen::Vector2d> out(c.n_s);
  for (int j = 0; j < c.n_s; ++j) {
    const double th = ig.trace[j];
    const double d1 = laws.conductivity(0, th), d2 = laws.conductivity(1, th);
    out[j] = polar_frame(c.angle(j)) * Eigen::Vector2d(d2 * ig.dr[1][j] - d1 * ig.dr[0][j], (d2 - d1) * ig.dsig[j]);
  }
  return out;
}

}  // namespace

Eigen::VectorXd initial_velocity(const BulkField& theta0, const HeightField& h0, const MaterialLaws& laws) {
  const TubularChart& c = theta0.chart();
  const Eigen::VectorXd tr = theta0.interface_trace();
  Eigen::VectorXd v(c.n_s);
  if (laws.has_undercooling()) {
    const Eigen::VectorXd H = mean_curvature(h0);
    const Eigen::VectorXd be = beta(h0);
    for (int j = 0; j < c.n_s; ++j)
      v[j] = (laws.jump_psi(tr[j]) + laws.sigma() * H[j]) / (be[j] * laws.gamma(tr[j]));
    return v;
  }
  const InterfaceGradients ig = interface_gradients(theta0);
  const std::vector<Eigen::Vector2d> jump = flux_jump_vectors(c, ig, laws);
  const DeformationState def = upsilon(c, h0);
  const std::vector<Eigen::Matrix2d> M4 = m2_m3_m4(def, h0).M4;
  const Eigen::VectorXd hsig = h0.ds() / c.R0;
  for (int j = 0; j < c.n_s; ++j) {
    const double l = laws.latent_heat(tr[j]);
    if (!(std::abs(l) > 1e-12)) {
      std::ostringstream msg;
      msg << "latent heat vanishes on Sigma at node " << j << " (l = " << l << ")";
      throw WellPosednessError(msg.str());
    }
    const double th = tr[j];
    const double normal_jump = laws.conductivity(1, th) * ig.dr[1][j] - laws.conductivity(0, th) * ig.dr[0][j];
    const Eigen::Vector2d grad_h = hsig[j] * polar_frame(c.angle(j)).col(1);
    v[j] = (normal_jump - jump[j].dot(M4[j] * grad_h)) / l;
  }
  return v;
}

bool CompatibilityReport::passed() const {
  for (const auto& c : conditions)
    if (!c.pass) return false;
  return true;
}

const ConditionResult* CompatibilityReport::find(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<std::string> CompatibilityReport::failed() const {
  std::vector<std::string> out;
  for (const auto& c : conditions)
    if (!c.pass) out.push_back(c.name);
  return out;
}

CompatibilityReport check_compatibility(const BulkField& theta0, const HeightField& h0, const MaterialLaws& laws,
                                        double tolerance) {
  const TubularChart& c = theta0.chart();
  const auto& v = theta0.values();
  const int e = c.n_radial() - 1;
  CompatibilityReport rep;
  rep.tolerance = tolerance;

  const Eigen::ArrayXd inner = (-3.0 * v.row(0) + 4.0 * v.row(1) - v.row(2)).transpose() / (2.0 * c.dr1());
  const Eigen::ArrayXd outer = (3.0 * v.row(e) - 4.0 * v.row(e - 1) + v.row(e - 2)).transpose() / (2.0 * c.dr2());
  const double neumann = std::max(inner.abs().maxCoeff(), outer.abs().maxCoeff());
  rep.conditions.push_back({"neumann", neumann, neumann <= tolerance});

  const Eigen::VectorXd tr = theta0.interface_trace();
  const Eigen::VectorXd H = mean_curvature(h0);
  Eigen::VectorXd gt(c.n_s), l(c.n_s);
  for (int j = 0; j < c.n_s; ++j) {
    gt[j] = laws.jump_psi(tr[j]) + laws.sigma() * H[j];
    l[j] = laws.latent_heat(tr[j]);
  }
  rep.min_abs_latent_heat = l.cwiseAbs().minCoeff();

  const DeformationState def = upsilon(c, h0);
  const Eigen::VectorXd flux_jump = -transform_B(theta0, def, laws, h0);

  if (!laws.has_undercooling()) {
    const double r = gt.cwiseAbs().maxCoeff();
    rep.conditions.push_back({"gibbs_thomson", r, r <= tolerance});
    const bool sign_change = l.maxCoeff() > 0.0 && l.minCoeff() < 0.0;
    rep.conditions.push_back(
        {"latent_heat", rep.min_abs_latent_heat, rep.min_abs_latent_heat > tolerance && !sign_change});
  } else {
    double r = 0.0;
    for (int j = 0; j < c.n_s; ++j)
      r = std::max(r, std::abs(gt[j] * (l[j] - gt[j]) - laws.gamma(tr[j]) * flux_jump[j]));
    rep.conditions.push_back({"undercooling_compat", r, r <= tolerance});
  }

  Eigen::FFT<double> fft;
  Eigen::VectorXcd spec;
  Eigen::VectorXd fj = flux_jump;
  fft.fwd(spec, fj);
  double total = 0.0, tail = 0.0;
  for (int m = 1; m < c.n_s; ++m) {
    const int k = std::abs(m <= c.n_s / 2 ? m : m - c.n_s);
    const double p = std::norm(spec[m]);
    total += p;
    if (k > c.n_s / 4) tail += p;
  }
  rep.flux_jump_tail = total > 0.0 ? tail / total : 0.0;
  return rep;
}

Diagnostics diagnostics(const State& z, const MaterialLaws& laws) {
  const TubularChart& c = z.theta.chart();
  const CutoffProfile zeta = CutoffProfile::zeta(c.a);
  Diagnostics d;
  d.t = z.t;
  d.R_mean = c.R0 + z.h.values().mean();
  d.h_min = z.h.values().minCoeff();
  d.h_max = z.h.values().maxCoeff();
  d.interface_length = interface_length(z.h);
  const Eigen::VectorXd be = beta(z.h);
  d.V_max = (be.array() * z.dth.array()).abs().maxCoeff();
  double E = 0.0, S = 0.0;
  const double ds = c.ds();
  for (int b = 0; b < 2; ++b) {
    const int i0 = block_begin(c, b);
    const int nb = block_rows(c, b);
    const double dr = block_spacing(c, b);
    for (int k = 0; k < nb; ++k) {
      const int i = i0 + k;
      const double rho = c.rho(i);
      const double r = rho - c.R0;
      const double zv = zeta.value(r), dz = zeta.derivative(r);
      const double w = (k == 0 || k == nb - 1 ? 0.5 : 1.0) * dr * ds;
      for (int j = 0; j < c.n_s; ++j) {
        const double jac = rho * (1.0 + dz * z.h[j]) * (1.0 + zv * z.h[j] / rho);
        const double th = z.theta(i, j);
        E += w * jac * laws.energy(b, th);
        S += w * jac * laws.entropy(b, th);
      }
    }
  }
  d.E_total = E + laws.sigma() * d.interface_length;
  d.S_total = S;
  return d;
}

}  // namespace stefan
