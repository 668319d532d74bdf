#include "stefan/manufactured.hpp"

#include <numbers>

namespace stefan {

namespace {
constexpr double pi = std::numbers::pi;
}

ManufacturedSolution::ManufacturedSolution(const TubularChart& chart, MaterialLaws laws)
    : chart_(chart), laws_(std::move(laws)) {}

ManufacturedSolution::Derivs ManufacturedSolution::theta_derivs(double t, double r, double s) const {
  const double L = chart_.R_out - chart_.R_in;
  const double w1 = pi / L, w2 = 2.0 * pi / L;
  const double x = r - chart_.R_in;
  const double c1 = std::cos(w1 * x), s1 = std::sin(w1 * x);
  const double c2 = std::cos(w2 * x), s2 = std::sin(w2 * x);
  const double a = 1.0 + 0.5 * std::sin(2.0 * t), at = std::cos(2.0 * t);
  const double b = 0.05 * std::exp(-t), bt = -b;
  const double cs = std::cos(2.0 * s), ss = std::sin(2.0 * s);
  Derivs d;
  d.v = 1.1 + 0.1 * c1 * a + b * c2 * cs;
  d.t = 0.1 * c1 * at + bt * c2 * cs;
  d.r = -0.1 * w1 * s1 * a - b * w2 * s2 * cs;
  d.rr = -0.1 * w1 * w1 * c1 * a - b * w2 * w2 * c2 * cs;
  d.s = -2.0 * b * c2 * ss;
  d.ss = -4.0 * b * c2 * cs;
  return d;
}

double ManufacturedSolution::theta(double t, double r, double s) const { return theta_derivs(t, r, s).v; }

namespace {

struct HDerivs {
  double v, t, s, ss;
};

HDerivs h_derivs(double t, double s) {
  HDerivs d;
  const double st = std::sin(t), ct = std::cos(t);
  d.v = 0.01 * std::cos(2.0 * s) + 0.03 * st * (1.0 + 0.5 * std::cos(3.0 * s));
  d.t = 0.03 * ct * (1.0 + 0.5 * std::cos(3.0 * s));
  d.s = -0.02 * std::sin(2.0 * s) - 0.045 * st * std::sin(3.0 * s);
  d.ss = -0.04 * std::cos(2.0 * s) - 0.135 * st * std::cos(3.0 * s);
  return d;
}

}  // namespace

double ManufacturedSolution::h(double t, double s) const { return h_derivs(t, s).v; }

BulkField ManufacturedSolution::exact_theta(double t) const {
  const CutoffProfile zeta = CutoffProfile::zeta(chart_.a);
  Eigen::ArrayXXd v(chart_.n_radial(), chart_.n_s);
  for (int j = 0; j < chart_.n_s; ++j) {
    const double s = chart_.angle(j);
    const double hv = h(t, s);
    for (int i = 0; i < chart_.n_radial(); ++i) {
      const double rho = chart_.rho(i);
      v(i, j) = theta(t, rho + zeta.value(rho - chart_.R0) * hv, s);
    }
  }
  return {chart_, v};
}

HeightField ManufacturedSolution::exact_h(double t) const {
  Eigen::VectorXd v(chart_.n_s);
  for (int j = 0; j < chart_.n_s; ++j) v[j] = h(t, chart_.angle(j));
  return {v, chart_.R0};
}

Eigen::VectorXd ManufacturedSolution::exact_dth(double t) const {
  Eigen::VectorXd v(chart_.n_s);
  for (int j = 0; j < chart_.n_s; ++j) v[j] = h_derivs(t, chart_.angle(j)).t;
  return v;
}

State ManufacturedSolution::initial_state() const { return State::initial(exact_theta(0.0), exact_h(0.0), exact_dth(0.0)); }

PerBlock<Eigen::ArrayXXd> ManufacturedSolution::bulk_source(double t) const {
  const CutoffProfile zeta = CutoffProfile::zeta(chart_.a);
  PerBlock<Eigen::ArrayXXd> f;
  for (int b = 0; b < 2; ++b) {
    const int i0 = block_begin(chart_, b);
    const int nb = block_rows(chart_, b);
    f[b].resize(nb, chart_.n_s);
    for (int j = 0; j < chart_.n_s; ++j) {
      const double s = chart_.angle(j);
      const double hv = h(t, s);
      for (int k = 0; k < nb; ++k) {
        const double rho = chart_.rho(i0 + k);
        const double r = rho + zeta.value(rho - chart_.R0) * hv;
        const Derivs d = theta_derivs(t, r, s);
        const double lap = d.rr + d.r / r + d.ss / (r * r);
        const double grad2 = d.r * d.r + d.s * d.s / (r * r);
        f[b](k, j) = laws_.heat_capacity(b, d.v) * d.t - laws_.conductivity(b, d.v) * lap -
                     laws_.conductivity_derivative(b, d.v) * grad2;
      }
    }
  }
  return f;
}

Eigen::VectorXd ManufacturedSolution::gibbs_thomson_source(double t) const {
  Eigen::VectorXd g(chart_.n_s);
  for (int j = 0; j < chart_.n_s; ++j) {
    const double s = chart_.angle(j);
    const HDerivs hd = h_derivs(t, s);
    const double R = chart_.R0 + hd.v;
    const double th = theta(t, R, s);
    const double be = R / std::sqrt(R * R + hd.s * hd.s);
    const double V = be * hd.t;
    g[j] = laws_.jump_psi(th) + laws_.sigma() * polar_curvature(R, hd.s, hd.ss) - laws_.gamma(th) * V;
  }
  return g;
}

Eigen::VectorXd ManufacturedSolution::stefan_source(double t) const {
  Eigen::VectorXd q(chart_.n_s);
  for (int j = 0; j < chart_.n_s; ++j) {
    const double s = chart_.angle(j);
    const HDerivs hd = h_derivs(t, s);
    const double R = chart_.R0 + hd.v;
    const Derivs d = theta_derivs(t, R, s);
    const double norm = std::sqrt(R * R + hd.s * hd.s);
    const double be = R / norm;
    const double V = be * hd.t;
    const double dnu = (R * d.r - hd.s * d.s / R) / norm;
    const double jump = (laws_.conductivity(1, d.v) - laws_.conductivity(0, d.v)) * dnu;
    q[j] = ((laws_.latent_heat(d.v) - laws_.gamma(d.v) * V) * V - jump) / be;
  }
  return q;
}

Sources ManufacturedSolution::sources() const {
  Sources src;
  src.f = [this](double t) { return bulk_source(t); };
  src.g = [this](double t) { return gibbs_thomson_source(t); };
  src.q = [this](double t) { return stefan_source(t); };
  return src;
}

ManufacturedErrors manufactured_errors(const ManufacturedSolution& ms, const State& z) {
  ManufacturedErrors e;
  e.theta = (z.theta.values() - ms.exact_theta(z.t).values()).abs().maxCoeff();
  e.h = (z.h.values() - ms.exact_h(z.t).values()).cwiseAbs().maxCoeff();
  return e;
}

State run_manufactured(const ManufacturedSolution& ms, double t_end, int steps, const StepOptions& opt) {
  const State z0 = ms.initial_state();
  Stepper st(ms.laws(), freeze_coefficients(z0.theta, ms.laws(), 0), t_end / steps, opt);
  const Sources src = ms.sources();
  State z = z0;
  for (int n = 0; n < steps; ++n) z = st.advance(z, &src);
  return z;
}

}  // namespace stefan
