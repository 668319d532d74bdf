#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "stefan/geometry.hpp"

namespace stefan {

// Localized space-time translation in chart coordinates: x is the periodic tangential coordinate,
// y the signed normal distance. Parameters live in the ball of radius r0.
struct ParamDiffeo {
  double x_c = 0.0;
  double y_c = 0.0;
  double eps0 = 0.0;
  double t_c = 0.0;
  double r0 = 0.0;
  double a = 0.0;
  double period = 2.0 * std::numbers::pi;
  CutoffProfile chi_m;
  CutoffProfile chi;
  CutoffProfile varpi;
  CutoffProfile xi_time;

  // r0 defaults to eps0/4.
  static ParamDiffeo make(double x_c, double y_c, double eps0, double a, double t_c);

  void validate() const;

  // x - x_c folded into [-period/2, period/2).
  double offset(double x) const;
  double chi_m_at(double x) const { return chi_m.value(offset(x)); }
  double chi_m_prime(double x) const { return chi_m.derivative(offset(x)); }
  double xi(double t) const { return xi_time.value(t); }
  double xi_prime(double t) const { return xi_time.derivative(t); }
};

Eigen::Vector2d forward(const ParamDiffeo& d, double mu, double eta, const Eigen::Vector2d& p);
Eigen::Vector2d forward_horizontal(const ParamDiffeo& d, double mu, const Eigen::Vector2d& p);
Eigen::Vector2d forward_vertical(const ParamDiffeo& d, double eta, const Eigen::Vector2d& p);
Eigen::Matrix2d forward_jacobian(const ParamDiffeo& d, double mu, double eta, const Eigen::Vector2d& p);
// Newton to residual 1e-13; throws ProbeError after 50 iterations.
Eigen::Vector2d inverse(const ParamDiffeo& d, double mu, double eta, const Eigen::Vector2d& q);
double time_shift(const ParamDiffeo& d, double lambda, double t);

// Periodic uniform x nodes, increasing y nodes, uniform t nodes. Interpolation stencils in y never
// straddle y_break (the interface row) so a kink there does not pollute either side.
struct ProbeGrid {
  int nx = 0;
  double period = 2.0 * std::numbers::pi;
  Eigen::VectorXd y;
  int y_break = -1;
  Eigen::VectorXd t;

  double x(int j) const { return period * j / nx; }
  double dt() const { return t.size() > 1 ? t(1) - t(0) : 0.0; }
  void validate() const;
};

// Angles and normal distances rho(i) - R0 of the polar chart, breaking at the interface row.
ProbeGrid chart_grid(const TubularChart& chart, Eigen::VectorXd t);

// frames[k](i, j) = u(t_k, x_j, y_i). A single y node marks a surface field.
struct SpaceTimeField {
  ProbeGrid grid;
  std::vector<Eigen::ArrayXXd> frames;

  bool surface() const { return grid.y.size() == 1; }
  double interpolate(double t, double x, double y) const;
  double sup_norm() const;
};

template <typename Fn>
SpaceTimeField sample_field(const ProbeGrid& g, Fn&& u) {
  SpaceTimeField f{g, {}};
  for (Eigen::Index k = 0; k < g.t.size(); ++k) {
    Eigen::ArrayXXd a(g.y.size(), g.nx);
    for (Eigen::Index i = 0; i < g.y.size(); ++i)
      for (int j = 0; j < g.nx; ++j) a(i, j) = u(g.t(k), g.x(j), g.y(i));
    f.frames.push_back(std::move(a));
  }
  return f;
}

// u(rho_lambda(t), theta_{xi(t) mu, xi(t) eta}(x, y)); surface fields ignore eta.
SpaceTimeField pullback_spacetime(const ParamDiffeo& d, double lambda, double mu, double eta,
                                  const SpaceTimeField& u);

// Fourth-order time derivative, one-sided at the ends.
SpaceTimeField time_derivative(const SpaceTimeField& u);

SpaceTimeField commutator_B(const ParamDiffeo& d, double lambda, double mu, double eta, const SpaceTimeField& u);

struct CommutatorCheck {
  double b_max = 0.0;
  double b_coarse_max = 0.0;
  // Fine-grid discretization error inferred from the coarse/fine difference at fourth order.
  double error_estimate = 0.0;
};

// Compares B on the given frames against B on every other frame.
CommutatorCheck commutator_check(const ParamDiffeo& d, double lambda, double mu, double eta, const SpaceTimeField& u);

struct NormalDerivativeReport {
  double max_residual = 0.0;
  // False when the vertical bump reaches the interface stencil or varpi is not flat there.
  bool standard_configuration = true;
  std::string note;
};

// One frame of u; the grid must carry an interface row at y = 0.
NormalDerivativeReport normal_derivative_invariance(const ParamDiffeo& d, double mu, double eta,
                                                    const SpaceTimeField& u, int frame = 0);

enum class ParamDirection { lambda, mu, eta };
const char* direction_name(ParamDirection p);

// Central divided difference of the pulled-back field at parameter 0.
SpaceTimeField parameter_derivative(const ParamDiffeo& d, const SpaceTimeField& u, ParamDirection dir, int order,
                                    double step);

struct SmoothnessRow {
  std::string field;
  ParamDirection direction = ParamDirection::lambda;
  int order = 1;
  double sup_norm = 0.0;
};

std::vector<SmoothnessRow> smoothness_probe(const ParamDiffeo& d, const SpaceTimeField& theta,
                                            const SpaceTimeField& h, double step);

struct InvarianceReport {
  int samples = 0;
  int ball_violations = 0;
  int roundtrip_failures = 0;
  double max_roundtrip = 0.0;
  double max_composition = 0.0;
  // max |det J - 1| / |(mu, eta)| over the samples.
  double jacobian_constant = 0.0;
  double min_det = 1.0;
};

bool in_invariance_ball(const ParamDiffeo& d, const Eigen::Vector2d& p);

InvarianceReport invariance_check(const ParamDiffeo& d, int samples, std::uint64_t seed);

}  // namespace stefan
