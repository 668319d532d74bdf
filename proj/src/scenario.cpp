#include "stefan/scenario.hpp"

#include <numbers>
#include <random>

namespace stefan {

double equilibrium_temperature(const MaterialLaws& laws, double R) {
  return jump_psi_root(laws, laws.sigma() / R, laws.theta_lo(), laws.theta_hi());
}

InitialData equilibrium_data(const TubularChart& chart, const MaterialLaws& laws) {
  const double ts = equilibrium_temperature(laws, chart.R0);
  return {BulkField::constant(chart, ts), HeightField::constant(chart.n_s, 0.0, chart.R0)};
}

InitialData perturbed_circle_data(const TubularChart& chart, const MaterialLaws& laws, double amplitude, int mode,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double phase = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
  Eigen::VectorXd hv(chart.n_s);
  for (int j = 0; j < chart.n_s; ++j) hv[j] = amplitude * std::cos(mode * chart.angle(j) + phase);
  HeightField h(hv, chart.R0);
  const Eigen::VectorXd H = mean_curvature(h);
  Eigen::ArrayXXd v(chart.n_radial(), chart.n_s);
  for (int j = 0; j < chart.n_s; ++j) {
    const double ts = jump_psi_root(laws, -laws.sigma() * H[j], laws.theta_lo(), laws.theta_hi());
    v.col(j).setConstant(ts);
  }
  return {BulkField(chart, v), std::move(h)};
}

double RadialMeltProfile::operator()(double r) const {
  if (r <= R0) return theta_star;
  const double x = (r - R0) / (R_out - R0);
  return theta_star + delta * smoothstep(x / ramp);
}

RadialMeltProfile radial_melt_profile(const TubularChart& chart, const MaterialLaws& laws, double delta) {
  return {equilibrium_temperature(laws, chart.R0), delta, chart.R0, chart.R_out, 0.75};
}

InitialData radial_melt_data(const TubularChart& chart, const MaterialLaws& laws, double delta) {
  const RadialMeltProfile p = radial_melt_profile(chart, laws, delta);
  Eigen::ArrayXXd v(chart.n_radial(), chart.n_s);
  for (int i = 0; i < chart.n_radial(); ++i) v.row(i).setConstant(p(chart.rho(i)));
  return {BulkField(chart, v), HeightField::constant(chart.n_s, 0.0, chart.R0)};
}

}  // namespace stefan
