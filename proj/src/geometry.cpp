#include "stefan/geometry.hpp"

#include <sstream>

#include "stefan/errors.hpp"

namespace stefan {

TubularChart TubularChart::with_defaults(double R0, int n_s, int n_r1, int n_r2) {
  TubularChart c;
  c.R0 = R0;
  c.a = R0 / 2.0;
  c.R_in = R0 / 4.0;
  c.R_out = 2.0 * R0;
  c.n_s = n_s;
  c.n_r1 = n_r1;
  c.n_r2 = n_r2;
  return c;
}

void TubularChart::validate() const {
  std::ostringstream msg;
  if (!(R0 > 0.0)) msg << "R0 > 0 violated; ";
  if (!(a > 0.0)) msg << "a > 0 violated; ";
  if (!(a < R0)) msg << "a < R0 violated; ";
  if (!(R_in > 0.0)) msg << "0 < R_in violated; ";
  if (!(R_in < R0 - a)) msg << "R_in < R0 - a violated; ";
  if (!(R0 + a < R_out)) msg << "R0 + a < R_out violated; ";
  if (n_s < 16 || n_s % 2 != 0) msg << "N_s even and >= 16 violated; ";
  if (n_r1 < 8) msg << "N_r1 >= 8 violated; ";
  if (n_r2 < 8) msg << "N_r2 >= 8 violated; ";
  const std::string s = msg.str();
  if (!s.empty()) throw DomainError("invalid chart: " + s.substr(0, s.size() - 2));
}

double TubularChart::rho(int i) const {
  if (i <= n_r1) return R_in + dr1() * i;
  if (i == n_radial() - 1) return R_out;
  return R0 + dr2() * (i - n_r1);
}

TubularCoords project_and_distance(const TubularChart& chart, const Eigen::Vector2d& z) {
  const double n = z.norm();
  if (!(n > chart.R_in && n < chart.R_out)) {
    std::ostringstream msg;
    msg << "point at radius " << n << " outside annulus (" << chart.R_in << ", " << chart.R_out << ")";
    throw DomainError(msg.str());
  }
  double s = std::atan2(z.y(), z.x());
  if (s < 0.0) s += 2.0 * std::numbers::pi;
  if (s >= 2.0 * std::numbers::pi) s = 0.0;
  return {s, n - chart.R0};
}

Eigen::Vector2d extend(const TubularChart& chart, double s, double r) {
  if (r <= -chart.R0) throw SingularGeometryError("degenerate radius: r <= -R0");
  return extend_unchecked(chart.R0, s, r);
}

double CutoffProfile::derivative(double x) const {
  const double w = support - plateau;
  const double d = std::abs(x - center);
  const double sign = x >= center ? 1.0 : -1.0;
  return -sign * smoothstep_derivative((support - d) / w) / w;
}

double CutoffProfile::second_derivative(double x) const {
  const double w = support - plateau;
  const double d = std::abs(x - center);
  return smoothstep_second_derivative((support - d) / w) / (w * w);
}

double cutoff(const CutoffProfile& profile, double x) { return profile.value(x); }

}  // namespace stefan
