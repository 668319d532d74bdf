#pragma once

#include <cstdint>

#include "stefan/stepper.hpp"

namespace stefan {

struct InitialData {
  BulkField theta;
  HeightField h;
};

// Root of [[psi(theta)]] = sigma / R on the working range of the laws.
double equilibrium_temperature(const MaterialLaws& laws, double R);

InitialData equilibrium_data(const TubularChart& chart, const MaterialLaws& laws);

// h0 = amplitude cos(mode s + phase) with the phase drawn from seed; theta0 is constant along
// rays and solves the Gibbs-Thomson relation pointwise on the perturbed interface.
InitialData perturbed_circle_data(const TubularChart& chart, const MaterialLaws& laws, double amplitude, int mode,
                                  std::uint64_t seed);

// Radially symmetric start: theta*(R0) in the inner phase, theta*(R0) + delta * smoothstep(x / ramp) in the
// outer phase with x = (r - R0)/(R_out - R0). Exactly constant near R0 and near the outer wall, so the
// discrete Neumann and flux conditions hold to rounding.
struct RadialMeltProfile {
  double theta_star = 1.0;
  double delta = 0.0;
  double R0 = 1.0;
  double R_out = 2.0;
  double ramp = 0.75;
  double operator()(double r) const;
};

RadialMeltProfile radial_melt_profile(const TubularChart& chart, const MaterialLaws& laws, double delta);
InitialData radial_melt_data(const TubularChart& chart, const MaterialLaws& laws, double delta);

}  // namespace stefan
