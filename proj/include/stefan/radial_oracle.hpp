#pragma once

#include <Eigen/Core>
#include <functional>
#include <utility>
#include <vector>

#include "stefan/materials.hpp"

namespace stefan {

// Boundary-fitted radial mesh: n1 uniform cells on [R_in, R], n2 on [R, R_out].
struct RadialGrid {
  double R_in = 0.25;
  double R_out = 2.0;
  int n1 = 64;
  int n2 = 64;
};

struct RadialState {
  double R = 1.0;
  Eigen::VectorXd theta1;  // n1 + 1 nodes, last one on the interface
  Eigen::VectorXd theta2;  // n2 + 1 nodes, first one on the interface
  double t = 0.0;
};

RadialState radial_initial(const RadialGrid& grid, double R, const std::function<double(double)>& theta0);

struct RadialSample {
  double t = 0.0;
  double R = 0.0;
  double E_total = 0.0;
  double S_total = 0.0;
};

// Energy and entropy of the rotationally symmetric configuration (per full turn, trapezoid in r).
RadialSample radial_sample(const MaterialLaws& laws, const RadialGrid& grid, const RadialState& z);

struct RadialOptions {
  double newton_tol = 1e-12;
  int max_newton = 30;
};

// One backward-Euler step of the front-tracking scheme; Newton with a column-coloured difference Jacobian.
RadialState radial_step(const MaterialLaws& laws, const RadialGrid& grid, const RadialState& z, double dt,
                        const RadialOptions& opt = {});

struct RadialTrajectory {
  std::vector<RadialSample> samples;
  RadialState final_state;
};

RadialTrajectory solve_radial(const MaterialLaws& laws, const RadialGrid& grid, const RadialState& initial, double dt,
                              double horizon, const RadialOptions& opt = {});

// max_t |R_main(t) - R_oracle(t)| / R_oracle(t); oracle radius is linearly interpolated in time.
double compare(const std::vector<std::pair<double, double>>& main_radius, const RadialTrajectory& oracle);

}  // namespace stefan
