#pragma once

#include "stefan/scenario.hpp"

namespace stefan {

// Smooth exact pair (theta, h) in physical polar coordinates with the forcing that makes it solve
// the transformed system. theta satisfies homogeneous Neumann conditions at R_in and R_out.
class ManufacturedSolution {
 public:
  ManufacturedSolution(const TubularChart& chart, MaterialLaws laws);

  double theta(double t, double r, double s) const;
  double h(double t, double s) const;

  BulkField exact_theta(double t) const;
  HeightField exact_h(double t) const;
  Eigen::VectorXd exact_dth(double t) const;
  State initial_state() const;
  Sources sources() const;

  const TubularChart& chart() const { return chart_; }
  const MaterialLaws& laws() const { return laws_; }

 private:
  struct Derivs {
    double v, t, r, rr, s, ss;
  };
  Derivs theta_derivs(double t, double r, double s) const;
  PerBlock<Eigen::ArrayXXd> bulk_source(double t) const;
  Eigen::VectorXd gibbs_thomson_source(double t) const;
  Eigen::VectorXd stefan_source(double t) const;

  TubularChart chart_;
  MaterialLaws laws_;
};

struct ManufacturedErrors {
  double theta = 0.0;
  double h = 0.0;
};

ManufacturedErrors manufactured_errors(const ManufacturedSolution& ms, const State& z);

// Runs the manufactured problem to t_end with the given step count.
State run_manufactured(const ManufacturedSolution& ms, double t_end, int steps, const StepOptions& opt);

}  // namespace stefan
