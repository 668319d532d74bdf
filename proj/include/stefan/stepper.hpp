#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "stefan/hanzawa_ops.hpp"

namespace stefan {

struct State {
  BulkField theta;
  HeightField h;
  Eigen::VectorXd dth;
  // Backward difference of theta over the last accepted step; zero before the first step.
  Eigen::ArrayXXd dtheta;
  double t = 0.0;

  static State initial(BulkField theta, HeightField h, Eigen::VectorXd dth);
};

struct PrincipalCoefficients {
  BulkField theta_A;
  PerBlock<Eigen::ArrayXXd> kappa_A;
  PerBlock<Eigen::ArrayXXd> d_A;
  Eigen::VectorXd l_A;
  double sigma0 = 0.0;
  bool undercooling = false;

  Eigen::VectorXd smoothed_trace(double t) const;
  Eigen::VectorXd l1(double t, const MaterialLaws& laws) const;
  Eigen::VectorXd gamma1(double t, const MaterialLaws& laws) const;
};

// Applies `smoothing` passes of a 5-point average (weights 4,1,1,1,1 over 8) with mirrored radial ends.
Eigen::ArrayXXd smooth_field(const TubularChart& chart, const Eigen::ArrayXXd& v, int smoothing);

PrincipalCoefficients freeze_coefficients(const BulkField& theta0, const MaterialLaws& laws, int smoothing);

PerBlock<Eigen::ArrayXXd> F_eval(const State& z, const PrincipalCoefficients& co, const DeformationState& def,
                                 const MFields& m, const MaterialLaws& laws);
PerBlock<Eigen::ArrayXXd> F_eval(const State& z, const PrincipalCoefficients& co, const MaterialLaws& laws);

Eigen::VectorXd G_eval(const State& z, const PrincipalCoefficients& co, const MaterialLaws& laws, double t);

Eigen::VectorXd Q_eval(const State& z, const PrincipalCoefficients& co, const MaterialLaws& laws,
                       const std::vector<Eigen::Matrix2d>& M4);
Eigen::VectorXd Q_eval(const State& z, const PrincipalCoefficients& co, const MaterialLaws& laws);

// Optional forcing added to the bulk, Gibbs-Thomson and Stefan rows, evaluated at the new time level.
struct Sources {
  std::function<PerBlock<Eigen::ArrayXXd>(double)> f;
  std::function<Eigen::VectorXd(double)> g;
  std::function<Eigen::VectorXd(double)> q;
};

struct StepOptions {
  int inner_iters = 2;
  double tolerance = 1e-10;
};

struct StepReport {
  double res_inner = 0.0;
  int iterations = 0;
};

class Stepper {
 public:
  Stepper(MaterialLaws laws, PrincipalCoefficients coeffs, double dt, StepOptions options = {});

  State advance(const State& z, const Sources* sources = nullptr, StepReport* report = nullptr);

  const PrincipalCoefficients& coefficients() const { return co_; }
  double dt() const { return dt_; }

 private:
  void factor(double t_new);

  MaterialLaws laws_;
  PrincipalCoefficients co_;
  double dt_;
  StepOptions opt_;
  Eigen::MatrixXd D2_;
  Eigen::VectorXd l1_, gamma1_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

State advance(const State& z, const PrincipalCoefficients& co, const MaterialLaws& laws, double dt, int inner_iters);

Eigen::VectorXd initial_velocity(const BulkField& theta0, const HeightField& h0, const MaterialLaws& laws);

struct ConditionResult {
  std::string name;
  double residual = 0.0;
  bool pass = true;
};

struct CompatibilityReport {
  std::vector<ConditionResult> conditions;
  double min_abs_latent_heat = 0.0;
  // Share of flux-jump spectral energy in the upper half of the resolved modes; reported only.
  double flux_jump_tail = 0.0;
  double tolerance = 0.0;

  bool passed() const;
  const ConditionResult* find(const std::string& name) const;
  std::vector<std::string> failed() const;
};

CompatibilityReport check_compatibility(const BulkField& theta0, const HeightField& h0, const MaterialLaws& laws,
                                        double tolerance = 1e-10);

struct Diagnostics {
  double t = 0.0;
  double R_mean = 0.0;
  double h_min = 0.0;
  double h_max = 0.0;
  double E_total = 0.0;
  double S_total = 0.0;
  double interface_length = 0.0;
  double V_max = 0.0;
};

Diagnostics diagnostics(const State& z, const MaterialLaws& laws);

}  // namespace stefan
