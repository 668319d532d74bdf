#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>

#include "stefan/geometry.hpp"
#include "stefan/interface_calc.hpp"
#include "stefan/materials.hpp"

namespace stefan {

template <typename T>
using PerBlock = std::array<T, 2>;

// Temperature on the two-block polar grid. Row i is radius chart.rho(i), column j is angle s_j.
// Row chart.interface_row() is shared by both blocks, so the trace on Sigma is single-valued.
class BulkField {
 public:
  BulkField() = default;
  BulkField(const TubularChart& chart, Eigen::ArrayXXd values);
  static BulkField constant(const TubularChart& chart, double value);

  const TubularChart& chart() const { return chart_; }
  const Eigen::ArrayXXd& values() const { return values_; }
  Eigen::ArrayXXd& values() { return values_; }
  double operator()(int i, int j) const { return values_(i, j); }

  // Rows of block b including the interface row.
  Eigen::ArrayXXd block(int b) const;
  Eigen::VectorXd interface_trace() const;
  void check_positive() const;

 private:
  TubularChart chart_;
  Eigen::ArrayXXd values_;
};

int block_begin(const TubularChart& chart, int b);
int block_rows(const TubularChart& chart, int b);
double block_spacing(const TubularChart& chart, int b);

enum class AngularStencil { finite_difference, spectral };

// Polar derivatives of a block-local array. Radial stencils are second order and one-sided at the
// block ends; nothing is differenced across Sigma.
struct BlockDerivatives {
  Eigen::VectorXd rho;
  Eigen::ArrayXXd f, f_r, f_rr, f_s, f_ss, f_rs;
};

BlockDerivatives block_derivatives(const TubularChart& chart, int b, const Eigen::ArrayXXd& f,
                                   AngularStencil stencil = AngularStencil::finite_difference);

// d^2/dr^2 + (1/r) d/dr + (1/r^2) d^2/ds^2 assembled from the derivative set.
Eigen::ArrayXXd polar_laplacian(const BlockDerivatives& d);

// Columns r_hat, s_hat.
inline Eigen::Matrix2d polar_frame(double s) {
  Eigen::Matrix2d Q;
  Q << std::cos(s), -std::sin(s), std::sin(s), std::cos(s);
  return Q;
}

Eigen::Vector2d cartesian_gradient(const BlockDerivatives& d, int i, int j, double s);
Eigen::Matrix2d cartesian_hessian(const BlockDerivatives& d, int i, int j, double s);

struct VectorField {
  Eigen::ArrayXXd x, y;
  static VectorField zeros(Eigen::Index rows, Eigen::Index cols);
  Eigen::Vector2d at(Eigen::Index i, Eigen::Index j) const { return {x(i, j), y(i, j)}; }
  void set(Eigen::Index i, Eigen::Index j, const Eigen::Vector2d& v) {
    x(i, j) = v.x();
    y(i, j) = v.y();
  }
};

struct MatrixField {
  Eigen::ArrayXXd xx, xy, yx, yy;
  static MatrixField zeros(Eigen::Index rows, Eigen::Index cols);
  Eigen::Matrix2d at(Eigen::Index i, Eigen::Index j) const {
    Eigen::Matrix2d m;
    m << xx(i, j), xy(i, j), yx(i, j), yy(i, j);
    return m;
  }
  void set(Eigen::Index i, Eigen::Index j, const Eigen::Matrix2d& m) {
    xx(i, j) = m(0, 0);
    xy(i, j) = m(0, 1);
    yx(i, j) = m(1, 0);
    yy(i, j) = m(1, 1);
  }
};

// Upsilon(h) = zeta(r) h(s) r_hat on the full grid; grad(i,j) holds d_i Upsilon_j.
struct DeformationState {
  TubularChart chart;
  Eigen::VectorXd zeta;   // per radial row
  Eigen::VectorXd dzeta;  // per radial row
  VectorField upsilon;
  MatrixField grad;
  std::optional<VectorField> dt_upsilon;
};

DeformationState upsilon(const TubularChart& chart, const HeightField& h,
                         const std::optional<Eigen::VectorXd>& dth = std::nullopt);

// Deformed node positions z + Upsilon(z).
VectorField deformed_nodes(const DeformationState& def);

// Closed-form 2x2 inverse with determinant floor 1e-10.
Eigen::Matrix2d inverse_2x2(const Eigen::Matrix2d& m);

MatrixField m1(const DeformationState& def);

struct MFields {
  MatrixField M1;
  MatrixField M2;
  PerBlock<VectorField> M3;
  std::vector<Eigen::Matrix2d> M4;  // on Sigma, one per angular node
};

MFields m2_m3_m4(const DeformationState& def, const HeightField& h);

// d_k M1_ij per block, index [k][2 i + j].
PerBlock<std::array<std::array<Eigen::ArrayXXd, 4>, 2>> grad_m1(const DeformationState& def, const MatrixField& M1);

PerBlock<Eigen::ArrayXXd> transform_A(const BulkField& theta, const DeformationState& def, const MFields& m,
                                      const MaterialLaws& laws);
PerBlock<Eigen::ArrayXXd> transform_A(const BulkField& theta, const DeformationState& def, const HeightField& h,
                                      const MaterialLaws& laws);

// Second-order central difference of periodic samples.
Eigen::VectorXd ring_derivative(const Eigen::VectorXd& u, double ds);

// One-sided radial derivative on Sigma from block b.
Eigen::VectorXd interface_radial_derivative(const BulkField& theta, int b);

Eigen::VectorXd transform_B(const BulkField& theta, const DeformationState& def, const MaterialLaws& laws,
                            const HeightField& h);

PerBlock<Eigen::ArrayXXd> convect_R(const BulkField& theta, const DeformationState& def);

}  // namespace stefan
