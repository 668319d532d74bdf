#include "stefan/hanzawa_ops.hpp"

#include <Eigen/LU>
#include <sstream>

#include "stefan/errors.hpp"
#include "stefan/spectral.hpp"

namespace stefan {

BulkField::BulkField(const TubularChart& chart, Eigen::ArrayXXd values) : chart_(chart), values_(std::move(values)) {
  if (values_.rows() != chart_.n_radial() || values_.cols() != chart_.n_s)
    throw DomainError("bulk field shape does not match chart");
}

BulkField BulkField::constant(const TubularChart& chart, double value) {
  return {chart, Eigen::ArrayXXd::Constant(chart.n_radial(), chart.n_s, value)};
}

Eigen::ArrayXXd BulkField::block(int b) const {
  return values_.middleRows(block_begin(chart_, b), block_rows(chart_, b));
}

Eigen::VectorXd BulkField::interface_trace() const { return values_.row(chart_.interface_row()).transpose(); }

void BulkField::check_positive() const {
  Eigen::Index i, j;
  const double mn = values_.minCoeff(&i, &j);
  if (!(mn > 0.0)) {
    std::ostringstream msg;
    msg << "temperature not positive: " << mn << " at node (" << i << ", " << j << ")";
    throw HaltError(msg.str());
  }
}

int block_begin(const TubularChart& chart, int b) { return b == 0 ? 0 : chart.n_r1; }
int block_rows(const TubularChart& chart, int b) { return (b == 0 ? chart.n_r1 : chart.n_r2) + 1; }
double block_spacing(const TubularChart& chart, int b) { return b == 0 ? chart.dr1() : chart.dr2(); }

namespace {

Eigen::ArrayXXd angular(const Eigen::ArrayXXd& f, int order, double ds, AngularStencil stencil) {
  const Eigen::Index n = f.cols();
  if (stencil == AngularStencil::spectral)
    return PeriodicSpectral(static_cast<int>(n)).derivative_rows(f.matrix(), order).array();
  Eigen::ArrayXXd out(f.rows(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index jp = (j + 1) % n;
    const Eigen::Index jm = (j + n - 1) % n;
    if (order == 1)
      out.col(j) = (f.col(jp) - f.col(jm)) / (2.0 * ds);
    else
      out.col(j) = (f.col(jp) - 2.0 * f.col(j) + f.col(jm)) / (ds * ds);
  }
  return out;
}

}  // namespace

BlockDerivatives block_derivatives(const TubularChart& chart, int b, const Eigen::ArrayXXd& f,
                                   AngularStencil stencil) {
  const Eigen::Index nb = f.rows();
  const double h = block_spacing(chart, b);
  BlockDerivatives d;
  d.rho.resize(nb);
  const int i0 = block_begin(chart, b);
  for (Eigen::Index k = 0; k < nb; ++k) d.rho[k] = chart.rho(i0 + static_cast<int>(k));
  d.f = f;
  d.f_r.resize(nb, f.cols());
  d.f_rr.resize(nb, f.cols());
  for (Eigen::Index k = 1; k + 1 < nb; ++k) {
    d.f_r.row(k) = (f.row(k + 1) - f.row(k - 1)) / (2.0 * h);
    d.f_rr.row(k) = (f.row(k + 1) - 2.0 * f.row(k) + f.row(k - 1)) / (h * h);
  }
  const Eigen::Index e = nb - 1;
  d.f_r.row(0) = (-3.0 * f.row(0) + 4.0 * f.row(1) - f.row(2)) / (2.0 * h);
  d.f_r.row(e) = (3.0 * f.row(e) - 4.0 * f.row(e - 1) + f.row(e - 2)) / (2.0 * h);
  d.f_rr.row(0) = (2.0 * f.row(0) - 5.0 * f.row(1) + 4.0 * f.row(2) - f.row(3)) / (h * h);
  d.f_rr.row(e) = (2.0 * f.row(e) - 5.0 * f.row(e - 1) + 4.0 * f.row(e - 2) - f.row(e - 3)) / (h * h);
  const double ds = chart.ds();
  d.f_s = angular(f, 1, ds, stencil);
  d.f_ss = angular(f, 2, ds, stencil);
  d.f_rs = angular(d.f_r, 1, ds, stencil);
  return d;
}

Eigen::ArrayXXd polar_laplacian(const BlockDerivatives& d) {
  Eigen::ArrayXXd out(d.f.rows(), d.f.cols());
  for (Eigen::Index k = 0; k < d.f.rows(); ++k) {
    const double r = d.rho[k];
    out.row(k) = d.f_rr.row(k) + d.f_r.row(k) / r + d.f_ss.row(k) / (r * r);
  }
  return out;
}

Eigen::Vector2d cartesian_gradient(const BlockDerivatives& d, int i, int j, double s) {
  const double r = d.rho[i];
  return polar_frame(s) * Eigen::Vector2d(d.f_r(i, j), d.f_s(i, j) / r);
}

Eigen::Matrix2d cartesian_hessian(const BlockDerivatives& d, int i, int j, double s) {
  const double r = d.rho[i];
  Eigen::Matrix2d Hp;
  const double hrs = d.f_rs(i, j) / r - d.f_s(i, j) / (r * r);
  Hp << d.f_rr(i, j), hrs, hrs, d.f_ss(i, j) / (r * r) + d.f_r(i, j) / r;
  const Eigen::Matrix2d Q = polar_frame(s);
  return Q * Hp * Q.transpose();
}

VectorField VectorField::zeros(Eigen::Index rows, Eigen::Index cols) {
  return {Eigen::ArrayXXd::Zero(rows, cols), Eigen::ArrayXXd::Zero(rows, cols)};
}

MatrixField MatrixField::zeros(Eigen::Index rows, Eigen::Index cols) {
  const Eigen::ArrayXXd z = Eigen::ArrayXXd::Zero(rows, cols);
  return {z, z, z, z};
}

namespace {

double operator_norm(const Eigen::Matrix2d& m) {
  // Largest singular value of a 2x2 matrix.
  const double a = m.squaredNorm();
  const double det = m.determinant();
  const double disc = std::sqrt(std::max(0.0, a * a - 4.0 * det * det));
  return std::sqrt(0.5 * (a + disc));
}

}  // namespace

DeformationState upsilon(const TubularChart& chart, const HeightField& h, const std::optional<Eigen::VectorXd>& dth) {
  const int nr = chart.n_radial();
  const int ns = chart.n_s;
  if (h.size() != ns) throw DomainError("height field size does not match chart");
  const CutoffProfile zeta = CutoffProfile::zeta(chart.a);
  DeformationState def;
  def.chart = chart;
  def.zeta.resize(nr);
  def.dzeta.resize(nr);
  def.upsilon = VectorField::zeros(nr, ns);
  def.grad = MatrixField::zeros(nr, ns);
  if (dth) def.dt_upsilon = VectorField::zeros(nr, ns);
  for (int i = 0; i < nr; ++i) {
    const double rho = chart.rho(i);
    const double r = rho - chart.R0;
    def.zeta[i] = zeta.value(r);
    def.dzeta[i] = zeta.derivative(r);
  }
  for (int j = 0; j < ns; ++j) {
    const double s = chart.angle(j);
    const Eigen::Matrix2d Q = polar_frame(s);
    const Eigen::Vector2d rhat = Q.col(0);
    for (int i = 0; i < nr; ++i) {
      const double z = def.zeta[i];
      const double dz = def.dzeta[i];
      if (z == 0.0 && dz == 0.0) continue;
      const double rho = chart.rho(i);
      def.upsilon.set(i, j, z * h[j] * rhat);
      Eigen::Matrix2d Gp;
      Gp << dz * h[j], 0.0, z * h.ds()[j] / rho, z * h[j] / rho;
      const Eigen::Matrix2d G = Q * Gp * Q.transpose();
      if (operator_norm(G) >= 1.0) {
        std::ostringstream msg;
        msg << "deformation too large: |grad Upsilon| = " << operator_norm(G) << " at node (" << i << ", " << j
            << ")";
        throw DeformationError(msg.str());
      }
      def.grad.set(i, j, G);
      if (dth) def.dt_upsilon->set(i, j, z * (*dth)[j] * rhat);
    }
  }
  return def;
}

VectorField deformed_nodes(const DeformationState& def) {
  const TubularChart& c = def.chart;
  VectorField out = VectorField::zeros(c.n_radial(), c.n_s);
  for (int i = 0; i < c.n_radial(); ++i)
    for (int j = 0; j < c.n_s; ++j) {
      const Eigen::Vector2d z = extend_unchecked(0.0, c.angle(j), c.rho(i));
      out.set(i, j, z + def.upsilon.at(i, j));
    }
  return out;
}

Eigen::Matrix2d inverse_2x2(const Eigen::Matrix2d& m) {
  const double det = m.determinant();
  if (std::abs(det) < 1e-10) {
    std::ostringstream msg;
    msg << "singular 2x2 matrix, det = " << det;
    throw SingularGeometryError(msg.str());
  }
  Eigen::Matrix2d inv;
  inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return inv / det;
}

MatrixField m1(const DeformationState& def) {
  const Eigen::Index nr = def.grad.xx.rows();
  const Eigen::Index ns = def.grad.xx.cols();
  MatrixField M = MatrixField::zeros(nr, ns);
  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  for (Eigen::Index i = 0; i < nr; ++i) {
    if (def.zeta[i] == 0.0 && def.dzeta[i] == 0.0) continue;
    for (Eigen::Index j = 0; j < ns; ++j) {
      const Eigen::Matrix2d J = I + def.grad.at(i, j).transpose();
      M.set(i, j, I - inverse_2x2(J).transpose());
    }
  }
  return M;
}

PerBlock<std::array<std::array<Eigen::ArrayXXd, 4>, 2>> grad_m1(const DeformationState& def, const MatrixField& M1) {
  const TubularChart& c = def.chart;
  PerBlock<std::array<std::array<Eigen::ArrayXXd, 4>, 2>> out;
  const std::array<const Eigen::ArrayXXd*, 4> comps{&M1.xx, &M1.xy, &M1.yx, &M1.yy};
  for (int b = 0; b < 2; ++b) {
    const int i0 = block_begin(c, b);
    const int nb = block_rows(c, b);
    for (int q = 0; q < 4; ++q) {
      const BlockDerivatives d =
          block_derivatives(c, b, comps[q]->middleRows(i0, nb), AngularStencil::spectral);
      Eigen::ArrayXXd dx(nb, c.n_s), dy(nb, c.n_s);
      for (int j = 0; j < c.n_s; ++j) {
        const double cs = std::cos(c.angle(j));
        const double sn = std::sin(c.angle(j));
        for (int k = 0; k < nb; ++k) {
          dx(k, j) = cs * d.f_r(k, j) - sn / d.rho[k] * d.f_s(k, j);
          dy(k, j) = sn * d.f_r(k, j) + cs / d.rho[k] * d.f_s(k, j);
        }
      }
      out[b][0][q] = std::move(dx);
      out[b][1][q] = std::move(dy);
    }
  }
  return out;
}

MFields m2_m3_m4(const DeformationState& def, const HeightField& h) {
  const TubularChart& c = def.chart;
  MFields m;
  m.M1 = m1(def);
  const Eigen::Index nr = c.n_radial();
  m.M2 = MatrixField::zeros(nr, c.n_s);
  for (Eigen::Index i = 0; i < nr; ++i)
    for (Eigen::Index j = 0; j < c.n_s; ++j) {
      const Eigen::Matrix2d M = m.M1.at(i, j);
      m.M2.set(i, j, M + M.transpose() - M.transpose() * M);
    }
  const auto dM = grad_m1(def, m.M1);
  for (int b = 0; b < 2; ++b) {
    const int i0 = block_begin(c, b);
    const int nb = block_rows(c, b);
    m.M3[b] = VectorField::zeros(nb, c.n_s);
    for (int k = 0; k < nb; ++k)
      for (int j = 0; j < c.n_s; ++j) {
        const Eigen::Matrix2d K = Eigen::Matrix2d::Identity() - m.M1.at(i0 + k, j);
        Eigen::Vector2d v = Eigen::Vector2d::Zero();
        for (int jj = 0; jj < 2; ++jj)
          for (int ii = 0; ii < 2; ++ii)
            for (int kk = 0; kk < 2; ++kk) v[jj] += K(ii, kk) * dM[b][kk][2 * ii + jj](k, j);
        m.M3[b].set(k, j, v);
      }
  }
  m.M4.resize(c.n_s);
  const int is = c.interface_row();
  for (int j = 0; j < c.n_s; ++j)
    m.M4[j] = (Eigen::Matrix2d::Identity() - m.M1.at(is, j)).transpose() * m0(h[j], c.R0);
  return m;
}

PerBlock<Eigen::ArrayXXd> transform_A(const BulkField& theta, const DeformationState& def, const MFields& m,
                                      const MaterialLaws& laws) {
  const TubularChart& c = def.chart;
  PerBlock<Eigen::ArrayXXd> out;
  for (int b = 0; b < 2; ++b) {
    const int i0 = block_begin(c, b);
    const int nb = block_rows(c, b);
    const BlockDerivatives d = block_derivatives(c, b, theta.block(b));
    const Eigen::ArrayXXd lap = polar_laplacian(d);
    out[b].resize(nb, c.n_s);
    for (int j = 0; j < c.n_s; ++j) {
      const double s = c.angle(j);
      for (int k = 0; k < nb; ++k) {
        const double th = d.f(k, j);
        const double dc = laws.conductivity(b, th);
        double a = -dc * lap(k, j);
        const int i = i0 + k;
        if (def.zeta[i] != 0.0 || def.dzeta[i] != 0.0) {
          const Eigen::Vector2d g = cartesian_gradient(d, k, j, s);
          const Eigen::Matrix2d H = cartesian_hessian(d, k, j, s);
          const Eigen::Matrix2d K = Eigen::Matrix2d::Identity() - m.M1.at(i, j);
          a += dc * (m.M2.at(i, j).array() * H.array()).sum();
          a -= laws.conductivity_derivative(b, th) * (K * g).squaredNorm();
          a += dc * m.M3[b].at(k, j).dot(g);
        } else {
          const Eigen::Vector2d g = cartesian_gradient(d, k, j, s);
          a -= laws.conductivity_derivative(b, th) * g.squaredNorm();
        }
        out[b](k, j) = a;
      }
    }
  }
  return out;
}

PerBlock<Eigen::ArrayXXd> transform_A(const BulkField& theta, const DeformationState& def, const HeightField& h,
                                      const MaterialLaws& laws) {
  return transform_A(theta, def, m2_m3_m4(def, h), laws);
}

Eigen::VectorXd interface_radial_derivative(const BulkField& theta, int b) {
  const TubularChart& c = theta.chart();
  const auto& v = theta.values();
  const int is = c.interface_row();
  if (b == 0) {
    const double h = c.dr1();
    return ((3.0 * v.row(is) - 4.0 * v.row(is - 1) + v.row(is - 2)) / (2.0 * h)).transpose();
  }
  const double h = c.dr2();
  return ((-3.0 * v.row(is) + 4.0 * v.row(is + 1) - v.row(is + 2)) / (2.0 * h)).transpose();
}

Eigen::VectorXd ring_derivative(const Eigen::VectorXd& u, double ds) {
  const Eigen::Index n = u.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index j = 0; j < n; ++j) out[j] = (u[(j + 1) % n] - u[(j + n - 1) % n]) / (2.0 * ds);
  return out;
}

Eigen::VectorXd transform_B(const BulkField& theta, const DeformationState& def, const MaterialLaws& laws,
                            const HeightField& h) {
  const TubularChart& c = theta.chart();
  const Eigen::VectorXd tr = theta.interface_trace();
  const Eigen::VectorXd dr1 = interface_radial_derivative(theta, 0);
  const Eigen::VectorXd dr2 = interface_radial_derivative(theta, 1);
  const Eigen::VectorXd dsig = ring_derivative(tr, c.ds()) / c.R0;
  const Eigen::VectorXd al = alpha(h);
  const MatrixField M1 = m1(def);
  const int is = c.interface_row();
  Eigen::VectorXd out(c.n_s);
  for (int j = 0; j < c.n_s; ++j) {
    const Eigen::Matrix2d Q = polar_frame(c.angle(j));
    const double d1 = laws.conductivity(0, tr[j]);
    const double d2 = laws.conductivity(1, tr[j]);
    const Eigen::Vector2d jump = Q * Eigen::Vector2d(d2 * dr2[j] - d1 * dr1[j], (d2 - d1) * dsig[j]);
    const double be = beta_from_alpha(al[j]);
    const Eigen::Matrix2d K = Eigen::Matrix2d::Identity() - M1.at(is, j);
    out[j] = -be * (d2 * dr2[j] - d1 * dr1[j]) + be * jump.dot(K.transpose() * (al[j] * Q.col(1)));
  }
  return out;
}

PerBlock<Eigen::ArrayXXd> convect_R(const BulkField& theta, const DeformationState& def) {
  if (!def.dt_upsilon) throw DomainError("convect_R needs the time derivative of Upsilon");
  const TubularChart& c = def.chart;
  PerBlock<Eigen::ArrayXXd> out;
  for (int b = 0; b < 2; ++b) {
    const int i0 = block_begin(c, b);
    const int nb = block_rows(c, b);
    const BlockDerivatives d = block_derivatives(c, b, theta.block(b));
    out[b] = Eigen::ArrayXXd::Zero(nb, c.n_s);
    for (int k = 0; k < nb; ++k) {
      const int i = i0 + k;
      if (def.zeta[i] == 0.0) continue;
      for (int j = 0; j < c.n_s; ++j) {
        const Eigen::Matrix2d Jinv = inverse_2x2(Eigen::Matrix2d::Identity() + def.grad.at(i, j).transpose());
        out[b](k, j) = cartesian_gradient(d, k, j, c.angle(j)).dot(Jinv * def.dt_upsilon->at(i, j));
      }
    }
  }
  return out;
}

}  // namespace stefan
