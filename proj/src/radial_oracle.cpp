#include "stefan/radial_oracle.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "stefan/errors.hpp"

namespace stefan {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr int kStride = 7;

struct Layout {
  int n1, n2;
  int size() const { return n1 + n2 + 3; }
  int t1(int k) const { return k; }
  int t2(int k) const { return n1 + 1 + k; }
  int R() const { return n1 + n2 + 2; }
};

Eigen::VectorXd pack(const Layout& L, const RadialState& z) {
  Eigen::VectorXd u(L.size());
  u.segment(0, L.n1 + 1) = z.theta1;
  u.segment(L.n1 + 1, L.n2 + 1) = z.theta2;
  u[L.R()] = z.R;
  return u;
}

class Residual {
 public:
  Residual(const MaterialLaws& laws, const RadialGrid& g, const RadialState& old, double dt)
      : laws_(laws), g_(g), L_{g.n1, g.n2}, old_(old), dt_(dt) {}

  const Layout& layout() const { return L_; }

  Eigen::VectorXd operator()(const Eigen::VectorXd& u) const {
    Eigen::VectorXd F(L_.size());
    const double R = u[L_.R()];
    const double V = (R - old_.R) / dt_;
    const double h1 = (R - g_.R_in) / L_.n1, h2 = (g_.R_out - R) / L_.n2;
    auto th1 = [&](int k) { return u[L_.t1(k)]; };
    auto th2 = [&](int k) { return u[L_.t2(k)]; };

    F[L_.t1(0)] = (-3.0 * th1(0) + 4.0 * th1(1) - th1(2)) / (2.0 * h1);
    for (int k = 1; k < L_.n1; ++k) {
      const double r = g_.R_in + k * h1;
      const double w = static_cast<double>(k) / L_.n1 * V;
      F[L_.t1(k)] = bulk(0, r, h1, w, th1(k - 1), th1(k), th1(k + 1), old_.theta1[k]);
    }
    const double tg = th1(L_.n1);
    F[L_.t1(L_.n1)] = laws_.jump_psi(tg) - laws_.sigma() / R - laws_.gamma(tg) * V;
    F[L_.t2(0)] = th1(L_.n1) - th2(0);
    for (int k = 1; k < L_.n2; ++k) {
      const double r = R + k * h2;
      const double w = (1.0 - static_cast<double>(k) / L_.n2) * V;
      F[L_.t2(k)] = bulk(1, r, h2, w, th2(k - 1), th2(k), th2(k + 1), old_.theta2[k]);
    }
    const int e = L_.n2;
    F[L_.t2(e)] = (3.0 * th2(e) - 4.0 * th2(e - 1) + th2(e - 2)) / (2.0 * h2);
    const int n = L_.n1;
    const double dr1 = (3.0 * th1(n) - 4.0 * th1(n - 1) + th1(n - 2)) / (2.0 * h1);
    const double dr2 = (-3.0 * th2(0) + 4.0 * th2(1) - th2(2)) / (2.0 * h2);
    F[L_.R()] = laws_.conductivity(1, tg) * dr2 - laws_.conductivity(0, tg) * dr1 -
                (laws_.latent_heat(tg) - laws_.gamma(tg) * V) * V;
    return F;
  }

  // Unknowns each row reads, apart from R which is handled as a dense column.
  std::vector<int> deps(int row) const {
    const int n = L_.n1;
    if (row == L_.R()) return {n - 2, n - 1, n, n + 1, n + 2, n + 3};
    if (row == L_.t1(0)) return {0, 1, 2};
    if (row == L_.t1(n)) return {n};
    if (row == L_.t2(0)) return {n, n + 1};
    if (row == L_.t2(L_.n2)) return {row - 2, row - 1, row};
    return {row - 1, row, row + 1};
  }

 private:
  double bulk(int b, double r, double h, double w, double tm, double t0, double tp, double told) const {
    const double dm = laws_.conductivity(b, 0.5 * (tm + t0)), dp = laws_.conductivity(b, 0.5 * (t0 + tp));
    const double flux = ((r + 0.5 * h) * dp * (tp - t0) - (r - 0.5 * h) * dm * (t0 - tm)) / (r * h * h);
    return laws_.heat_capacity(b, t0) * ((t0 - told) / dt_ - w * (tp - tm) / (2.0 * h)) - flux;
  }

  const MaterialLaws& laws_;
  const RadialGrid& g_;
  Layout L_;
  const RadialState& old_;
  double dt_;
};

Eigen::SparseMatrix<double> jacobian(const Residual& res, const Eigen::VectorXd& u, const Eigen::VectorXd& F0) {
  const Layout& L = res.layout();
  const int n = L.size();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 5);
  const double eps = 1e-7;
  for (int g = 0; g < kStride; ++g) {
    Eigen::VectorXd up = u;
    for (int k = g; k < L.R(); k += kStride) up[k] += eps;
    const Eigen::VectorXd dF = (res(up) - F0) / eps;
    for (int row = 0; row < n; ++row)
      for (int c : res.deps(row))
        if (c % kStride == g) trip.emplace_back(row, c, dF[row]);
  }
  Eigen::VectorXd up = u;
  const double epsR = eps * std::max(1.0, std::abs(u[L.R()]));
  up[L.R()] += epsR;
  const Eigen::VectorXd dF = (res(up) - F0) / epsR;
  for (int row = 0; row < n; ++row)
    if (dF[row] != 0.0) trip.emplace_back(row, L.R(), dF[row]);
  Eigen::SparseMatrix<double> J(n, n);
  J.setFromTriplets(trip.begin(), trip.end());
  J.makeCompressed();
  return J;
}

void check_grid(const RadialGrid& g) {
  if (!(g.R_in > 0.0 && g.R_out > g.R_in)) throw DomainError("radial grid needs 0 < R_in < R_out");
  if (g.n1 < 4 || g.n2 < 4) throw DomainError("radial grid needs at least 4 cells per phase");
}

}  // namespace

RadialState radial_initial(const RadialGrid& grid, double R, const std::function<double(double)>& theta0) {
  check_grid(grid);
  if (!(R > grid.R_in && R < grid.R_out)) throw DomainError("interface radius outside (R_in, R_out)");
  RadialState z;
  z.R = R;
  z.theta1.resize(grid.n1 + 1);
  z.theta2.resize(grid.n2 + 1);
  for (int k = 0; k <= grid.n1; ++k) z.theta1[k] = theta0(grid.R_in + k * (R - grid.R_in) / grid.n1);
  for (int k = 0; k <= grid.n2; ++k) z.theta2[k] = theta0(R + k * (grid.R_out - R) / grid.n2);
  z.theta2[0] = z.theta1[grid.n1];
  return z;
}

RadialSample radial_sample(const MaterialLaws& laws, const RadialGrid& grid, const RadialState& z) {
  RadialSample s;
  s.t = z.t;
  s.R = z.R;
  auto integrate = [&](int b, const Eigen::VectorXd& th, double r0, double r1) {
    const int n = static_cast<int>(th.size()) - 1;
    const double h = (r1 - r0) / n;
    double E = 0.0, S = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double w = (k == 0 || k == n ? 0.5 : 1.0) * h * (r0 + k * h) * two_pi;
      E += w * laws.energy(b, th[k]);
      S += w * laws.entropy(b, th[k]);
    }
    return std::pair{E, S};
  };
  const auto [E1, S1] = integrate(0, z.theta1, grid.R_in, z.R);
  const auto [E2, S2] = integrate(1, z.theta2, z.R, grid.R_out);
  s.E_total = E1 + E2 + laws.sigma() * two_pi * z.R;
  s.S_total = S1 + S2;
  return s;
}

RadialState radial_step(const MaterialLaws& laws, const RadialGrid& grid, const RadialState& z, double dt,
                        const RadialOptions& opt) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  const Residual res(laws, grid, z, dt);
  const Layout& L = res.layout();
  Eigen::VectorXd u = pack(L, z);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  for (int it = 0; it < opt.max_newton; ++it) {
    const Eigen::VectorXd F = res(u);
    if (!F.allFinite()) throw OracleFailure("radial oracle residual is not finite");
    const Eigen::SparseMatrix<double> J = jacobian(res, u, F);
    if (it == 0) lu.analyzePattern(J);
    lu.factorize(J);
    if (lu.info() != Eigen::Success) throw OracleFailure("radial oracle Jacobian is singular");
    const Eigen::VectorXd du = lu.solve(F);
    u -= du;
    const double R = u[L.R()];
    if (!(R > grid.R_in && R < grid.R_out) || !(u.head(L.R()).minCoeff() > 0.0)) {
      std::ostringstream msg;
      msg << "radial oracle left the admissible set at t = " << z.t + dt << " (R = " << R << ")";
      throw OracleFailure(msg.str());
    }
    if (du.cwiseAbs().maxCoeff() <= opt.newton_tol * (1.0 + u.cwiseAbs().maxCoeff())) {
      RadialState out;
      out.R = R;
      out.theta1 = u.segment(0, L.n1 + 1);
      out.theta2 = u.segment(L.n1 + 1, L.n2 + 1);
      out.t = z.t + dt;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "radial oracle Newton iteration did not converge at t = " << z.t + dt;
  throw OracleFailure(msg.str());
}

RadialTrajectory solve_radial(const MaterialLaws& laws, const RadialGrid& grid, const RadialState& initial, double dt,
                              double horizon, const RadialOptions& opt) {
  check_grid(grid);
  const int steps = static_cast<int>(std::lround(horizon / dt));
  RadialTrajectory tr;
  tr.samples.reserve(steps + 1);
  RadialState z = initial;
  tr.samples.push_back(radial_sample(laws, grid, z));
  for (int n = 0; n < steps; ++n) {
    z = radial_step(laws, grid, z, dt, opt);
    tr.samples.push_back(radial_sample(laws, grid, z));
  }
  tr.final_state = std::move(z);
  return tr;
}

double compare(const std::vector<std::pair<double, double>>& main_radius, const RadialTrajectory& oracle) {
  const auto& s = oracle.samples;
  if (s.empty()) throw DomainError("empty oracle trajectory");
  double worst = 0.0;
  for (const auto& [t, Rm] : main_radius) {
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    if (t < s.front().t - tol || t > s.back().t + tol) throw DomainError("main trajectory time outside oracle range");
    auto it = std::lower_bound(s.begin(), s.end(), t, [](const RadialSample& a, double x) { return a.t < x; });
    double Ro;
    if (it == s.begin()) {
      Ro = it->R;
    } else if (it == s.end()) {
      Ro = s.back().R;
    } else {
      const auto& a = *(it - 1);
      const auto& b = *it;
      const double w = (t - a.t) / (b.t - a.t);
      Ro = (1.0 - w) * a.R + w * b.R;
    }
    worst = std::max(worst, std::abs(Rm - Ro) / Ro);
  }
  return worst;
}

}  // namespace stefan
