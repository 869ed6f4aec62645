#include "actopt/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace actopt {

namespace {

constexpr double kPi = std::numbers::pi;

// 3-point Gauss-Legendre rule on [0,1].
constexpr double kGaussX[3] = {0.1127016653792583, 0.5, 0.8872983346207417};
constexpr double kGaussW[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

}  // namespace

SystemMatrices assemble_fem_1d(int n_elements, const std::function<double(double)>& diffusion) {
  if (n_elements < 2) throw std::invalid_argument("assemble_fem_1d: n_elements must be >= 2");
  const int n = n_elements - 1;
  const double h = 1.0 / n_elements;
  BasisDescriptor basis;
  basis.kind = BasisKind::FEM1D;
  basis.n_elements = n_elements;
  basis.nodes.resize(n);
  for (int i = 0; i < n; ++i) basis.nodes[i] = (i + 1) * h;
  basis.diffusion.resize(n_elements);
  for (int e = 0; e < n_elements; ++e) {
    double s = diffusion((e + 0.5) * h);
    if (!(s > 0.0)) throw std::domain_error("assemble_fem_1d: diffusion must be positive");
    basis.diffusion[e] = s;
  }

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd H1 = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < n_elements; ++e) {
    // Element e spans [e*h, (e+1)*h] with global node indices e-1 and e
    // (interior numbering; -1 and n denote the eliminated boundary nodes).
    const double sig = basis.diffusion[e];
    const double mloc[2][2] = {{h / 3.0, h / 6.0}, {h / 6.0, h / 3.0}};
    const double sloc[2][2] = {{sig / h, -sig / h}, {-sig / h, sig / h}};
    const double hloc[2][2] = {{1.0 / h, -1.0 / h}, {-1.0 / h, 1.0 / h}};
    const int idx[2] = {e - 1, e};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        if (idx[a] < 0 || idx[a] >= n || idx[b] < 0 || idx[b] >= n) continue;
        M(idx[a], idx[b]) += mloc[a][b];
        S(idx[a], idx[b]) += sloc[a][b];
        H1(idx[a], idx[b]) += hloc[a][b];
      }
    }
  }
  return SystemMatrices{n, std::move(M), std::move(S), std::move(H1), std::move(basis)};
}

SystemMatrices assemble_fem_1d(int n_elements, double sigma) {
  return assemble_fem_1d(n_elements, [sigma](double) { return sigma; });
}

SystemMatrices assemble_spectral_2d(int n_modes, double sigma, int eval_grid_size) {
  if (n_modes < 1) throw std::invalid_argument("assemble_spectral_2d: n_modes must be >= 1");
  if (!(sigma > 0.0)) throw std::domain_error("assemble_spectral_2d: sigma must be positive");
  // Enumerate (k,l) by eigenvalue k^2 + l^2 ascending, ties by smaller k.
  std::vector<std::pair<int, int>> pairs;
  int kmax = static_cast<int>(std::ceil(std::sqrt(2.0 * n_modes))) + 2;
  for (int k = 1; k <= kmax; ++k)
    for (int l = 1; l <= kmax; ++l) pairs.emplace_back(k, l);
  std::sort(pairs.begin(), pairs.end(), [](auto p, auto q) {
    int ep = p.first * p.first + p.second * p.second;
    int eq = q.first * q.first + q.second * q.second;
    if (ep != eq) return ep < eq;
    return p.first < q.first;
  });
  pairs.resize(n_modes);
  int max_index = 0;
  for (auto& p : pairs) max_index = std::max({max_index, p.first, p.second});
  if (eval_grid_size < 2 * max_index)
    throw std::invalid_argument("assemble_spectral_2d: eval grid below the Nyquist bound");

  BasisDescriptor basis;
  basis.kind = BasisKind::Spectral2D;
  basis.mode_pairs = pairs;
  basis.sigma = sigma;
  basis.eval_grid_size = eval_grid_size;

  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n_modes, n_modes);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n_modes, n_modes);
  Eigen::MatrixXd H1 = Eigen::MatrixXd::Zero(n_modes, n_modes);
  for (int j = 0; j < n_modes; ++j) {
    auto [k, l] = pairs[j];
    H1(j, j) = kPi * kPi * (k * k + l * l);
    S(j, j) = sigma * H1(j, j);
  }
  return SystemMatrices{n_modes, std::move(M), std::move(S), std::move(H1), std::move(basis)};
}

namespace {

// Exact integral of the P1 hat function centered at node x_j over [a,b].
double hat_integral(double xj, double h, double a, double b) {
  auto ramp = [&](double lo, double hi, double x0, bool rising) {
    lo = std::max(lo, a);
    hi = std::min(hi, b);
    if (hi <= lo) return 0.0;
    auto phi = [&](double x) { return rising ? (x - x0) / h : 1.0 - (x - x0) / h; };
    return 0.5 * (phi(lo) + phi(hi)) * (hi - lo);  // trapezoid is exact for linear phi
  };
  return ramp(xj - h, xj, xj - h, true) + ramp(xj, xj + h, xj, false);
}

}  // namespace

Eigen::VectorXd actuator_load(const ActuatorShape& shape, const BasisDescriptor& basis) {
  if (basis.kind == BasisKind::FEM1D) {
    const int n = static_cast<int>(basis.nodes.size());
    const double h = basis.h();
    Eigen::VectorXd bhat = Eigen::VectorXd::Zero(n);
    for (const Interval& iv : shape.intervals) {
      double a = std::max(0.0, iv.a), b = std::min(1.0, iv.b);
      if (b <= a) continue;
      int j0 = std::max(0, static_cast<int>(std::floor(a / h)) - 1);
      int j1 = std::min(n - 1, static_cast<int>(std::ceil(b / h)));
      for (int j = j0; j <= j1; ++j) bhat(j) += hat_integral(basis.nodes[j], h, a, b);
    }
    return bhat;
  }
  const int n = static_cast<int>(basis.mode_pairs.size());
  const int m = basis.eval_grid_size;
  const double cell = 1.0 / (static_cast<double>(m) * m);
  Eigen::VectorXd bhat = Eigen::VectorXd::Zero(n);
  for (int iy = 0; iy < m; ++iy) {
    for (int ix = 0; ix < m; ++ix) {
      if (!shape.mask[static_cast<size_t>(iy) * m + ix]) continue;
      double x = (ix + 0.5) / m, y = (iy + 0.5) / m;
      for (int j = 0; j < n; ++j) {
        auto [k, l] = basis.mode_pairs[j];
        bhat(j) += 2.0 * std::sin(k * kPi * x) * std::sin(l * kPi * y) * cell;
      }
    }
  }
  return bhat;
}

Eigen::MatrixXd spectral_cell_basis(const BasisDescriptor& basis) {
  if (basis.kind != BasisKind::Spectral2D)
    throw std::invalid_argument("spectral_cell_basis: spectral bases only");
  const int n = static_cast<int>(basis.mode_pairs.size());
  const int m = basis.eval_grid_size;
  Eigen::MatrixXd phi(n, static_cast<long>(m) * m);
  for (int iy = 0; iy < m; ++iy) {
    for (int ix = 0; ix < m; ++ix) {
      double x = (ix + 0.5) / m, y = (iy + 0.5) / m;
      for (int j = 0; j < n; ++j) {
        auto [k, l] = basis.mode_pairs[j];
        phi(j, static_cast<long>(iy) * m + ix) =
            2.0 * std::sin(k * kPi * x) * std::sin(l * kPi * y);
      }
    }
  }
  return phi;
}

Eigen::MatrixXd actuator_mass(const ActuatorShape& shape, const BasisDescriptor& basis) {
  if (basis.kind == BasisKind::FEM1D) {
    const int n = static_cast<int>(basis.nodes.size());
    const double h = basis.h();
    Eigen::MatrixXd mw = Eigen::MatrixXd::Zero(n, n);
    for (int e = 0; e < basis.n_elements; ++e) {
      const double x0 = e * h, x1 = (e + 1) * h;
      const int idx[2] = {e - 1, e};
      for (const Interval& iv : shape.intervals) {
        double lo = std::max(x0, std::max(0.0, iv.a));
        double hi = std::min(x1, std::min(1.0, iv.b));
        if (hi <= lo) continue;
        // Exact mass of the covered piece in local coordinates t in [t0,t1]:
        // phi_left = 1-t, phi_right = t on the element.
        double t0 = (lo - x0) / h, t1 = (hi - x0) / h;
        auto cube = [](double t) { return t * t * t; };
        double ll = h * (cube(1.0 - t0) - cube(1.0 - t1)) / 3.0;
        double rr = h * (cube(t1) - cube(t0)) / 3.0;
        double lr = h * ((t1 * t1 - t0 * t0) / 2.0 - (cube(t1) - cube(t0)) / 3.0);
        const double loc[2][2] = {{ll, lr}, {lr, rr}};
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            if (idx[a] < 0 || idx[a] >= n || idx[b] < 0 || idx[b] >= n) continue;
            mw(idx[a], idx[b]) += loc[a][b];
          }
      }
    }
    return mw;
  }
  const int n = static_cast<int>(basis.mode_pairs.size());
  const int m = basis.eval_grid_size;
  const double cell = 1.0 / (static_cast<double>(m) * m);
  Eigen::MatrixXd phi = spectral_cell_basis(basis);
  long covered = 0;
  for (long c = 0; c < static_cast<long>(m) * m; ++c)
    if (shape.mask[static_cast<size_t>(c)]) ++covered;
  Eigen::MatrixXd phi_omega(n, covered);
  long col = 0;
  for (long c = 0; c < static_cast<long>(m) * m; ++c)
    if (shape.mask[static_cast<size_t>(c)]) phi_omega.col(col++) = phi.col(c);
  return cell * (phi_omega * phi_omega.transpose());
}

Eigen::VectorXd project_initial_condition(const std::function<double(double)>& f,
                                          const SystemMatrices& sys) {
  if (sys.basis.kind != BasisKind::FEM1D)
    throw std::invalid_argument("project_initial_condition: 1D function on a 2D basis");
  const int n = sys.n;
  const double h = sys.basis.h();
  Eigen::VectorXd fhat = Eigen::VectorXd::Zero(n);
  for (int e = 0; e < sys.basis.n_elements; ++e) {
    double x0 = e * h;
    for (int q = 0; q < 3; ++q) {
      double x = x0 + kGaussX[q] * h;
      double w = kGaussW[q] * h;
      double fx = f(x);
      int left = e - 1, right = e;
      if (left >= 0 && left < n) fhat(left) += w * fx * (1.0 - kGaussX[q]);
      if (right >= 0 && right < n) fhat(right) += w * fx * kGaussX[q];
    }
  }
  return sys.M.llt().solve(fhat);
}

Eigen::VectorXd project_initial_condition(const std::function<double(double, double)>& f,
                                          const SystemMatrices& sys) {
  if (sys.basis.kind != BasisKind::Spectral2D)
    throw std::invalid_argument("project_initial_condition: 2D function on a 1D basis");
  const int n = sys.n;
  const int m = sys.basis.eval_grid_size;
  const double cell = 1.0 / (static_cast<double>(m) * m);
  Eigen::VectorXd fhat = Eigen::VectorXd::Zero(n);
  for (int iy = 0; iy < m; ++iy) {
    for (int ix = 0; ix < m; ++ix) {
      double x = (ix + 0.5) / m, y = (iy + 0.5) / m;
      double fx = f(x, y);
      if (fx == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        auto [k, l] = sys.basis.mode_pairs[j];
        fhat(j) += fx * 2.0 * std::sin(k * kPi * x) * std::sin(l * kPi * y) * cell;
      }
    }
  }
  return fhat;  // M = I
}

double evaluate_coefficients(const Eigen::VectorXd& coeffs, const BasisDescriptor& basis,
                             double x, double y) {
  if (basis.kind == BasisKind::FEM1D) {
    const int n = static_cast<int>(basis.nodes.size());
    const double h = basis.h();
    if (x <= 0.0 || x >= 1.0) return 0.0;
    // Nodal values are the coefficients; boundary values vanish.
    int e = std::min(static_cast<int>(std::floor(x / h)), basis.n_elements - 1);
    double t = x / h - e;
    double vl = (e - 1 >= 0 && e - 1 < n) ? coeffs(e - 1) : 0.0;
    double vr = (e >= 0 && e < n) ? coeffs(e) : 0.0;
    return (1.0 - t) * vl + t * vr;
  }
  double v = 0.0;
  for (int j = 0; j < coeffs.size(); ++j) {
    auto [k, l] = basis.mode_pairs[j];
    v += coeffs(j) * 2.0 * std::sin(k * kPi * x) * std::sin(l * kPi * y);
  }
  return v;
}

LevelSetField make_levelset_grid(const BasisDescriptor& basis) {
  LevelSetField f;
  if (basis.kind == BasisKind::FEM1D) {
    f.is2d = false;
    int nn = basis.n_elements + 1;
    f.x.resize(nn);
    for (int i = 0; i < nn; ++i) f.x[i] = static_cast<double>(i) / basis.n_elements;
    f.psi = Eigen::VectorXd::Zero(nn);
  } else {
    f.is2d = true;
    f.m = basis.eval_grid_size;
    f.psi = Eigen::VectorXd::Zero(static_cast<long>(f.m) * f.m);
  }
  return f;
}

}  // namespace actopt
