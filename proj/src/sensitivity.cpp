#include "actopt/sensitivity.hpp"

#include <cmath>
#include <stdexcept>

namespace actopt {

namespace {

RiccatiSolution solve_for_shape(const ActuatorShape& shape, const Plant& plant,
                                const Eigen::MatrixXd* warm, Eigen::VectorXd* B_out) {
  Eigen::VectorXd B = plant.input_matrix(shape);
  RiccatiSolution pi = solve_are(plant.A, B, plant.sys.M, plant.gamma, warm);
  if (B_out != nullptr) *B_out = std::move(B);
  return pi;
}

std::vector<Interval> subtract_interval(const std::vector<Interval>& xs, const Interval& cut) {
  std::vector<Interval> out;
  for (const Interval& iv : xs) {
    if (cut.b <= iv.a || cut.a >= iv.b) {
      out.push_back(iv);
      continue;
    }
    if (cut.a > iv.a) out.push_back({iv.a, cut.a});
    if (cut.b < iv.b) out.push_back({cut.b, iv.b});
  }
  return out;
}

}  // namespace

Eigen::VectorXd time_integral_coefficients(const Plant& plant, const Eigen::VectorXd& B,
                                           const Eigen::MatrixXd& Pi, const Eigen::VectorXd& f,
                                           const QuadratureSpec& quad, FieldMethod method) {
  // The adjoint of the first-order optimality system solves the backward
  // equation -p' = Ap - 2y (the negative of the value-function costate), so
  // with Pi the Galerkin matrix of the Riccati operator its coefficient
  // vector is -2 M^{-1} Pi y(t); the M^{-1} converts the bilinear-form
  // representation into nodal/modal coefficients. Both routes below compute
  // the coefficients of zeta -> int_0^T u(t) p(zeta,t) dt as -2 M^{-1} Pi s
  // with s = int_0^T u(t) y(t) dt; the finite-difference oracles pin this
  // convention.
  if (method == FieldMethod::Gramian) {
    // Y = int_0^inf y y^T dt solves Acl Y + Y Acl^T + f f^T = 0, and
    // s = int u(t) y(t) dt = -(1/gamma) Y Pi B.
    Eigen::MatrixXd Acl = plant.A;
    Acl.noalias() -= (1.0 / plant.gamma) * (B * (B.transpose() * Pi));
    Eigen::MatrixXd Y = solve_lyapunov(Acl.transpose(), f * f.transpose());
    return plant.Mllt.solve((2.0 / plant.gamma) * (Pi * (Y * (Pi * B))));
  }
  // Definitional route: trapezoid accumulation of u(t) y(t) along the RK4
  // trajectory.
  Eigen::VectorXd s = Eigen::VectorXd::Zero(f.size());
  const double dt = quad.dt;
  const long nsteps = std::lround(quad.T / dt);
  long k = 0;
  simulate_closed_loop(plant, B, Pi, f, quad.T, dt, /*store_stride=*/1 << 30,
                       [&](double, const Eigen::VectorXd& y, double u) {
                         double w = (k == 0 || k == nsteps) ? 0.5 * dt : dt;
                         s.noalias() += (w * u) * y;
                         ++k;
                       });
  return plant.Mllt.solve(-2.0 * (Pi * s));
}

ShapeGradient shape_gradient(const ActuatorShape& shape, const Eigen::VectorXd& f,
                             const Plant& plant, const QuadratureSpec& quad, FieldMethod method,
                             const Eigen::MatrixXd* pi) {
  Eigen::VectorXd B;
  RiccatiSolution sol;
  if (pi == nullptr) {
    sol = solve_for_shape(shape, plant, nullptr, &B);
  } else {
    B = plant.input_matrix(shape);
    sol.Pi = *pi;
  }
  Eigen::VectorXd coeffs = time_integral_coefficients(plant, B, sol.Pi, f, quad, method);
  const BasisDescriptor& basis = plant.sys.basis;

  ShapeGradient out;
  if (!shape.is2d) {
    out.b = Eigen::VectorXd::Zero(1);
    for (const Interval& iv : shape.intervals) {
      if (iv.a <= 0.0) {
        out.clamped = true;  // facet on the domain boundary contributes zero
      } else {
        double term = -evaluate_coefficients(coeffs, basis, iv.a);  // nu = -1
        out.per_boundary_terms.push_back(term);
        out.b(0) += term;
      }
      if (iv.b >= 1.0) {
        out.clamped = true;
      } else {
        double term = evaluate_coefficients(coeffs, basis, iv.b);  // nu = +1
        out.per_boundary_terms.push_back(term);
        out.b(0) += term;
      }
    }
    return out;
  }

  const int m = shape.grid_m;
  const double h = 1.0 / m;
  out.b = Eigen::VectorXd::Zero(2);
  auto inside = [&](int ix, int iy) {
    return shape.mask[static_cast<size_t>(iy) * m + ix] != 0;
  };
  for (int iy = 0; iy < m; ++iy) {
    for (int ix = 0; ix < m; ++ix) {
      if (!inside(ix, iy)) continue;
      // Outward facets toward non-shape neighbors; domain-boundary facets
      // contribute zero and raise the clamp flag.
      const struct { int dx, dy, axis, sign; } facets[4] = {
          {1, 0, 0, +1}, {-1, 0, 0, -1}, {0, 1, 1, +1}, {0, -1, 1, -1}};
      for (const auto& fc : facets) {
        int jx = ix + fc.dx, jy = iy + fc.dy;
        if (jx < 0 || jx >= m || jy < 0 || jy >= m) {
          out.clamped = true;
          continue;
        }
        if (inside(jx, jy)) continue;
        double ex = (fc.axis == 0) ? (fc.sign > 0 ? (ix + 1) * h : ix * h) : (ix + 0.5) * h;
        double ey = (fc.axis == 1) ? (fc.sign > 0 ? (iy + 1) * h : iy * h) : (iy + 0.5) * h;
        double term = fc.sign * evaluate_coefficients(coeffs, basis, ex, ey) * h;
        out.per_boundary_terms.push_back(term);
        out.b(fc.axis) += term;
      }
    }
  }
  return out;
}

SensitivityField topological_field(const ActuatorShape& shape, const Eigen::VectorXd& f,
                                   const Plant& plant, double alpha, double c,
                                   const QuadratureSpec& quad, FieldMethod method,
                                   const Eigen::MatrixXd* pi) {
  Eigen::VectorXd B;
  RiccatiSolution sol;
  if (pi == nullptr) {
    sol = solve_for_shape(shape, plant, nullptr, &B);
  } else {
    B = plant.input_matrix(shape);
    sol.Pi = *pi;
  }
  Eigen::VectorXd coeffs = time_integral_coefficients(plant, B, sol.Pi, f, quad, method);
  const BasisDescriptor& basis = plant.sys.basis;

  SensitivityField field;
  field.alpha = alpha;
  field.c = c;
  field.size = measure(shape);
  field.g = make_levelset_grid(basis);
  const double shift = 2.0 * alpha * (field.size - c);
  if (!field.g.is2d) {
    for (int i = 0; i < field.g.size(); ++i)
      field.g.psi(i) = -evaluate_coefficients(coeffs, basis, field.g.x[i]) + shift;
  } else {
    const int m = field.g.m;
    for (int iy = 0; iy < m; ++iy)
      for (int ix = 0; ix < m; ++ix)
        field.g.psi(iy * m + ix) =
            -evaluate_coefficients(coeffs, basis, (ix + 0.5) / m, (iy + 0.5) / m) + shift;
  }
  return field;
}

Eigen::VectorXd fd_shape_oracle(const ActuatorShape& shape, const Eigen::VectorXd& f,
                                const Plant& plant, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("fd_shape_oracle: delta must be positive");
  const int d = shape.is2d ? 2 : 1;
  Eigen::VectorXd grad(d);
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd step = Eigen::VectorXd::Zero(d);
    step(i) = delta;
    ActuatorShape plus = translate(shape, step);
    ActuatorShape minus = translate(shape, -step);
    if (plus.clamped || minus.clamped)
      throw std::invalid_argument("fd_shape_oracle: delta pushes the shape out of the domain");
    // Penalty is translation invariant, so the LQ parts carry the difference.
    CostReport jp = total_cost(plus, f, 0.0, 0.0, plant);
    CostReport jm = total_cost(minus, f, 0.0, 0.0, plant);
    grad(i) = (jp.total - jm.total) / (2.0 * delta);
  }
  return grad;
}

double fd_topo_oracle(const ActuatorShape& shape, const Eigen::VectorXd& f, const Plant& plant,
                      double eta0_x, double eta0_y, double eps, double alpha, double c) {
  const double J0 = total_cost(shape, f, alpha, c, plant).total;
  const double m0 = measure(shape);
  ActuatorShape candidate;
  if (!shape.is2d) {
    const double h = plant.sys.basis.h();
    if (eps < 2.0 * h) throw std::invalid_argument("fd_topo_oracle: eps below mesh resolution");
    for (const Interval& iv : shape.intervals)
      if (std::abs(eta0_x - iv.a) < h || std::abs(eta0_x - iv.b) < h)
        throw std::invalid_argument("fd_topo_oracle: eta0 within one cell of the shape boundary");
    Interval ball{eta0_x - eps, eta0_x + eps};
    if (shape.contains(eta0_x)) {
      candidate = ActuatorShape::from_intervals(subtract_interval(shape.intervals, ball));
    } else {
      auto iv = shape.intervals;
      iv.push_back({std::max(0.0, ball.a), std::min(1.0, ball.b)});
      candidate = ActuatorShape::from_intervals(std::move(iv));
    }
  } else {
    const int m = shape.grid_m;
    const double h = 1.0 / m;
    if (eps < 2.0 * h) throw std::invalid_argument("fd_topo_oracle: eps below mesh resolution");
    const bool inside = shape.contains(eta0_x, eta0_y);
    // Mixed membership within a one-cell ring marks eta0 as near the boundary.
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        double qx = eta0_x + dx * h, qy = eta0_y + dy * h;
        if (qx <= 0.0 || qx >= 1.0 || qy <= 0.0 || qy >= 1.0) continue;
        if (shape.contains(qx, qy) != inside)
          throw std::invalid_argument("fd_topo_oracle: eta0 within one cell of the shape boundary");
      }
    std::vector<std::uint8_t> mask = shape.mask;
    for (int iy = 0; iy < m; ++iy)
      for (int ix = 0; ix < m; ++ix) {
        double cx = (ix + 0.5) * h, cy = (iy + 0.5) * h;
        if ((cx - eta0_x) * (cx - eta0_x) + (cy - eta0_y) * (cy - eta0_y) <= eps * eps)
          mask[static_cast<size_t>(iy) * m + ix] = inside ? 0 : 1;
      }
    candidate = ActuatorShape::from_mask(m, std::move(mask));
  }
  const double dm = std::abs(measure(candidate) - m0);
  if (dm == 0.0) throw std::invalid_argument("fd_topo_oracle: ball did not change the shape");
  const double J1 = total_cost(candidate, f, alpha, c, plant).total;
  return (J1 - J0) / dm;
}

}  // namespace actopt
