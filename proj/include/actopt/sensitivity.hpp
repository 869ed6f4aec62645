#pragma once

#include <Eigen/Dense>
#include <vector>

#include "actopt/lqr.hpp"

namespace actopt {

// How the time integral I(zeta) = int_0^T u(t) p(zeta,t) dt is evaluated,
// where p is the adjoint of the optimality system (coefficient vector
// -2 M^{-1} Pi y). Trajectory follows the definition: simulate the closed
// loop with RK4 and apply the trapezoid rule on the output grid. Gramian
// evaluates the same integral algebraically through the controllability-type
// Lyapunov equation
//   Acl Y + Y Acl^T + f f^T = 0,  I-coefficients = (2/gamma) M^{-1} Pi Y Pi B,
// which is exact for the infinite horizon (indistinguishable from T = 1000 at
// these decay rates) and is what the optimizer uses; both routes are
// cross-checked in the test suite.
enum class FieldMethod { Trajectory, Gramian };

// Translation gradient of the LQ cost. b is the descent displacement: moving
// the shape by +beta*b decreases J1 to first order.
struct ShapeGradient {
  Eigen::VectorXd b;
  // One entry per boundary point (1D) or boundary edge (2D): the signed
  // contribution I(s) * nu(s) accumulated into b, nonzero components flattened
  // in axis order.
  std::vector<double> per_boundary_terms;
  bool clamped = false;  // a facet on the domain boundary contributed zero
};

// Nodal topological-derivative data g(zeta) = -I(zeta) + 2 alpha (|omega|-c)
// on the level-set grid, with the penalty inputs recorded.
struct SensitivityField {
  LevelSetField g;
  double alpha = 0.0;
  double c = 0.0;
  double size = 0.0;
};

// Coefficient vector of zeta -> int_0^T u(t) p(zeta,t) dt for the closed loop
// of (B, Pi) started at f. Building block shared by the operations below.
Eigen::VectorXd time_integral_coefficients(const Plant& plant, const Eigen::VectorXd& B,
                                           const Eigen::MatrixXd& Pi, const Eigen::VectorXd& f,
                                           const QuadratureSpec& quad,
                                           FieldMethod method = FieldMethod::Trajectory);

// Shape (translation) gradient via the boundary formula
//   b_i = int_{boundary} int_0^T u(t) p(s,t) dt (e_i . nu(s)) ds.
// Solves the Riccati equation internally unless pi is supplied.
ShapeGradient shape_gradient(const ActuatorShape& shape, const Eigen::VectorXd& f,
                             const Plant& plant, const QuadratureSpec& quad,
                             FieldMethod method = FieldMethod::Trajectory,
                             const Eigen::MatrixXd* pi = nullptr);

// Topological-derivative field g on the level-set grid for the given penalty
// data. Solves the Riccati equation internally unless pi is supplied.
SensitivityField topological_field(const ActuatorShape& shape, const Eigen::VectorXd& f,
                                   const Plant& plant, double alpha, double c,
                                   const QuadratureSpec& quad,
                                   FieldMethod method = FieldMethod::Trajectory,
                                   const Eigen::MatrixXd* pi = nullptr);

// Central differences of J1 under coordinate translations of the shape:
// returns the FD gradient vector, so shape_gradient().b corresponds to its
// negation. The translation-invariant penalty cancels in the differences.
Eigen::VectorXd fd_shape_oracle(const ActuatorShape& shape, const Eigen::VectorXd& f,
                                const Plant& plant, double delta);

// Difference quotient of total J1 under insertion (eta0 outside the closure)
// or removal (eta0 inside) of a ball of radius eps at eta0; the denominator
// is the measure change. 1D balls are intervals of length 2*eps. Throws
// std::invalid_argument when eta0 is within one grid cell of the shape
// boundary or the ball is below mesh resolution (eps < 2 cells).
double fd_topo_oracle(const ActuatorShape& shape, const Eigen::VectorXd& f, const Plant& plant,
                      double eta0_x, double eta0_y, double eps, double alpha, double c);

}  // namespace actopt
