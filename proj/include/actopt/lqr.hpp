#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "actopt/discretization.hpp"
#include "actopt/geometry.hpp"
#include "actopt/riccati.hpp"

namespace actopt {

// Time grid for the sensitivity quadrature and closed-loop simulation.
struct QuadratureSpec {
  double T = 1000.0;
  double dt = 0.01;
};

// Cost breakdown mirroring the report tables: total = lq_part + penalty_part
// with penalty_part = alpha (size - c)^2.
struct CostReport {
  double total = 0.0;
  double lq_part = 0.0;
  double penalty_part = 0.0;
  double size = 0.0;
  int iterations = 0;  // filled by the optimizer
};

// Galerkin restriction of a control that is a function on the actuator
// (rather than a single amplitude): with Mw the actuator mass matrix and
// Mw = V diag(mu) V^T reduced to its numerically positive eigenspace, the
// state equation gains B u with B = M^{-1} Mw V and the control cost is
// gamma ||u||^2_{L2(omega)} = u^T R u with R = gamma diag(mu). Directions
// with no L2(omega) mass neither act on the state nor cost anything, so the
// truncation is exact. An empty actuator yields zero columns.
struct DistributedInput {
  Eigen::MatrixXd B;  // n x m
  Eigen::MatrixXd R;  // m x m, diagonal positive
};

// Prefactored system: A = -M^{-1} S plus the control weight gamma. All cost
// and sensitivity operations take a Plant so the factorization is done once.
struct Plant {
  SystemMatrices sys;
  double gamma = 1.0;
  Eigen::MatrixXd A;
  Eigen::LLT<Eigen::MatrixXd> Mllt;

  Plant(SystemMatrices s, double gamma_);
  // B = M^{-1} Bhat for the given actuator (scalar control channel).
  Eigen::VectorXd input_matrix(const ActuatorShape& shape) const;
  // Reduced input pair for the distributed control channel on the actuator.
  DistributedInput distributed_input(const ActuatorShape& shape) const;
};

struct ClosedLoopTrajectory {
  std::vector<double> times;      // every output step 0, dt, ..., T
  std::vector<double> norm2_M;    // y^T M y at every output step
  std::vector<double> controls;   // u(t) = -gamma^{-1} B^T Pi y(t) at every step
  std::vector<Eigen::VectorXd> states;  // sampled every `stride` output steps
  int stride = 1;
  double running_cost = 0.0;      // trapezoid of y^T M y + gamma u^2 over [0,T]
};

struct WorstCaseSet {
  double lambda_max = 0.0;
  // G-normalized leading eigenvectors and their negations.
  std::vector<Eigen::VectorXd> representatives;
};

// f^T Pi f; the mass matrix is accepted for dimensional validation only.
double lq_cost(const RiccatiSolution& pi, const Eigen::VectorXd& f, const Eigen::MatrixXd& M);

// Assemble B for the shape, solve the Riccati equation (optionally warm
// started), and report all cost parts. pi_out, when non-null, receives the
// Riccati solution for reuse.
CostReport total_cost(const ActuatorShape& shape, const Eigen::VectorXd& f, double alpha,
                      double c, const Plant& plant, const Eigen::MatrixXd* warm_start = nullptr,
                      RiccatiSolution* pi_out = nullptr);

// Same report with the distributed control channel on the actuator; this is
// the cost the worst-case design loop tracks (at the fixed initial state f).
CostReport total_cost_distributed(const ActuatorShape& shape, const Eigen::VectorXd& f,
                                  double alpha, double c, const Plant& plant,
                                  const Eigen::MatrixXd* warm_start = nullptr,
                                  RiccatiSolution* pi_out = nullptr);

// RK4 propagation of y' = Acl y on the output grid 0, dt, ..., T. Internally
// the step is subdivided as required by the RK4 stability bound for the stiff
// diffusion operator (the one-step map of the linear system is precomputed
// and composed, which is exactly RK4 with substeps). Throws SolverError if
// the state norm grows by 1e6 (instability). The observer sees every output
// step (t, y) in order.
void propagate_linear(const Eigen::MatrixXd& Acl, const Eigen::VectorXd& f, double T, double dt,
                      const std::function<void(double t, const Eigen::VectorXd& y)>& observer);

// Closed-loop simulation with the scalar feedback u = -gamma^{-1} B^T Pi y,
// built on propagate_linear. The observer, when given, sees every output
// step (t, y, u) in order.
using StepObserver = std::function<void(double t, const Eigen::VectorXd& y, double u)>;
ClosedLoopTrajectory simulate_closed_loop(const Plant& plant, const Eigen::VectorXd& B,
                                          const Eigen::MatrixXd& Pi, const Eigen::VectorXd& f,
                                          double T, double dt, int store_stride = 100,
                                          const StepObserver& observer = {});

// Adjoint coefficients p(t) = 2 Pi y(t).
Eigen::VectorXd adjoint_at(const Eigen::MatrixXd& Pi, const Eigen::VectorXd& y);

// Leading eigenpairs of Pi v = lambda G v for an SPD Gram matrix G: the
// worst-case initial conditions over the unit ball {v : v^T G v <= 1} and
// their common cost lambda_max. The design loops pass G = sys.M so the ball
// is the unit L2 ball. Representatives collect every eigenvector within
// relative 1e-8 of lambda_max plus the negations, each G-normalized with a
// deterministic sign.
WorstCaseSet worst_case_initial(const Eigen::MatrixXd& Pi, const Eigen::MatrixXd& G);

}  // namespace actopt
