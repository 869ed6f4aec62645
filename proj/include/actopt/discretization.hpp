#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "actopt/geometry.hpp"

namespace actopt {

enum class BasisKind { FEM1D, Spectral2D };

// Describes the spatial basis behind a SystemMatrices value. FEM1D is a
// uniform P1 mesh on (0,1) with homogeneous Dirichlet conditions (interior
// nodes are the DOFs). Spectral2D uses the Laplacian eigenfunctions
// phi_kl(x,y) = 2 sin(k pi x) sin(l pi y) on (0,1)^2, evaluated/integrated on
// a uniform eval_grid of cell centers.
struct BasisDescriptor {
  BasisKind kind = BasisKind::FEM1D;
  // FEM1D
  int n_elements = 0;
  std::vector<double> nodes;       // interior node coordinates, size n_elements-1
  std::vector<double> diffusion;   // per-element sigma at midpoints, size n_elements
  // Spectral2D
  std::vector<std::pair<int, int>> mode_pairs;
  double sigma = 0.0;
  int eval_grid_size = 0;

  double h() const { return 1.0 / n_elements; }
};

// Finite-dimensional system y' = A y + B u with A = -M^{-1} S.
struct SystemMatrices {
  int n = 0;
  Eigen::MatrixXd M;   // mass matrix (identity for Spectral2D)
  Eigen::MatrixXd S;   // diffusion-weighted stiffness (diagonal for Spectral2D)
  Eigen::MatrixXd H1;  // unit-diffusion stiffness: the H^1_0 Gram matrix used
                       // to normalize worst-case initial states
  BasisDescriptor basis;
};

// Uniform P1 elements on (0,1), Dirichlet DOF elimination; space-dependent
// diffusion is sampled per element at the midpoint. Throws std::domain_error
// on non-positive diffusion and std::invalid_argument for n_elements < 2.
SystemMatrices assemble_fem_1d(int n_elements, const std::function<double(double)>& diffusion);
SystemMatrices assemble_fem_1d(int n_elements, double sigma);

// First n_modes Laplacian eigenfunctions on (0,1)^2 ordered by eigenvalue
// k^2 + l^2 ascending, ties broken by smaller k. M = I and S is diagonal with
// entries sigma pi^2 (k^2 + l^2). eval_grid_size must satisfy the Nyquist
// bound (at least twice the largest mode index per axis).
SystemMatrices assemble_spectral_2d(int n_modes, double sigma, int eval_grid_size);

// Load vector Bhat with Bhat_j = integral of phi_j over the actuator
// (exact per-interval integration in 1D, midpoint quadrature on the eval grid
// in 2D). The control input matrix is B = M^{-1} Bhat.
Eigen::VectorXd actuator_load(const ActuatorShape& shape, const BasisDescriptor& basis);

// Actuator mass matrix (Mw)_ij = integral of phi_i phi_j over the actuator:
// the Galerkin form of both the control term (chi_omega u, phi_i) and the
// control cost ||u||^2_{L2(omega)} when the control is a function on the
// actuator. Exact per-element integration in 1D (partial elements included),
// midpoint quadrature on the eval grid in 2D. Symmetric positive
// semidefinite; rows and columns of basis functions with no mass on the
// actuator vanish.
Eigen::MatrixXd actuator_mass(const ActuatorShape& shape, const BasisDescriptor& basis);

// Spectral bases only: matrix of basis values at the eval-grid cell centers,
// column c holding (phi_1(x_c), ..., phi_n(x_c)). Shared by the 2D actuator
// quadratures and field evaluations. Throws std::invalid_argument for FEM.
Eigen::MatrixXd spectral_cell_basis(const BasisDescriptor& basis);

// Basis-coefficient projection of f: returns M^{-1} fhat with
// fhat_j = (f, phi_j), integrated by 3-point Gauss per element in 1D and by
// eval-grid midpoint quadrature in 2D.
Eigen::VectorXd project_initial_condition(const std::function<double(double)>& f,
                                          const SystemMatrices& sys);
Eigen::VectorXd project_initial_condition(const std::function<double(double, double)>& f,
                                          const SystemMatrices& sys);

// Pointwise evaluation of the function with the given coefficient vector:
// linear interpolation of nodal values in 1D (zero at the boundary), modal
// summation in 2D.
double evaluate_coefficients(const Eigen::VectorXd& coeffs, const BasisDescriptor& basis,
                             double x, double y = 0.0);

// Level-set grid matching the basis: full node set (boundary included) in 1D,
// eval-grid cell centers in 2D. Values start at zero.
LevelSetField make_levelset_grid(const BasisDescriptor& basis);

}  // namespace actopt
