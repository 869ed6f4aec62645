#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace actopt {

// Stabilizing solution of A^T Pi + Pi A - Pi B gamma^{-1} B^T Pi + Q = 0.
struct RiccatiSolution {
  Eigen::MatrixXd Pi;
  double residual_norm = 0.0;  // Frobenius norm of the Riccati residual
  int iterations = 0;          // Newton steps taken
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Solve A^T X + X A + Q = 0 for Hurwitz A (Bartels-Stewart on the real Schur
// form). Throws SolverError if A has an eigenvalue with nonnegative real part.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

// Newton-Kleinman iteration for the algebraic Riccati equation with a scalar
// control channel (B is a column vector). Starts from the open-loop Lyapunov
// solution (valid because A is Hurwitz here) unless warm_start supplies a
// stabilizing guess, e.g. the solution for a nearby actuator. Each step
// symmetrizes the iterate; convergence is declared at
// residual <= tol * ||Q||_F. Throws SolverError when the step cap is hit.
RiccatiSolution solve_are(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                          const Eigen::MatrixXd& Q, double gamma,
                          const Eigen::MatrixXd* warm_start = nullptr, double tol = 1e-9,
                          int max_newton = 50);

// Same iteration for a multi-channel control: solves
//   A^T Pi + Pi A - Pi B R^{-1} B^T Pi + Q = 0
// with B of size n x m and SPD R of size m x m. B with zero columns is
// allowed and reduces to the open-loop Lyapunov solution.
RiccatiSolution solve_are(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                          const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                          const Eigen::MatrixXd* warm_start = nullptr, double tol = 1e-9,
                          int max_newton = 50);

struct GeneralizedEig {
  Eigen::VectorXd eigenvalues;   // sorted descending
  Eigen::MatrixXd eigenvectors;  // columns, G-orthonormal: V^T G V = I
};

// Solve P v = lambda G v for symmetric P and SPD G. Throws SolverError if G
// is not positive definite.
GeneralizedEig generalized_symmetric_eig(const Eigen::MatrixXd& P, const Eigen::MatrixXd& G);

}  // namespace actopt
