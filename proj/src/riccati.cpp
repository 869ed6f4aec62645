#include "actopt/riccati.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace actopt {

namespace {

// Block starts of the 1x1/2x2 diagonal structure of a real Schur matrix.
std::vector<int> schur_blocks(const Eigen::MatrixXd& T) {
  const int n = static_cast<int>(T.rows());
  std::vector<int> starts;
  for (int j = 0; j < n;) {
    starts.push_back(j);
    j += (j + 1 < n && T(j + 1, j) != 0.0) ? 2 : 1;
  }
  return starts;
}

// Solve T^T Y + Y T + Q = 0 where T is quasi-upper-triangular. Marches over
// block columns; each column solves a quasi-lower-triangular system (or the
// coupled 2n variant for 2x2 blocks) by forward substitution.
Eigen::MatrixXd lyapunov_schur(const Eigen::MatrixXd& T, const Eigen::MatrixXd& Q) {
  const int n = static_cast<int>(T.rows());
  const std::vector<int> starts = schur_blocks(T);
  const Eigen::MatrixXd Tt = T.transpose();
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(n, n);

  for (size_t bj = 0; bj < starts.size(); ++bj) {
    const int j = starts[bj];
    const int w = (bj + 1 < starts.size() ? starts[bj + 1] : n) - j;
    Eigen::MatrixXd rhs = -Q.block(0, j, n, w);
    if (j > 0) rhs -= Y.leftCols(j) * T.block(0, j, j, w);

    if (w == 1) {
      const double a = T(j, j);
      Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
      Eigen::VectorXd r = rhs.col(0);
      for (size_t bi = 0; bi < starts.size(); ++bi) {
        const int i = starts[bi];
        const int wi = (bi + 1 < starts.size() ? starts[bi + 1] : n) - i;
        Eigen::VectorXd c = r.segment(i, wi);
        if (i > 0) c -= Tt.block(i, 0, wi, i) * y.head(i);
        Eigen::MatrixXd blk = Tt.block(i, i, wi, wi) + a * Eigen::MatrixXd::Identity(wi, wi);
        y.segment(i, wi) = blk.fullPivLu().solve(c);
      }
      Y.col(j) = y;
    } else {
      // Columns couple through the 2x2 block [[a11,a12],[a21,a22]] of T.
      const double a11 = T(j, j), a12 = T(j, j + 1), a21 = T(j + 1, j), a22 = T(j + 1, j + 1);
      Eigen::VectorXd y1 = Eigen::VectorXd::Zero(n), y2 = Eigen::VectorXd::Zero(n);
      for (size_t bi = 0; bi < starts.size(); ++bi) {
        const int i = starts[bi];
        const int wi = (bi + 1 < starts.size() ? starts[bi + 1] : n) - i;
        Eigen::VectorXd c1 = rhs.col(0).segment(i, wi);
        Eigen::VectorXd c2 = rhs.col(1).segment(i, wi);
        if (i > 0) {
          c1 -= Tt.block(i, 0, wi, i) * y1.head(i);
          c2 -= Tt.block(i, 0, wi, i) * y2.head(i);
        }
        const int msz = 2 * wi;
        Eigen::MatrixXd blk(msz, msz);
        const Eigen::MatrixXd Tii = Tt.block(i, i, wi, wi);
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(wi, wi);
        blk.topLeftCorner(wi, wi) = Tii + a11 * id;
        blk.topRightCorner(wi, wi) = a21 * id;
        blk.bottomLeftCorner(wi, wi) = a12 * id;
        blk.bottomRightCorner(wi, wi) = Tii + a22 * id;
        Eigen::VectorXd c(msz);
        c << c1, c2;
        Eigen::VectorXd z = blk.fullPivLu().solve(c);
        y1.segment(i, wi) = z.head(wi);
        y2.segment(i, wi) = z.tail(wi);
      }
      Y.col(j) = y1;
      Y.col(j + 1) = y2;
    }
  }
  return Y;
}

// Largest real part over the Schur diagonal blocks.
double spectral_abscissa(const Eigen::MatrixXd& T) {
  const std::vector<int> starts = schur_blocks(T);
  double abscissa = -std::numeric_limits<double>::infinity();
  for (size_t b = 0; b < starts.size(); ++b) {
    const int i = starts[b];
    const int w = (b + 1 < starts.size() ? starts[b + 1] : static_cast<int>(T.rows())) - i;
    // 1x1 block: the eigenvalue itself; 2x2 block: a complex pair with real
    // part equal to half the trace.
    double re = (w == 1) ? T(i, i) : 0.5 * (T(i, i) + T(i + 1, i + 1));
    abscissa = std::max(abscissa, re);
  }
  return abscissa;
}

}  // namespace

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  Eigen::RealSchur<Eigen::MatrixXd> schur(A);
  if (schur.info() != Eigen::Success) throw SolverError("solve_lyapunov: Schur decomposition failed");
  const Eigen::MatrixXd& U = schur.matrixU();
  const Eigen::MatrixXd& T = schur.matrixT();
  if (spectral_abscissa(T) >= 0.0)
    throw SolverError("solve_lyapunov: A is not Hurwitz");
  Eigen::MatrixXd Qt = U.transpose() * Q * U;
  Eigen::MatrixXd Y = lyapunov_schur(T, Qt);
  Eigen::MatrixXd X = U * Y * U.transpose();
  return 0.5 * (X + X.transpose());
}

RiccatiSolution solve_are(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                          const Eigen::MatrixXd& Q, double gamma,
                          const Eigen::MatrixXd* warm_start, double tol, int max_newton) {
  if (!(gamma > 0.0)) throw std::invalid_argument("solve_are: gamma must be positive");
  Eigen::MatrixXd R(1, 1);
  R(0, 0) = gamma;
  return solve_are(A, Eigen::MatrixXd(B), Q, R, warm_start, tol, max_newton);
}

RiccatiSolution solve_are(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                          const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                          const Eigen::MatrixXd* warm_start, double tol, int max_newton) {
  if (B.cols() == 0) {
    // No control channels: the cost-to-go is the open-loop Lyapunov solution.
    Eigen::MatrixXd Pi = solve_lyapunov(A, Q);
    double res = (A.transpose() * Pi + Pi * A + Q).norm();
    return RiccatiSolution{std::move(Pi), res, 0};
  }
  if (B.rows() != A.rows() || R.rows() != B.cols() || R.cols() != B.cols())
    throw std::invalid_argument("solve_are: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> rllt(0.5 * (R + R.transpose()));
  if (rllt.info() != Eigen::Success)
    throw SolverError("solve_are: control weight R is not positive definite");
  const double qnorm = Q.norm();

  Eigen::MatrixXd Pi;
  if (warm_start != nullptr) {
    Pi = 0.5 * (*warm_start + warm_start->transpose());
  } else {
    Pi = solve_lyapunov(A, Q);  // open-loop initialization, A Hurwitz
  }

  auto riccati_residual = [&](const Eigen::MatrixXd& P) {
    Eigen::MatrixXd W = B.transpose() * P;  // m x n
    Eigen::MatrixXd res = A.transpose() * P + P * A + Q;
    res.noalias() -= W.transpose() * rllt.solve(W);
    return res;
  };

  double res = riccati_residual(Pi).norm();
  for (int it = 0; it <= max_newton; ++it) {
    if (res <= tol * qnorm) return RiccatiSolution{std::move(Pi), res, it};
    // Kleinman step: solve the closed-loop Lyapunov equation
    //   Acl^T P+ + P+ Acl + Q + K^T R K = 0,  K = R^{-1} B^T Pi,  Acl = A - B K.
    Eigen::MatrixXd W = B.transpose() * Pi;
    Eigen::MatrixXd K = rllt.solve(W);
    Eigen::MatrixXd Acl = A - B * K;
    Eigen::MatrixXd Qk = Q + W.transpose() * K;  // K^T R K = W^T R^{-1} W
    Eigen::MatrixXd next;
    try {
      next = solve_lyapunov(Acl, Qk);
    } catch (const SolverError&) {
      if (warm_start == nullptr) throw;
      // A bad warm start can destabilize the closed loop; restart cold.
      return solve_are(A, B, Q, R, nullptr, tol, max_newton);
    }
    next = 0.5 * (next + next.transpose()).eval();
    double next_res = riccati_residual(next).norm();
    if (warm_start != nullptr && it == 0 && next_res > std::max(res, tol * qnorm) * 10.0) {
      // Warm start made things worse; fall back to the cold start.
      return solve_are(A, B, Q, R, nullptr, tol, max_newton);
    }
    Pi = std::move(next);
    res = next_res;
  }
  throw SolverError("solve_are: Newton iteration cap exceeded, residual " + std::to_string(res));
}

GeneralizedEig generalized_symmetric_eig(const Eigen::MatrixXd& P, const Eigen::MatrixXd& G) {
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    throw SolverError("generalized_symmetric_eig: G is not positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (P + P.transpose()), 0.5 * (G + G.transpose()));
  if (es.info() != Eigen::Success)
    throw SolverError("generalized_symmetric_eig: eigensolver failed");
  // Eigen returns ascending eigenvalues with V^T G V = I; flip to descending.
  const int n = static_cast<int>(P.rows());
  GeneralizedEig out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (int j = 0; j < n; ++j) {
    out.eigenvalues(j) = es.eigenvalues()(n - 1 - j);
    out.eigenvectors.col(j) = es.eigenvectors().col(n - 1 - j);
  }
  return out;
}

}  // namespace actopt
