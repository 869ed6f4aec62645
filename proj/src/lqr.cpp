#include "actopt/lqr.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace actopt {

Plant::Plant(SystemMatrices s, double gamma_) : sys(std::move(s)), gamma(gamma_) {
  if (!(gamma > 0.0)) throw std::invalid_argument("Plant: gamma must be positive");
  Mllt.compute(sys.M);
  if (Mllt.info() != Eigen::Success) throw SolverError("Plant: mass matrix is not SPD");
  A = -Mllt.solve(sys.S);
}

Eigen::VectorXd Plant::input_matrix(const ActuatorShape& shape) const {
  return Mllt.solve(actuator_load(shape, sys.basis));
}

DistributedInput Plant::distributed_input(const ActuatorShape& shape) const {
  Eigen::MatrixXd Mw = actuator_mass(shape, sys.basis);
  const int n = static_cast<int>(Mw.rows());
  DistributedInput di;

  // Restrict to basis functions carrying mass on the actuator: the others
  // contribute zero columns to B and zero rows/columns to the cost form.
  const double maxdiag = Mw.diagonal().maxCoeff();
  std::vector<int> active;
  if (maxdiag > 0.0)
    for (int i = 0; i < n; ++i)
      if (Mw(i, i) > 1e-14 * maxdiag) active.push_back(i);
  if (active.empty()) {
    di.B = Eigen::MatrixXd::Zero(n, 0);
    di.R = Eigen::MatrixXd::Zero(0, 0);
    return di;
  }

  const int na = static_cast<int>(active.size());
  Eigen::MatrixXd Maa(na, na);
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < na; ++b) Maa(a, b) = Mw(active[a], active[b]);

  // Eigen-reduce the actuator mass block: Maa = V diag(mu) V^T. Dropping the
  // null directions is exact -- they neither actuate the state nor cost
  // anything -- and leaves an SPD control weight for the Riccati solver.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Maa);
  if (es.info() != Eigen::Success)
    throw SolverError("distributed_input: actuator mass eigendecomposition failed");
  const Eigen::VectorXd& mu = es.eigenvalues();  // ascending
  const double mu_max = mu(na - 1);
  int r = 0;
  for (int j = 0; j < na; ++j)
    if (mu(j) > 1e-12 * mu_max) ++r;
  Eigen::MatrixXd Vr = es.eigenvectors().rightCols(r);
  Eigen::VectorXd mur = mu.tail(r);

  // Galerkin control term (chi_omega u, phi_i) with u = sum_j c_j phi_j on the
  // actuator gives Bhat = Mw (columns restricted to the active set); in the
  // eigenbasis the channels decouple: Bhat_active = Vr diag(mu) and the cost
  // ||u||^2_{L2(omega)} becomes sum_j mu_j c_j^2. Then B R^{-1} B^T equals
  // gamma^{-1} M^{-1} Mw M^{-1} exactly.
  Eigen::MatrixXd Bhat = Eigen::MatrixXd::Zero(n, r);
  Eigen::MatrixXd rows = Vr * mur.asDiagonal();
  for (int a = 0; a < na; ++a) Bhat.row(active[a]) = rows.row(a);
  di.B = Mllt.solve(Bhat);
  di.R = Eigen::MatrixXd((gamma * mur).asDiagonal());
  return di;
}

double lq_cost(const RiccatiSolution& pi, const Eigen::VectorXd& f, const Eigen::MatrixXd& M) {
  if (pi.Pi.rows() != f.size() || M.rows() != f.size())
    throw std::invalid_argument("lq_cost: dimension mismatch");
  return f.dot(pi.Pi * f);
}

CostReport total_cost(const ActuatorShape& shape, const Eigen::VectorXd& f, double alpha,
                      double c, const Plant& plant, const Eigen::MatrixXd* warm_start,
                      RiccatiSolution* pi_out) {
  Eigen::VectorXd B = plant.input_matrix(shape);
  RiccatiSolution pi = solve_are(plant.A, B, plant.sys.M, plant.gamma, warm_start);
  CostReport rep;
  rep.size = measure(shape);
  rep.lq_part = f.dot(pi.Pi * f);
  rep.penalty_part = alpha * (rep.size - c) * (rep.size - c);
  rep.total = rep.lq_part + rep.penalty_part;
  if (pi_out != nullptr) *pi_out = std::move(pi);
  return rep;
}

CostReport total_cost_distributed(const ActuatorShape& shape, const Eigen::VectorXd& f,
                                  double alpha, double c, const Plant& plant,
                                  const Eigen::MatrixXd* warm_start, RiccatiSolution* pi_out) {
  DistributedInput di = plant.distributed_input(shape);
  RiccatiSolution pi = solve_are(plant.A, di.B, plant.sys.M, di.R, warm_start);
  CostReport rep;
  rep.size = measure(shape);
  rep.lq_part = f.dot(pi.Pi * f);
  rep.penalty_part = alpha * (rep.size - c) * (rep.size - c);
  rep.total = rep.lq_part + rep.penalty_part;
  if (pi_out != nullptr) *pi_out = std::move(pi);
  return rep;
}

namespace {

// Spectral radius estimate of A by power iteration (deterministic start).
double spectral_radius_estimate(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
  double rho = 0.0;
  for (int it = 0; it < 60; ++it) {
    Eigen::VectorXd w = A * v;
    double nw = w.norm();
    if (nw == 0.0) return 0.0;
    rho = nw;
    v = w / nw;
  }
  return rho;
}

}  // namespace

ClosedLoopTrajectory simulate_closed_loop(const Plant& plant, const Eigen::VectorXd& B,
                                          const Eigen::MatrixXd& Pi, const Eigen::VectorXd& f,
                                          double T, double dt, int store_stride,
                                          const StepObserver& observer) {
  if (!(dt > 0.0) || T < dt) throw std::invalid_argument("simulate_closed_loop: need dt > 0, T >= dt");
  if (store_stride < 1) store_stride = 1;
  const int n = static_cast<int>(f.size());
  const long nsteps = std::lround(T / dt);

  Eigen::VectorXd gain = (Pi * B) / plant.gamma;  // u = -gain . y
  Eigen::MatrixXd Acl = plant.A;
  Acl.noalias() -= (1.0 / plant.gamma) * (B * (B.transpose() * Pi));

  // RK4 stability: |lambda| dt_sub must stay inside the stability interval
  // (~2.785 on the real axis); substep the stiff operator accordingly.
  double rho = spectral_radius_estimate(Acl);
  int nsub = std::max(1L, std::lround(std::ceil(rho * dt / 2.5)));
  const double hs = dt / nsub;
  // One RK4 substep of a linear autonomous system is the degree-4 Taylor map.
  Eigen::MatrixXd Z = hs * Acl;
  Eigen::MatrixXd P1 = Eigen::MatrixXd::Identity(n, n) + Z + (Z * Z) / 2.0 + (Z * Z * Z) / 6.0 +
                       (Z * Z * Z * Z) / 24.0;
  // Compose the substeps into one output-step propagator by binary powering.
  Eigen::MatrixXd Pstep = Eigen::MatrixXd::Identity(n, n);
  {
    Eigen::MatrixXd base = P1;
    int e = nsub;
    while (e > 0) {
      if (e & 1) Pstep = (Pstep * base).eval();
      base = (base * base).eval();
      e >>= 1;
    }
  }

  ClosedLoopTrajectory traj;
  traj.stride = store_stride;
  traj.times.reserve(nsteps + 1);
  traj.norm2_M.reserve(nsteps + 1);
  traj.controls.reserve(nsteps + 1);

  const double blowup_cap = 1e6 * (f.lpNorm<Eigen::Infinity>() + 1.0);
  Eigen::VectorXd y = f;
  double cost = 0.0;
  double prev_integrand = 0.0;
  for (long k = 0; k <= nsteps; ++k) {
    double u = -gain.dot(y);
    double ny = y.dot(plant.sys.M * y);
    traj.times.push_back(k * dt);
    traj.norm2_M.push_back(ny);
    traj.controls.push_back(u);
    if (k % store_stride == 0) traj.states.push_back(y);
    if (observer) observer(k * dt, y, u);
    double integrand = ny + plant.gamma * u * u;
    if (k > 0) cost += 0.5 * dt * (prev_integrand + integrand);
    prev_integrand = integrand;
    if (y.lpNorm<Eigen::Infinity>() > blowup_cap)
      throw SolverError("simulate_closed_loop: trajectory blow-up detected");
    if (k < nsteps) y = Pstep * y;
  }
  traj.running_cost = cost;
  return traj;
}

Eigen::VectorXd adjoint_at(const Eigen::MatrixXd& Pi, const Eigen::VectorXd& y) {
  if (Pi.rows() != y.size()) throw std::invalid_argument("adjoint_at: dimension mismatch");
  return 2.0 * (Pi * y);
}

WorstCaseSet worst_case_initial(const Eigen::MatrixXd& Pi, const Eigen::MatrixXd& G) {
  GeneralizedEig eig = generalized_symmetric_eig(Pi, G);
  WorstCaseSet out;
  out.lambda_max = eig.eigenvalues(0);
  const double cutoff = out.lambda_max - std::abs(out.lambda_max) * 1e-8;
  for (int j = 0; j < eig.eigenvalues.size() && eig.eigenvalues(j) >= cutoff; ++j) {
    Eigen::VectorXd v = eig.eigenvectors.col(j);
    // Deterministic sign: make the entry of largest magnitude positive.
    int imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) v = -v;
    out.representatives.push_back(v);
    out.representatives.push_back(-v);
  }
  return out;
}

}  // namespace actopt
