#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "actopt/sensitivity.hpp"

namespace actopt {

struct OptimizeConfig {
  double beta0 = 1.0;
  double beta_shrink = 0.5;       // backtracking factor on rejection
  double eps_stop = 1e-7;         // |b| threshold / symmetric-difference threshold
  int max_iters = 1000;
  int reinit_period = 50;         // loop iterations (accepted or rejected) between reinits
  std::vector<double> alpha_schedule;  // strictly increasing penalty weights
  QuadratureSpec quad;
  // The optimizer defaults to the algebraic Gramian evaluation of the
  // sensitivity integral; Trajectory reproduces it through simulation.
  FieldMethod field_method = FieldMethod::Gramian;
};

struct IterateRecord {
  int iter = 0;
  double beta = 0.0;
  bool accepted = false;
  // Accepted: the new incumbent cost. Rejected: the candidate that failed.
  CostReport report;
};

struct AlphaRow {
  double alpha = 0.0;
  CostReport report;
  int iterations = 0;
};

struct RunRecord {
  std::vector<IterateRecord> iterates;
  ActuatorShape final_shape;
  CostReport final_report;
  std::vector<AlphaRow> per_alpha;   // one row per continuation stage
  LevelSetField final_psi;           // level-set problems only
  Eigen::VectorXd final_f;           // initial condition in effect at the end
  bool converged = false;
  std::string stop_reason;
};

struct ScanResult {
  std::vector<std::pair<double, double>> entries;  // (center, J1^LQ)
  double argmin_center = 0.0;
};

// Gradient positioning loop: move the shape along the translation
// gradient b while the cost decreases, shrinking the step on rejection.
// Stops when |b| < eps_stop, the step underflows (beta < 1e-12), or
// max_iters is reached. The volume penalty is translation invariant, so the
// tracked cost is the LQ part.
RunRecord position_descent(const ActuatorShape& shape0, const Eigen::VectorXd& f,
                           const Plant& plant, const OptimizeConfig& cfg);

// Level-set loop at fixed alpha: candidate psi' = (1-beta) psi + beta g/||g||,
// accepted iff the total cost strictly decreases, otherwise beta shrinks.
// psi is reinitialized to a signed distance every reinit_period iterations.
// Stops when the symmetric difference of consecutive accepted shapes falls
// below eps_stop, beta underflows, or max_iters is reached. Throws
// SolverError when the sensitivity field vanishes identically.
RunRecord levelset_design(const LevelSetField& psi0, const Eigen::VectorXd& f,
                          const Plant& plant, double alpha, double c, const OptimizeConfig& cfg);

// Same loop for the worst-case cost: after every accepted shape change the
// initial condition is refreshed to the leading eigenvector of (Pi, H1) --
// the costliest state in the unit H^1_0 ball -- and the tracked cost is
// lambda_max + penalty.
RunRecord worst_case_design(const LevelSetField& psi0, const Plant& plant, double alpha,
                            double c, const OptimizeConfig& cfg);

// Homotopy over cfg.alpha_schedule: each stage runs levelset_design (or the
// worst-case variant when f is null), warm-started from the previous stage's
// final psi reinitialized to a signed distance, with beta reset to beta0.
RunRecord continuation(const LevelSetField& psi0, const Eigen::VectorXd* f, const Plant& plant,
                       double c, const OptimizeConfig& cfg);

// Brute-force positioning oracle: J1^LQ of the width-`width` interval at each
// center (1D only).
ScanResult position_scan(const Eigen::VectorXd& f, const Plant& plant, double width,
                         const std::vector<double>& centers);

// Grid norm used to normalize the level-set update: trapezoid-weighted L2 in
// 1D, cell-area-weighted L2 in 2D.
double levelset_norm(const LevelSetField& g);

}  // namespace actopt
