#include "actopt/optimize.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace actopt {

namespace {

constexpr double kBetaUnderflow = 1e-12;

// Riccati-backed cost evaluation with the worst-case refresh folded in: when
// worst_case is set, f is replaced by the leading eigenvector of (Pi, H1) --
// the costliest initial state in the unit H^1_0 ball -- and the LQ part is
// the corresponding eigenvalue.
struct CostEval {
  CostReport report;
  RiccatiSolution pi;
  Eigen::VectorXd f;
};

CostEval evaluate(const ActuatorShape& shape, const Eigen::VectorXd& f, double alpha, double c,
                  const Plant& plant, bool worst_case, const Eigen::MatrixXd* warm) {
  CostEval ev;
  Eigen::VectorXd B = plant.input_matrix(shape);
  ev.pi = solve_are(plant.A, B, plant.sys.M, plant.gamma, warm);
  double size = measure(shape);
  if (worst_case) {
    WorstCaseSet wc = worst_case_initial(ev.pi.Pi, plant.sys.H1);
    ev.f = wc.representatives.front();
    ev.report.lq_part = wc.lambda_max;
  } else {
    ev.f = f;
    ev.report.lq_part = f.dot(ev.pi.Pi * f);
  }
  ev.report.size = size;
  ev.report.penalty_part = alpha * (size - c) * (size - c);
  ev.report.total = ev.report.lq_part + ev.report.penalty_part;
  return ev;
}

RunRecord levelset_loop(const LevelSetField& psi0, const Eigen::VectorXd& f0, const Plant& plant,
                        double alpha, double c, const OptimizeConfig& cfg, bool worst_case,
                        int iter_offset = 0) {
  RunRecord rec;
  LevelSetField psi = psi0;
  ActuatorShape omega = shape_from_levelset(psi);
  CostEval cur = evaluate(omega, f0, alpha, c, plant, worst_case, nullptr);
  SensitivityField field = topological_field(omega, cur.f, plant, alpha, c, cfg.quad,
                                             cfg.field_method, &cur.pi.Pi);

  double beta = cfg.beta0;
  int it = 0;
  rec.stop_reason = "max_iters";
  while (it < cfg.max_iters) {
    ++it;
    double gnorm = levelset_norm(field.g);
    if (gnorm == 0.0) throw SolverError("levelset_design: sensitivity field vanished");
    LevelSetField cand = psi;
    cand.psi = (1.0 - beta) * psi.psi + (beta / gnorm) * field.g.psi;
    ActuatorShape omega_cand = shape_from_levelset(cand);
    CostEval next = evaluate(omega_cand, cur.f, alpha, c, plant, worst_case, &cur.pi.Pi);
    if (next.report.total < cur.report.total) {
      double change = symmetric_difference_measure(omega_cand, omega);
      psi = std::move(cand);
      omega = std::move(omega_cand);
      cur = std::move(next);
      field = topological_field(omega, cur.f, plant, alpha, c, cfg.quad, cfg.field_method,
                                &cur.pi.Pi);
      rec.iterates.push_back({iter_offset + it, beta, true, cur.report});
      if (change < cfg.eps_stop) {
        rec.converged = true;
        rec.stop_reason = "symmetric_difference_below_eps";
        break;
      }
    } else {
      rec.iterates.push_back({iter_offset + it, beta, false, next.report});
      beta *= cfg.beta_shrink;
      if (beta < kBetaUnderflow) {
        rec.stop_reason = "beta_underflow";
        break;
      }
    }
    if (cfg.reinit_period > 0 && it % cfg.reinit_period == 0) psi = reinitialize(psi);
  }
  rec.final_shape = omega;
  rec.final_report = cur.report;
  rec.final_report.iterations = it;
  rec.final_psi = std::move(psi);
  rec.final_f = cur.f;
  return rec;
}

}  // namespace

double levelset_norm(const LevelSetField& g) {
  if (g.is2d) {
    double cell = 1.0 / (static_cast<double>(g.m) * g.m);
    return std::sqrt(g.psi.squaredNorm() * cell);
  }
  const int n = g.size();
  const double h = g.x[1] - g.x[0];
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
    acc += w * g.psi(i) * g.psi(i);
  }
  return std::sqrt(acc);
}

RunRecord position_descent(const ActuatorShape& shape0, const Eigen::VectorXd& f,
                           const Plant& plant, const OptimizeConfig& cfg) {
  RunRecord rec;
  ActuatorShape omega = shape0;
  CostEval cur = evaluate(omega, f, 0.0, 0.0, plant, false, nullptr);
  ShapeGradient grad =
      shape_gradient(omega, f, plant, cfg.quad, cfg.field_method, &cur.pi.Pi);

  double beta = cfg.beta0;
  int it = 0;
  rec.stop_reason = "max_iters";
  while (it < cfg.max_iters) {
    if (grad.b.norm() < cfg.eps_stop) {
      rec.converged = true;
      rec.stop_reason = "gradient_below_eps";
      break;
    }
    ++it;
    ActuatorShape cand = translate(omega, beta * grad.b);
    CostEval next = evaluate(cand, f, 0.0, 0.0, plant, false, &cur.pi.Pi);
    if (next.report.total < cur.report.total) {
      omega = std::move(cand);
      cur = std::move(next);
      grad = shape_gradient(omega, f, plant, cfg.quad, cfg.field_method, &cur.pi.Pi);
      rec.iterates.push_back({it, beta, true, cur.report});
    } else {
      rec.iterates.push_back({it, beta, false, next.report});
      beta *= cfg.beta_shrink;
      if (beta < kBetaUnderflow) {
        rec.stop_reason = "beta_underflow";
        break;
      }
    }
  }
  rec.final_shape = omega;
  rec.final_report = cur.report;
  rec.final_report.iterations = it;
  rec.final_f = f;
  return rec;
}

RunRecord levelset_design(const LevelSetField& psi0, const Eigen::VectorXd& f,
                          const Plant& plant, double alpha, double c, const OptimizeConfig& cfg) {
  return levelset_loop(psi0, f, plant, alpha, c, cfg, /*worst_case=*/false);
}

RunRecord worst_case_design(const LevelSetField& psi0, const Plant& plant, double alpha,
                            double c, const OptimizeConfig& cfg) {
  return levelset_loop(psi0, Eigen::VectorXd(), plant, alpha, c, cfg, /*worst_case=*/true);
}

RunRecord continuation(const LevelSetField& psi0, const Eigen::VectorXd* f, const Plant& plant,
                       double c, const OptimizeConfig& cfg) {
  if (cfg.alpha_schedule.empty())
    throw std::invalid_argument("continuation: alpha_schedule must not be empty");
  for (size_t i = 1; i < cfg.alpha_schedule.size(); ++i)
    if (cfg.alpha_schedule[i] <= cfg.alpha_schedule[i - 1])
      throw std::invalid_argument("continuation: alpha_schedule must be strictly increasing");

  RunRecord all;
  LevelSetField psi = psi0;
  int iter_offset = 0;
  for (size_t stage = 0; stage < cfg.alpha_schedule.size(); ++stage) {
    double alpha = cfg.alpha_schedule[stage];
    if (stage > 0) psi = reinitialize(psi);
    RunRecord rec = f != nullptr
                        ? levelset_loop(psi, *f, plant, alpha, c, cfg, false, iter_offset)
                        : levelset_loop(psi, Eigen::VectorXd(), plant, alpha, c, cfg, true,
                                        iter_offset);
    all.iterates.insert(all.iterates.end(), rec.iterates.begin(), rec.iterates.end());
    all.per_alpha.push_back({alpha, rec.final_report, rec.final_report.iterations});
    iter_offset += rec.final_report.iterations;
    psi = rec.final_psi;
    all.final_shape = std::move(rec.final_shape);
    all.final_report = rec.final_report;
    all.final_f = std::move(rec.final_f);
    all.converged = rec.converged;
    all.stop_reason = std::move(rec.stop_reason);
  }
  all.final_psi = std::move(psi);
  all.final_report.iterations = iter_offset;
  return all;
}

ScanResult position_scan(const Eigen::VectorXd& f, const Plant& plant, double width,
                         const std::vector<double>& centers) {
  ScanResult out;
  const Eigen::MatrixXd* warm = nullptr;
  Eigen::MatrixXd last_pi;
  double best = std::numeric_limits<double>::infinity();
  for (double center : centers) {
    double a = center - 0.5 * width, b = center + 0.5 * width;
    if (a < 0.0 || b > 1.0)
      throw std::invalid_argument("position_scan: interval leaves the domain");
    ActuatorShape shape = ActuatorShape::from_intervals({{a, b}});
    Eigen::VectorXd B = plant.input_matrix(shape);
    RiccatiSolution pi = solve_are(plant.A, B, plant.sys.M, plant.gamma, warm);
    double cost = f.dot(pi.Pi * f);
    out.entries.emplace_back(center, cost);
    if (cost < best) {
      best = cost;
      out.argmin_center = center;
    }
    last_pi = std::move(pi.Pi);
    warm = &last_pi;
  }
  return out;
}

}  // namespace actopt
