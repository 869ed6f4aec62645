#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <actopt/discretization.hpp>
#include <actopt/sensitivity.hpp>

#include <cmath>
#include <stdexcept>

using namespace actopt;

namespace {

Eigen::VectorXd sine_ic(const SystemMatrices& sys) {
  return project_initial_condition([](double x) { return std::sin(M_PI * x); }, sys);
}

// Richardson-extrapolated insertion/removal quotient: the oracle quotient has
// an O(eps) defect, so 2 q(eps) - q(2 eps) isolates the eps -> 0 limit.
double extrapolated_quotient(const ActuatorShape& shape, const Eigen::VectorXd& f,
                             const Plant& plant, double x, double eps, double alpha, double c) {
  double q1 = fd_topo_oracle(shape, f, plant, x, 0.0, eps, alpha, c);
  double q2 = fd_topo_oracle(shape, f, plant, x, 0.0, 2.0 * eps, alpha, c);
  return 2.0 * q1 - q2;
}

}  // namespace

TEST_CASE("both sensitivity routes compute the same integral") {
  auto sys = assemble_fem_1d(100, 0.01);
  Plant plant(sys, 1e-3);
  auto shape = ActuatorShape::from_intervals({{0.4, 0.6}});
  Eigen::VectorXd B = plant.input_matrix(shape);
  auto pi = solve_are(plant.A, B, sys.M, 1e-3);
  Eigen::VectorXd f = sine_ic(sys);
  QuadratureSpec quad;  // T = 1000, dt = 0.01
  Eigen::VectorXd cg = time_integral_coefficients(plant, B, pi.Pi, f, quad, FieldMethod::Gramian);
  Eigen::VectorXd ct =
      time_integral_coefficients(plant, B, pi.Pi, f, quad, FieldMethod::Trajectory);
  CHECK((cg - ct).norm() / cg.norm() < 5e-3);
  CHECK(cg.norm() > 0.0);
}

TEST_CASE("trajectory quadrature is resolved: halving dt moves g by <0.5%") {
  auto sys = assemble_fem_1d(50, 0.01);
  Plant plant(sys, 1e-3);
  auto shape = ActuatorShape::from_intervals({{0.4, 0.6}});
  Eigen::VectorXd B = plant.input_matrix(shape);
  auto pi = solve_are(plant.A, B, sys.M, 1e-3);
  Eigen::VectorXd f = sine_ic(sys);
  QuadratureSpec q1{200.0, 0.01}, q2{200.0, 0.005};
  Eigen::VectorXd g1 = time_integral_coefficients(plant, B, pi.Pi, f, q1, FieldMethod::Trajectory);
  Eigen::VectorXd g2 = time_integral_coefficients(plant, B, pi.Pi, f, q2, FieldMethod::Trajectory);
  CHECK((g1 - g2).norm() / g1.norm() < 5e-3);
}

TEST_CASE("topological field: parity in the initial condition") {
  auto sys = assemble_fem_1d(100, 0.01);
  Plant plant(sys, 1e-3);
  auto shape = ActuatorShape::from_intervals({{0.35, 0.6}});
  Eigen::VectorXd f = sine_ic(sys);
  QuadratureSpec quad;
  for (auto method : {FieldMethod::Gramian, FieldMethod::Trajectory}) {
    auto gp = topological_field(shape, f, plant, 2.0, 0.2, quad, method);
    auto gm = topological_field(shape, -f, plant, 2.0, 0.2, quad, method);
    CHECK((gp.g.psi - gm.g.psi).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("topological field with zero data is the constant penalty slope") {
  auto sys = assemble_fem_1d(80, 0.01);
  Plant plant(sys, 1e-3);
  auto shape = ActuatorShape::from_intervals({{0.25, 0.55}});  // size 0.3
  Eigen::VectorXd f = Eigen::VectorXd::Zero(sys.n);
  QuadratureSpec quad;
  auto field = topological_field(shape, f, plant, 3.0, 0.2, quad, FieldMethod::Gramian);
  CHECK(field.alpha == 3.0);
  CHECK(field.c == 0.2);
  CHECK(field.size == doctest::Approx(0.3).epsilon(1e-12));
  REQUIRE(field.g.size() == 81);
  for (int i = 0; i < field.g.size(); ++i) {
    CHECK(field.g.psi[i] == doctest::Approx(2.0 * 3.0 * 0.1).epsilon(1e-10));
  }
}

TEST_CASE("topological field matches insertion/removal difference quotients") {
  // pinned on the reference mesh: the extrapolation pair (eps, 2 eps) needs
  // eps = 2h and the asymptotics sharpen with resolution
  auto sys = assemble_fem_1d(200, 0.01);
  Plant plant(sys, 1e-3);
  auto shape = ActuatorShape::from_intervals({{0.4, 0.6}});
  Eigen::VectorXd f = sine_ic(sys);
  QuadratureSpec quad;
  auto field = topological_field(shape, f, plant, 1.0, 0.2, quad, FieldMethod::Gramian);
  auto value_at = [&](double x) {
    return field.g.psi[static_cast<int>(std::lround(x * 200))];
  };
  // outside the shape: insertion quotient approximates +g
  for (double x : {0.15, 0.25, 0.7, 0.85}) {
    double q = extrapolated_quotient(shape, f, plant, x, 0.01, 1.0, 0.2);
    double g = value_at(x);
    CHECK(std::abs(q - g) / std::max(std::abs(q), std::abs(g)) < 0.10);
  }
  // inside the shape: removal quotient approximates -g
  {
    double q = extrapolated_quotient(shape, f, plant, 0.5, 0.01, 1.0, 0.2);
    double g = value_at(0.5);
    CHECK(std::abs(q - (-g)) / std::max(std::abs(q), std::abs(g)) < 0.15);
  }
}

TEST_CASE("difference quotient of the pure penalty is exact") {
  auto sys = assemble_fem_1d(100, 0.01);
  Plant plant(sys, 1e-3);
  auto shape = ActuatorShape::from_intervals({{0.4, 0.6}});
  Eigen::VectorXd f = Eigen::VectorXd::Zero(sys.n);
  // J = alpha (|omega| - c)^2 only; inserting 2*eps at 0.8 changes it by
  // alpha (2 eps)^2 when |omega| = c, so the quotient is exactly 2 alpha eps.
  double q = fd_topo_oracle(shape, f, plant, 0.8, 0.0, 0.02, 2.0, 0.2);
  CHECK(q == doctest::Approx(2.0 * 2.0 * 0.02).epsilon(1e-9));
}

TEST_CASE("difference quotient rejects unresolvable probes") {
  auto sys = assemble_fem_1d(100, 0.01);
  Plant plant(sys, 1e-3);
  auto shape = ActuatorShape::from_intervals({{0.4, 0.6}});
  Eigen::VectorXd f = sine_ic(sys);
  // within one cell of the shape boundary
  CHECK_THROWS_AS((void)fd_topo_oracle(shape, f, plant, 0.405, 0.0, 0.02, 1.0, 0.2),
                  std::invalid_argument);
  // ball below mesh resolution (eps < 2 cells)
  CHECK_THROWS_AS((void)fd_topo_oracle(shape, f, plant, 0.8, 0.0, 0.005, 1.0, 0.2),
                  std::invalid_argument);
}

TEST_CASE("shape gradient vanishes at the symmetric configuration") {
  auto sys = assemble_fem_1d(100, 0.01);
  Plant plant(sys, 1e-3);
  auto shape = ActuatorShape::from_intervals({{0.4, 0.6}});
  Eigen::VectorXd f = sine_ic(sys);
  QuadratureSpec quad;
  auto grad = shape_gradient(shape, f, plant, quad, FieldMethod::Gramian);
  REQUIRE(grad.b.size() == 1);
  CHECK(std::abs(grad.b[0]) < 1e-6);
  CHECK(!grad.clamped);
  REQUIRE(grad.per_boundary_terms.size() == 2);
  CHECK(grad.b[0] ==
        doctest::Approx(grad.per_boundary_terms[0] + grad.per_boundary_terms[1]).epsilon(1e-12));
}

TEST_CASE("shape gradient matches central differences of the LQ cost") {
  auto sys = assemble_fem_1d(100, 0.01);
  Plant plant(sys, 1e-3);
  Eigen::VectorXd f = sine_ic(sys);
  QuadratureSpec quad;
  for (auto iv : {Interval{0.7, 0.9}, Interval{0.25, 0.45}}) {
    auto shape = ActuatorShape::from_intervals({iv});
    auto grad = shape_gradient(shape, f, plant, quad, FieldMethod::Gramian);
    Eigen::VectorXd fd = fd_shape_oracle(shape, f, plant, 1e-3);
    REQUIRE(fd.size() == 1);
    // b is the descent displacement: the FD gradient is its negation
    CHECK(std::abs(fd[0] + grad.b[0]) < 0.05 * std::abs(fd[0]));
    // moving off-center shapes toward the center decreases the cost
    double center = (iv.a + iv.b) / 2.0;
    if (center > 0.5) CHECK(grad.b[0] < 0.0);
    if (center < 0.5) CHECK(grad.b[0] > 0.0);
  }
}

TEST_CASE("shape difference quotients converge quadratically in delta") {
  auto sys = assemble_fem_1d(100, 0.01);
  Plant plant(sys, 1e-3);
  auto shape = ActuatorShape::from_intervals({{0.65, 0.85}});
  Eigen::VectorXd f = sine_ic(sys);
  double ref = fd_shape_oracle(shape, f, plant, 2.5e-3)[0];
  double e1 = std::abs(fd_shape_oracle(shape, f, plant, 2e-2)[0] - ref);
  double e2 = std::abs(fd_shape_oracle(shape, f, plant, 1e-2)[0] - ref);
  CHECK(e2 < e1 / 2.5);  // central differences: O(delta^2)
}

TEST_CASE("shape gradient clamps facets on the domain boundary") {
  auto sys = assemble_fem_1d(100, 0.01);
  Plant plant(sys, 1e-3);
  auto shape = ActuatorShape::from_intervals({{0.0, 0.2}});
  Eigen::VectorXd f = sine_ic(sys);
  QuadratureSpec quad;
  auto grad = shape_gradient(shape, f, plant, quad, FieldMethod::Gramian);
  CHECK(grad.clamped);
  CHECK(grad.per_boundary_terms.size() == 1);  // only the interior endpoint
}

TEST_CASE("2D shape gradient: symmetry, direction, and route agreement") {
  int m = 32;
  auto sys = assemble_spectral_2d(9, 0.01, m);
  Plant plant(sys, 1e-3);
  Eigen::VectorXd f = project_initial_condition(
      [](double x, double y) { return std::sin(M_PI * x) * std::sin(M_PI * y); }, sys);
  QuadratureSpec quad;

  auto block = [&](int x0, int x1, int y0, int y1) {
    std::vector<std::uint8_t> mask(m * m, 0);
    for (int iy = y0; iy < y1; ++iy)
      for (int ix = x0; ix < x1; ++ix) mask[iy * m + ix] = 1;
    return ActuatorShape::from_mask(m, mask);
  };

  // centered block: both displacement components vanish
  auto centered = block(12, 20, 12, 20);
  auto gc = shape_gradient(centered, f, plant, quad, FieldMethod::Gramian);
  REQUIRE(gc.b.size() == 2);
  CHECK(std::abs(gc.b[0]) < 1e-8);
  CHECK(std::abs(gc.b[1]) < 1e-8);

  // block left of center: descent pushes right (+x); below center: up (+y)
  auto offset = block(4, 12, 8, 16);
  auto go = shape_gradient(offset, f, plant, quad, FieldMethod::Gramian);
  CHECK(go.b[0] > 0.0);
  CHECK(go.b[1] > 0.0);

  auto gt = shape_gradient(offset, f, plant, quad, FieldMethod::Trajectory);
  CHECK((go.b - gt.b).norm() / go.b.norm() < 1e-2);

  // block touching the domain edge is clamped there
  auto edge = block(0, 6, 12, 18);
  auto ge = shape_gradient(edge, f, plant, quad, FieldMethod::Gramian);
  CHECK(ge.clamped);
}

TEST_CASE("2D topological field: parity and zero-data constant") {
  int m = 32;
  auto sys = assemble_spectral_2d(9, 0.01, m);
  Plant plant(sys, 1e-3);
  Eigen::VectorXd f = project_initial_condition(
      [](double x, double y) { return std::sin(M_PI * x) * std::sin(2.0 * M_PI * y); }, sys);
  std::vector<std::uint8_t> mask(m * m, 0);
  for (int iy = 10; iy < 20; ++iy)
    for (int ix = 10; ix < 20; ++ix) mask[iy * m + ix] = 1;
  auto shape = ActuatorShape::from_mask(m, mask);
  QuadratureSpec quad;
  auto gp = topological_field(shape, f, plant, 1.5, 0.04, quad, FieldMethod::Gramian);
  auto gm = topological_field(shape, -f, plant, 1.5, 0.04, quad, FieldMethod::Gramian);
  CHECK((gp.g.psi - gm.g.psi).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(gp.g.is2d);
  CHECK(gp.g.m == m);

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(sys.n);
  auto gz = topological_field(shape, zero, plant, 1.5, 0.04, quad, FieldMethod::Gramian);
  double expect = 2.0 * 1.5 * (measure(shape) - 0.04);
  for (int i = 0; i < gz.g.size(); ++i) {
    CHECK(gz.g.psi[i] == doctest::Approx(expect).epsilon(1e-10));
  }
}
