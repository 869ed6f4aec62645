#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <actopt/discretization.hpp>

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

using namespace actopt;

namespace {

// Reference stiffness assembly with the per-element diffusion averaged by a
// high-order composite rule instead of the midpoint sample.
Eigen::MatrixXd stiffness_with_exact_sigma(int n, const std::function<double(double)>& sigma) {
  int dof = n - 1;
  double h = 1.0 / n;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(dof, dof);
  for (int e = 0; e < n; ++e) {
    // 64-point midpoint refinement of int sigma over the element
    double acc = 0.0;
    for (int q = 0; q < 64; ++q) acc += sigma((e + (q + 0.5) / 64.0) * h) * (h / 64.0);
    double k = acc / (h * h);
    int i = e - 1, j = e;  // global interior indices of the element's nodes
    if (i >= 0) S(i, i) += k;
    if (j < dof) S(j, j) += k;
    if (i >= 0 && j < dof) {
      S(i, j) -= k;
      S(j, i) -= k;
    }
  }
  return S;
}

double max_rel_entry_diff(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  double scale = B.cwiseAbs().maxCoeff();
  return (A - B).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

TEST_CASE("hand-assembled two-element mesh") {
  // n=2, sigma=1: single interior DOF, M = [1/3], S = [4]
  auto sys = assemble_fem_1d(2, 1.0);
  REQUIRE(sys.n == 1);
  CHECK(sys.M(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(sys.S(0, 0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(sys.basis.kind == BasisKind::FEM1D);
  CHECK(sys.basis.n_elements == 2);
  REQUIRE(sys.basis.nodes.size() == 1);
  CHECK(sys.basis.nodes[0] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("reference mesh matrices are symmetric positive definite") {
  auto sys = assemble_fem_1d(200, 0.01);
  REQUIRE(sys.n == 199);
  CHECK((sys.M - sys.M.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((sys.S - sys.S.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(Eigen::LLT<Eigen::MatrixXd>(sys.M).info() == Eigen::Success);
  CHECK(Eigen::LLT<Eigen::MatrixXd>(sys.S).info() == Eigen::Success);
  // constant-coefficient stencil: interior row sums of S vanish
  for (int i = 1; i < sys.n - 1; ++i) {
    CHECK(std::abs(sys.S.row(i).sum()) < 1e-12);
  }
  // tridiagonal values sigma/h * (2, -1) and  mass h/6 * (4, 1)
  double h = 1.0 / 200;
  CHECK(sys.S(5, 5) == doctest::Approx(2.0 * 0.01 / h).epsilon(1e-13));
  CHECK(sys.S(5, 6) == doctest::Approx(-0.01 / h).epsilon(1e-13));
  CHECK(sys.M(5, 5) == doctest::Approx(4.0 * h / 6.0).epsilon(1e-13));
  CHECK(sys.M(5, 6) == doctest::Approx(h / 6.0).epsilon(1e-13));
}

TEST_CASE("H1 Gram matrix is the unit-diffusion stiffness") {
  // constant sigma: S = sigma * H1 entrywise
  auto sys = assemble_fem_1d(200, 0.01);
  CHECK((sys.S - 0.01 * sys.H1).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((sys.H1 - sys.H1.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(Eigen::LLT<Eigen::MatrixXd>(sys.H1).info() == Eigen::Success);

  // any diffusion profile: H1 coincides with the sigma = 1 stiffness
  auto curved = [](double x) { return 1.0 + std::exp(2.0 * x); };
  auto prof = assemble_fem_1d(16, curved);
  auto unit = assemble_fem_1d(16, 1.0);
  CHECK((prof.H1 - unit.S).cwiseAbs().maxCoeff() == 0.0);

  // spectral basis: diagonal pi^2 (k^2 + l^2), independent of sigma
  auto sys2 = assemble_spectral_2d(10, 0.02, 16);
  for (int j = 0; j < sys2.n; ++j) {
    auto [k, l] = sys2.basis.mode_pairs[j];
    double pi2 = std::numbers::pi * std::numbers::pi;
    CHECK(sys2.H1(j, j) == doctest::Approx(pi2 * (k * k + l * l)).epsilon(1e-14));
    CHECK(sys2.S(j, j) == doctest::Approx(0.02 * sys2.H1(j, j)).epsilon(1e-14));
  }
  CHECK(sys2.H1.cwiseAbs().sum() == doctest::Approx(sys2.H1.diagonal().cwiseAbs().sum()));
}

TEST_CASE("midpoint sampling of sigma is exact for linear profiles") {
  auto lin = [](double x) { return 1.0 + x; };
  auto sys = assemble_fem_1d(4, lin);
  auto exact = stiffness_with_exact_sigma(4, lin);
  CHECK(max_rel_entry_diff(sys.S, exact) < 1e-12);
}

TEST_CASE("midpoint sampling of sigma converges for curved profiles") {
  auto curved = [](double x) { return 1.0 + std::exp(2.0 * x); };
  double e4 = max_rel_entry_diff(assemble_fem_1d(4, curved).S, stiffness_with_exact_sigma(4, curved));
  double e8 = max_rel_entry_diff(assemble_fem_1d(8, curved).S, stiffness_with_exact_sigma(8, curved));
  double e16 =
      max_rel_entry_diff(assemble_fem_1d(16, curved).S, stiffness_with_exact_sigma(16, curved));
  CHECK(e8 < e4 / 3.0);   // midpoint rule: O(h^2) per element
  CHECK(e16 < e8 / 3.0);
}

TEST_CASE("assembly input validation") {
  CHECK_THROWS_AS((void)assemble_fem_1d(1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)assemble_fem_1d(10, -0.5), std::domain_error);
  CHECK_THROWS_AS((void)assemble_fem_1d(10, [](double x) { return x - 0.5; }), std::domain_error);
}

TEST_CASE("spectral 2D basis: eigenvalues, ordering, Nyquist guard") {
  auto sys = assemble_spectral_2d(1, 0.01, 64);
  REQUIRE(sys.n == 1);
  CHECK(sys.M(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sys.S(0, 0) == doctest::Approx(0.02 * M_PI * M_PI).epsilon(1e-13));
  REQUIRE(sys.basis.mode_pairs.size() == 1);
  CHECK(sys.basis.mode_pairs[0].first == 1);
  CHECK(sys.basis.mode_pairs[0].second == 1);

  auto big = assemble_spectral_2d(100, 0.01, 128);
  REQUIRE(big.n == 100);
  CHECK(big.M.isIdentity(1e-14));
  // diagonal S with entries sigma pi^2 (k^2+l^2), ascending
  std::set<std::pair<int, int>> seen;
  double prev = 0.0;
  for (int j = 0; j < 100; ++j) {
    auto [k, l] = big.basis.mode_pairs[j];
    CHECK(seen.insert({k, l}).second);  // distinct
    double lam = 0.01 * M_PI * M_PI * (k * k + l * l);
    CHECK(big.S(j, j) == doctest::Approx(lam).epsilon(1e-13));
    CHECK(big.S(j, j) >= prev - 1e-13);
    prev = big.S(j, j);
    // off-diagonals vanish
    if (j > 0) CHECK(big.S(j, j - 1) == 0.0);
  }
  // first four modes in eigenvalue order with ties broken by smaller k
  CHECK(big.basis.mode_pairs[0] == std::make_pair(1, 1));
  CHECK(big.basis.mode_pairs[1] == std::make_pair(1, 2));
  CHECK(big.basis.mode_pairs[2] == std::make_pair(2, 1));
  CHECK(big.basis.mode_pairs[3] == std::make_pair(2, 2));

  // eval grid too coarse for the highest mode
  CHECK_THROWS_AS((void)assemble_spectral_2d(100, 0.01, 16), std::invalid_argument);
  CHECK_THROWS_AS((void)assemble_spectral_2d(10, -1.0, 64), std::domain_error);
}

TEST_CASE("actuator load 1D: exact hat integrals") {
  auto sys = assemble_fem_1d(10, 1.0);
  // omega = [0.4, 0.6] covers node 0.5's hat entirely: integral = h = 0.1;
  // nodes 0.4 and 0.6 get the half-hat 0.05 each
  auto b = actuator_load(ActuatorShape::from_intervals({{0.4, 0.6}}), sys.basis);
  REQUIRE(b.size() == 9);
  CHECK(b[4] == doctest::Approx(0.1).epsilon(1e-13));   // node 0.5
  CHECK(b[3] == doctest::Approx(0.05).epsilon(1e-13));  // node 0.4
  CHECK(b[5] == doctest::Approx(0.05).epsilon(1e-13));  // node 0.6
  CHECK(b[0] == 0.0);
  CHECK(b[8] == 0.0);
  // full-domain actuator: every hat integrates to h (boundary hats are DOFs'
  // neighbours only, all interior hats have full support inside)
  auto full = actuator_load(ActuatorShape::from_intervals({{0.0, 1.0}}), sys.basis);
  for (int i = 0; i < 9; ++i) CHECK(full[i] == doctest::Approx(0.1).epsilon(1e-13));
  // empty shape
  CHECK(actuator_load(ActuatorShape::empty1d(), sys.basis).norm() == 0.0);
  // partial element coverage: omega = [0.05, 0.1] touches only node 0.1's
  // rising flank: int_{0.05}^{0.1} (x-0.0)/h dx = 0.0375
  auto part = actuator_load(ActuatorShape::from_intervals({{0.05, 0.1}}), sys.basis);
  CHECK(part[0] == doctest::Approx(0.0375).epsilon(1e-12));
  CHECK(part[1] == 0.0);
}

TEST_CASE("actuator load additivity over disjoint shapes") {
  auto sys = assemble_fem_1d(50, 1.0);
  auto a = actuator_load(ActuatorShape::from_intervals({{0.1, 0.3}}), sys.basis);
  auto c = actuator_load(ActuatorShape::from_intervals({{0.6, 0.85}}), sys.basis);
  auto both = actuator_load(ActuatorShape::from_intervals({{0.1, 0.3}, {0.6, 0.85}}), sys.basis);
  CHECK((a + c - both).cwiseAbs().maxCoeff() < 1e-14);

  int m = 32;
  auto sys2 = assemble_spectral_2d(9, 0.01, m);
  std::vector<std::uint8_t> ma(m * m, 0), mb(m * m, 0), mc(m * m, 0);
  for (int i = 0; i < m * m; ++i) {
    if (i % 7 == 0) ma[i] = 1;
    if (i % 7 == 3) mb[i] = 1;
    mc[i] = ma[i] | mb[i];
  }
  auto la = actuator_load(ActuatorShape::from_mask(m, ma), sys2.basis);
  auto lb = actuator_load(ActuatorShape::from_mask(m, mb), sys2.basis);
  auto lc = actuator_load(ActuatorShape::from_mask(m, mc), sys2.basis);
  CHECK((la + lb - lc).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("actuator load 2D matches the closed-form rectangle integral") {
  int m = 64;
  auto sys = assemble_spectral_2d(9, 0.01, m);
  // grid-aligned rectangle [1/4,1/2] x [1/8,3/4]
  double a = 0.25, b = 0.5, c = 0.125, d = 0.75;
  std::vector<std::uint8_t> mask(m * m, 0);
  for (int iy = 0; iy < m; ++iy)
    for (int ix = 0; ix < m; ++ix) {
      double x = (ix + 0.5) / m, y = (iy + 0.5) / m;
      if (x > a && x < b && y > c && y < d) mask[iy * m + ix] = 1;
    }
  auto load = actuator_load(ActuatorShape::from_mask(m, mask), sys.basis);
  for (int j = 0; j < sys.n; ++j) {
    auto [k, l] = sys.basis.mode_pairs[j];
    double exact = 2.0 * (std::cos(k * M_PI * a) - std::cos(k * M_PI * b)) / (k * M_PI) *
                   (std::cos(l * M_PI * c) - std::cos(l * M_PI * d)) / (l * M_PI);
    CHECK(load[j] == doctest::Approx(exact).epsilon(5e-3));
  }
}

TEST_CASE("initial-condition projection reproduces basis functions") {
  auto sys = assemble_fem_1d(20, 1.0);
  // zero function
  auto z = project_initial_condition([](double) { return 0.0; }, sys);
  CHECK(z.norm() == 0.0);
  // a hat function projects onto its own coefficient vector (3-point Gauss
  // integrates the piecewise-quadratic products exactly)
  int k = 7;
  double h = 1.0 / 20;
  auto hat = [&](double x) {
    double center = (k + 1) * h;
    double t = 1.0 - std::abs(x - center) / h;
    return t > 0.0 ? t : 0.0;
  };
  auto coeffs = project_initial_condition(hat, sys);
  for (int i = 0; i < sys.n; ++i) {
    CHECK(coeffs[i] == doctest::Approx(i == k ? 1.0 : 0.0).epsilon(1e-11).scale(1.0));
  }
}

TEST_CASE("initial-condition projection 2D: sine mode coefficients") {
  auto sys = assemble_spectral_2d(9, 0.01, 128);
  auto f = [](double x, double y) { return std::sin(M_PI * x) * std::sin(M_PI * y); };
  auto coeffs = project_initial_condition(f, sys);
  for (int j = 0; j < sys.n; ++j) {
    auto [k, l] = sys.basis.mode_pairs[j];
    double expect = (k == 1 && l == 1) ? 0.5 : 0.0;
    CHECK(std::abs(coeffs[j] - expect) < 1e-9);
  }
}

TEST_CASE("coefficient evaluation interpolates nodal values") {
  auto sys = assemble_fem_1d(10, 1.0);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(9);
  c[4] = 2.0;  // hat at x=0.5
  CHECK(evaluate_coefficients(c, sys.basis, 0.5) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(evaluate_coefficients(c, sys.basis, 0.45) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(evaluate_coefficients(c, sys.basis, 0.0) == 0.0);
  CHECK(evaluate_coefficients(c, sys.basis, 1.0) == 0.0);

  auto sys2 = assemble_spectral_2d(4, 0.01, 32);
  Eigen::VectorXd c2(4);
  c2 << 0.3, -0.1, 0.7, 0.2;
  double x = 0.31, y = 0.77, byhand = 0.0;
  for (int j = 0; j < 4; ++j) {
    auto [k, l] = sys2.basis.mode_pairs[j];
    byhand += c2[j] * 2.0 * std::sin(k * M_PI * x) * std::sin(l * M_PI * y);
  }
  CHECK(evaluate_coefficients(c2, sys2.basis, x, y) == doctest::Approx(byhand).epsilon(1e-13));
}

TEST_CASE("level-set grid matches the basis") {
  auto sys = assemble_fem_1d(200, 0.01);
  auto g = make_levelset_grid(sys.basis);
  CHECK(!g.is2d);
  REQUIRE(g.size() == 201);
  CHECK(g.x.front() == 0.0);
  CHECK(g.x.back() == 1.0);
  CHECK(g.psi.norm() == 0.0);

  auto sys2 = assemble_spectral_2d(9, 0.01, 64);
  auto g2 = make_levelset_grid(sys2.basis);
  CHECK(g2.is2d);
  CHECK(g2.m == 64);
  CHECK(g2.size() == 64 * 64);
}
