#include "hypermin/stability.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

using namespace hypermin;

namespace {

constexpr double kPi = std::numbers::pi;

// First eigenvalue of the 1D Dirichlet second difference on n interior
// nodes of [0, 1].
double discrete_1d(int n) {
  const double h = 1.0 / (n + 1);
  return 4 / (h * h) * std::pow(std::sin(kPi * h / 2), 2);
}

double helicoid_lambda1(double a, double k, double h) {
  const Domain d = Domain::square(k);
  return lambda1(make_jacobi_problem(helicoid_chart(a), d, grid_from_spacing(d, h))).lambda1;
}

}  // namespace

TEST_CASE("flat unit square matches the exact discrete eigenvalue") {
  for (int n : {9, 19, 39}) {
    const auto r = lambda1(flat_problem({0, 1, 0, 1}, {n, n}, [](double, double) { return 0.0; }));
    CHECK(r.lambda1 == doctest::Approx(2 * discrete_1d(n)).epsilon(1e-11));
    CHECK(r.residual < 1e-8);
    CHECK(r.ground_state_one_signed);
    CHECK(r.negative_count == 0);
    CHECK(r.stability == Stability::Stable);
  }
}

TEST_CASE("flat unit square converges to 2 pi^2 at second order") {
  const auto solve = [](int n) {
    return lambda1(flat_problem({0, 1, 0, 1}, {n, n}, [](double, double) { return 0.0; })).lambda1;
  };
  const double exact = 2 * kPi * kPi;
  const double e1 = solve(19) - exact, e2 = solve(39) - exact, e3 = solve(79) - exact;
  CHECK(std::abs(e3) < 3e-3);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.125));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.125));
}

TEST_CASE("Richardson extrapolation on the flat square") {
  const auto r = lambda1_richardson(flat_problem({0, 1, 0, 1}, {19, 19},
                                                 [](double, double) { return 0.0; }));
  REQUIRE(r.lambda1_extrapolated.has_value());
  CHECK(std::abs(*r.lambda1_extrapolated - 2 * kPi * kPi) < std::abs(r.lambda1 - 2 * kPi * kPi) / 50);
}

TEST_CASE("separable potential against a one-dimensional dense solve") {
  const int n = 30;
  const auto q = [](double u) { return 40 * std::exp(-20 * (u - 0.3) * (u - 0.3)); };
  const auto r = lambda1(flat_problem({0, 1, 0, 1}, {n, n}, [&](double u, double) { return q(u); }));
  const double h = 1.0 / (n + 1);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    T(i, i) = 2 / (h * h) - q((i + 1) * h);
    if (i + 1 < n) T(i, i + 1) = T(i + 1, i) = -1 / (h * h);
  }
  const double mu = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(T).eigenvalues()(0);
  CHECK(r.lambda1 == doctest::Approx(mu + discrete_1d(n)).epsilon(1e-10));
}

TEST_CASE("assembled system: symmetry and lumped mass") {
  const SurfaceChart c = helicoid_chart(2.0);
  const Domain d{-1, 1.5, -0.5, 1};
  const JacobiProblem p = make_jacobi_problem(c, d, {14, 9});
  const JacobiSystem s = assemble(p);
  const Eigen::SparseMatrix<double> At = s.A.transpose();
  CHECK((s.A - At).norm() == 0.0);
  for (int i = 0; i < p.grid.nu; ++i) {
    for (int j = 0; j < p.grid.nv; ++j) {
      const Forms f = fundamental_forms(c, p.u_node(i), p.v_node(j));
      const double expect = std::sqrt(f.E * f.G - f.F * f.F) * p.hu() * p.hv();
      CHECK(s.B(j * p.grid.nu + i) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  CHECK((s.B.array() > 0).all());
}

TEST_CASE("assembly rejects non-orthogonal or non-finite coefficients") {
  JacobiProblem p = flat_problem({0, 1, 0, 1}, {5, 5}, [](double, double) { return 0.0; });
  p.field = [](double, double) { return JacobiCoefficients{1, 0.3, 1, 0}; };
  CHECK_THROWS(assemble(p));
  p.field = [](double, double) { return JacobiCoefficients{1, 0, 1, std::nan("")}; };
  CHECK_THROWS(assemble(p));
}

TEST_CASE("inertia agrees with dense eigenvalue counts for random potentials") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const int nu = 10 + static_cast<int>(30 * U(rng)), nv = 10 + static_cast<int>(30 * U(rng));
    const double level = 60 * U(rng);
    const double c1 = 20 * (U(rng) - 0.5), c2 = 20 * (U(rng) - 0.5), f1 = 1 + 3 * U(rng);
    const JacobiProblem p = flat_problem({0, kPi, 0, kPi}, {nu, nv}, [=](double u, double v) {
      return level + c1 * std::cos(f1 * u) + c2 * std::sin(f1 * v + u);
    });
    const JacobiSystem s = assemble(p);
    const Eigen::VectorXd ev = dense_eigenvalues(s);
    int dense = 0;
    for (int k = 0; k < ev.size(); ++k) dense += ev(k) < 0;
    INFO("trial " << trial << " grid " << nu << "x" << nv);
    CHECK(morse_index(s) == dense);
    const Inertia in = inertia(s);
    CHECK(in.negative == dense);
    CHECK(in.negative + in.zero + in.positive == p.size());
    CHECK(lambda1(s).lambda1 == doctest::Approx(ev(0)).epsilon(1e-8));
  }
}

TEST_CASE("Gershgorin bound lies below the spectrum") {
  const JacobiSystem s = assemble(make_jacobi_problem(helicoid_chart(3.0), Domain::square(1.5), {20, 20}));
  CHECK(gershgorin_lower_bound(s) <= dense_eigenvalues(s)(0));
}

TEST_CASE("helicoid regression values") {
  // a = 1 is stable on [-3,3]^2 and two grids agree.
  const double coarse = helicoid_lambda1(1.0, 3, 0.1), fine = helicoid_lambda1(1.0, 3, 0.05);
  CHECK(coarse == doctest::Approx(2.2187377017).epsilon(1e-8));
  CHECK(fine == doctest::Approx(2.2192954799).epsilon(1e-8));
  CHECK(std::abs(coarse - fine) < 1e-3 * fine);

  // The totally geodesic plane.
  CHECK(helicoid_lambda1(0.0, 3, 0.1) == doctest::Approx(2.8014544401).epsilon(1e-8));
  CHECK(morse_index(make_jacobi_problem(helicoid_chart(0.0), Domain::square(3), {59, 59})) == 0);

  // a = 3 is unstable on [-6,6]^2.
  const Domain d = Domain::square(6);
  const auto r = lambda1(make_jacobi_problem(helicoid_chart(3.0), d, grid_from_spacing(d, 0.05)));
  CHECK(r.lambda1 == doctest::Approx(-2.3422195701).epsilon(1e-8));
  CHECK(r.stability == Stability::Unstable);
  CHECK(r.ground_state_one_signed);
}

TEST_CASE("lambda1 against a for a fixed domain is decreasing") {
  double prev = 1e300;
  for (double a : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
    const double l = helicoid_lambda1(a, 3, 0.1);
    CHECK(l < prev);
    prev = l;
  }
}

TEST_CASE("exhaustion of the helicoid") {
  const auto chart = helicoid_chart(2.5);
  const ExhaustionResult e = exhaustion(chart, square_schedule({1, 2, 3, 4, 5, 6}), 0.1);
  CHECK(e.monotone);
  REQUIRE(e.reports.size() == 6);
  for (std::size_t k = 1; k < e.reports.size(); ++k) {
    CHECK(e.reports[k].lambda1 < e.reports[k - 1].lambda1);
  }
  // Regression: the first negative domain is [-2,2]^2.
  CHECK(e.reports[0].lambda1 > 0);
  CHECK(e.reports[1].lambda1 < 0);
  CHECK(e.reports[1].negative_count == 1);
  CHECK(e.limit_estimate < e.reports.back().lambda1);

  const ExhaustionResult s = exhaustion(helicoid_chart(1.5), square_schedule({1, 2, 3, 4, 5, 6}), 0.1);
  CHECK(s.monotone);
  for (const auto& r : s.reports) {
    CHECK(r.lambda1 > 0);
    CHECK(r.negative_count == 0);
  }
  CHECK(s.limit_estimate > 1.3);
  CHECK(s.limit_estimate < 1.41);

  CHECK_THROWS_AS(exhaustion(chart, square_schedule({2, 1}), 0.1), std::invalid_argument);
}

TEST_CASE("bisection") {
  const auto linear = [](double p) {
    SpectrumReport r;
    r.lambda1 = 1.7 - p;
    return r;
  };
  const CriticalResult c = bisect_zero_crossing(linear, 0, 4, 1e-6);
  CHECK(c.estimate == doctest::Approx(1.7).epsilon(1e-6));
  CHECK(c.upper - c.lower <= 1e-6);
  CHECK(c.trace.size() >= 22);
  CHECK_THROWS_AS(bisect_zero_crossing(linear, 2, 4, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(bisect_zero_crossing(linear, 4, 2, 1e-3), std::invalid_argument);
  // Either orientation is accepted.
  const auto rising = [](double p) {
    SpectrumReport r;
    r.lambda1 = p - 0.4;
    return r;
  };
  CHECK(bisect_zero_crossing(rising, 0, 1, 1e-8).estimate == doctest::Approx(0.4).epsilon(1e-7));
}

TEST_CASE("critical pitch rejects an invalid bracket") {
  CHECK_THROWS_AS(critical_pitch(Domain::square(2), 0.1, 2.6, 4.0, 1e-2), std::invalid_argument);
}

TEST_CASE("critical pitch on a small domain lies above the larger-domain value") {
  const CriticalResult small = critical_pitch(Domain::square(3), 0.1, 1.0, 4.0, 1e-2);
  const CriticalResult large = critical_pitch(Domain::square(4), 0.1, 1.0, 4.0, 1e-2);
  CHECK(small.estimate > large.estimate);
  CHECK(large.estimate > 2.17966);
}

TEST_CASE("solver failure reports the last residual") {
  SolverOptions o;
  o.max_iterations = 0;
  try {
    lambda1(flat_problem({0, 1, 0, 1}, {8, 8}, [](double, double) { return 0.0; }), o);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(!(e.last_residual() < 1e-8));
  }
}

TEST_CASE("classification bands") {
  CHECK(classify(0.1) == Stability::Stable);
  CHECK(classify(-0.1) == Stability::Unstable);
  CHECK(classify(5e-5) == Stability::Marginal);
  CHECK(classify(-5e-5) == Stability::Marginal);
  CHECK(classify(0.01, 0.1) == Stability::Marginal);
}

TEST_CASE("grid and domain helpers") {
  const Grid g = grid_from_spacing(Domain::square(6), 0.04);
  CHECK(g.nu == 299);
  CHECK(g.nv == 299);
  const Grid p = grid_from_spacing({0, 1, 0, 2 * kPi}, 0.1, VBoundary::Periodic);
  CHECK(p.nu == 9);
  CHECK(p.nv == 63);
  CHECK(Domain::square(2).contains(Domain::square(1)));
  CHECK(!Domain::square(1).contains(Domain::square(2)));
  CHECK(square_schedule(default_half_widths()).size() == 8);
}

TEST_CASE("ball catenoid: stable and unstable necks") {
  // abar above the critical neck is stable, below it unstable.
  const auto stable = lambda1(ball_catenoid_problem(std::atanh(1 / 1.5), 1.8, 0.01, 16));
  CHECK(stable.lambda1 > 0);
  const auto unstable = lambda1(ball_catenoid_problem(std::atanh(1 / 2.5), 1.8, 0.01, 16));
  CHECK(unstable.lambda1 < 0);
  CHECK(unstable.negative_count == 1);
  CHECK(unstable.ground_state_one_signed);
}
