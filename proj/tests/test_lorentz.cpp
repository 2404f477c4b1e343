#include "hypermin/lorentz.hpp"
#include "hypermin/surfaces.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hypermin;

namespace {

// Random hyperboloid point with spatial part of size up to `r`.
LorentzVecd random_point(std::mt19937_64& rng, double r = 3.0) {
  std::uniform_real_distribution<double> U(-r, r);
  const double a = U(rng), b = U(rng), c = U(rng);
  return LorentzVecd(std::sqrt(1 + a * a + b * b + c * c), a, b, c);
}

Vec3<double> random_ball(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1, 1);
  for (;;) {
    Vec3<double> p(U(rng), U(rng), U(rng));
    if (p.squaredNorm() < 0.98) return p;
  }
}

}  // namespace

TEST_CASE("minkowski dot of basis and boosted vectors") {
  CHECK(minkowski_dot(LorentzVecd(1, 0, 0, 0), LorentzVecd(1, 0, 0, 0)) == -1.0);
  CHECK(minkowski_dot(LorentzVecd(0, 1, 0, 0), LorentzVecd(0, 1, 0, 0)) == 1.0);
  const LorentzVecd b(std::cosh(1.0), std::sinh(1.0), 0, 0);
  CHECK(minkowski_dot(b, b) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("minkowski dot is bilinear and symmetric") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N;
  for (int k = 0; k < 200; ++k) {
    LorentzVecd x, y, z;
    for (int i = 0; i < 4; ++i) { x(i) = N(rng); y(i) = N(rng); z(i) = N(rng); }
    const double s = N(rng);
    CHECK(minkowski_dot(x, y) == minkowski_dot(y, x));
    CHECK(minkowski_dot(x + s * y, z) ==
          doctest::Approx(minkowski_dot(x, z) + s * minkowski_dot(y, z)).epsilon(1e-12));
  }
}

TEST_CASE("model point validation") {
  CHECK_NOTHROW(HyperboloidPoint<double>(LorentzVecd(1, 0, 0, 0)));
  CHECK_THROWS_AS(HyperboloidPoint<double>(LorentzVecd(1.1, 0, 0, 0)), InvalidModelPoint);
  CHECK_THROWS_AS(HyperboloidPoint<double>(LorentzVecd(-1, 0, 0, 0)), InvalidModelPoint);
  CHECK_THROWS_AS(BallPoint<double>(Vec3<double>(1, 0, 0)), InvalidModelPoint);
  CHECK_THROWS_AS(UpperHalfPoint<double>({0, 0}, 0.0), InvalidModelPoint);
}

TEST_CASE("basepoint maps to the origin and to (0, 1)") {
  const HyperboloidPoint<double> o(LorentzVecd(1, 0, 0, 0));
  CHECK(hyperboloid_to_ball(o).coords().norm() == 0.0);
  const auto uh = hyperboloid_to_upper_half(o);
  CHECK(std::abs(uh.z()) == doctest::Approx(0.0));
  CHECK(uh.t() == doctest::Approx(1.0));
}

TEST_CASE("helicoid in the ball and upper half-space models") {
  for (double a : {0.0, 1.0, 5.0}) {
    const auto b = hyperboloid_to_ball(HyperboloidPoint<double>(helicoid_point(a, 1.0, 0.0)));
    CHECK(b.coords()(0) == doctest::Approx(std::sinh(1.0) / (1 + std::cosh(1.0))).epsilon(1e-15));
    CHECK(std::abs(b.coords()(1)) < 1e-15);
    CHECK(std::abs(b.coords()(2)) < 1e-15);

    const auto uh = hyperboloid_to_upper_half(HyperboloidPoint<double>(helicoid_point(a, 0.0, 1.0)));
    CHECK(std::abs(uh.z()) < 1e-15);
    CHECK(uh.t() == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  }
  // Pointwise closed forms on a grid.
  const double a = 2.3;
  for (double u = -2; u <= 2; u += 0.5) {
    for (double v = -2; v <= 2; v += 0.5) {
      const HyperboloidPoint<double> p(helicoid_point(a, u, v));
      const double den = 1 + std::cosh(u) * std::cosh(v);
      const auto b = hyperboloid_to_ball(p).coords();
      CHECK(b(0) == doctest::Approx(std::sinh(u) * std::cos(a * v) / den).epsilon(1e-13));
      CHECK(b(1) == doctest::Approx(std::sinh(u) * std::sin(a * v) / den).epsilon(1e-13));
      CHECK(b(2) == doctest::Approx(std::cosh(u) * std::sinh(v) / den).epsilon(1e-13));
      const auto uh = hyperboloid_to_upper_half(p);
      const std::complex<double> z = std::exp(std::complex<double>(v, a * v)) * std::tanh(u);
      CHECK(std::abs(uh.z() - z) < 1e-12 * std::max(1.0, std::abs(z)));
      CHECK(uh.t() == doctest::Approx(std::exp(v) / std::cosh(u)).epsilon(1e-13));
    }
  }
}

TEST_CASE("model round trips on random points") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    const BallPoint<double> b(random_ball(rng));
    const auto b2 = hyperboloid_to_ball(ball_to_hyperboloid(b));
    CHECK((b2.coords() - b.coords()).lpNorm<Eigen::Infinity>() < 1e-12);

    std::uniform_real_distribution<double> U(-3, 3), T(0.05, 5);
    const UpperHalfPoint<double> q({U(rng), U(rng)}, T(rng));
    const auto q2 = hyperboloid_to_upper_half(upper_half_to_hyperboloid(q));
    CHECK(std::abs(q2.z() - q.z()) < 1e-12 * std::max(1.0, std::abs(q.z())));
    CHECK(std::abs(q2.t() - q.t()) < 1e-12 * std::max(1.0, q.t()));

    const LorentzVecd x = random_point(rng);
    const HyperboloidPoint<double> h(x);
    const auto x2 = to_hyperboloid(to_model(h, Model::UpperHalf));
    CHECK((x2.coords() - x).norm() < 1e-12 * x.norm());
  }
}

TEST_CASE("distance examples") {
  const ModelPoint<double> o = HyperboloidPoint<double>(LorentzVecd(1, 0, 0, 0));
  const ModelPoint<double> p = HyperboloidPoint<double>(LorentzVecd(std::cosh(1.0), std::sinh(1.0), 0, 0));
  CHECK(hyperbolic_distance(o, o) == 0.0);
  CHECK(hyperbolic_distance(o, p) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(hyperbolic_distance(p, o) == hyperbolic_distance(o, p));
}

TEST_CASE("distance triangle inequality on random triples") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 1000; ++k) {
    const ModelPoint<double> p = HyperboloidPoint<double>(random_point(rng));
    const ModelPoint<double> q = HyperboloidPoint<double>(random_point(rng));
    const ModelPoint<double> r = HyperboloidPoint<double>(random_point(rng));
    const double pq = hyperbolic_distance(p, q), qr = hyperbolic_distance(q, r),
                 pr = hyperbolic_distance(p, r);
    CHECK(pq >= 0);
    CHECK(pr <= pq + qr + 1e-12);
  }
}

TEST_CASE("distance is preserved across models") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    const HyperboloidPoint<double> p(random_point(rng, 2)), q(random_point(rng, 2));
    const double d = hyperbolic_distance(ModelPoint<double>(p), ModelPoint<double>(q));
    for (Model m : {Model::Ball, Model::UpperHalf}) {
      const double dm = hyperbolic_distance(to_model(p, m),
                                            to_model(q, m));
      CHECK(std::abs(dm - d) < 1e-10 * std::max(1.0, d));
    }
    // Mixed models convert through the hyperboloid.
    const double mixed = hyperbolic_distance(to_model(p, Model::Ball),
                                             to_model(q, Model::UpperHalf));
    CHECK(std::abs(mixed - d) < 1e-10 * std::max(1.0, d));
  }
}

TEST_CASE("helicoid inner products depend only on the v difference") {
  for (double a : {0.5, 2.0}) {
    for (double u : {-1.0, 0.4, 1.5}) {
      for (double dv : {0.3, 1.2}) {
        const double ref = minkowski_dot(helicoid_point(a, u, 0.0), helicoid_point(a, u, dv));
        for (double v0 : {-2.0, -0.5, 1.0, 2.5}) {
          const double c = minkowski_dot(helicoid_point(a, u, v0), helicoid_point(a, u, v0 + dv));
          CHECK(c == doctest::Approx(ref).epsilon(1e-12));
        }
      }
    }
  }
}
