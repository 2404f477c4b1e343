#pragma once

// Lorentzian 4-space and the three models of hyperbolic 3-space.
//
// Coordinates are stored 0-based: a LorentzVec (x1, x2, x3, x4) in the usual
// 1-based notation lives in entries 0..3, with entry 0 timelike.

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <variant>

namespace hypermin {

template <class Scalar>
using LorentzVec = Eigen::Matrix<Scalar, 4, 1>;
template <class Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

using LorentzVecd = LorentzVec<double>;
using Vec3d = Vec3<double>;

/// Signature (-,+,+,+) bilinear form.
template <class DerivedA, class DerivedB>
auto minkowski_dot(const Eigen::MatrixBase<DerivedA>& a,
                   const Eigen::MatrixBase<DerivedB>& b) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(DerivedA, 4);
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(DerivedB, 4);
  return -a(0) * b(0) + a(1) * b(1) + a(2) * b(2) + a(3) * b(3);
}

/// Default tolerance on model invariants.
inline constexpr double kModelTolerance = 1e-12;

enum class Model { Hyperboloid, Ball, UpperHalf };

inline const char* to_string(Model m) {
  switch (m) {
    case Model::Hyperboloid: return "hyperboloid";
    case Model::Ball: return "ball";
    case Model::UpperHalf: return "upper-half";
  }
  return "?";
}

class InvalidModelPoint : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Point on the upper sheet of <x,x> = -1. The constraint is scaled by the
/// magnitude of x1 so that far-out points are judged by relative error.
template <class Scalar>
class HyperboloidPoint {
 public:
  explicit HyperboloidPoint(const LorentzVec<Scalar>& x,
                            Scalar tol = Scalar(kModelTolerance))
      : x_(x) {
    using std::abs;
    const Scalar defect = abs(minkowski_dot(x, x) + Scalar(1));
    const Scalar scale = std::max(Scalar(1), x(0) * x(0));
    if (!(defect <= tol * scale) || !(x(0) >= Scalar(1) - tol)) {
      throw InvalidModelPoint("hyperboloid point violates <x,x> = -1, x1 >= 1 "
                              "(defect " + std::to_string(double(defect)) + ")");
    }
  }

  const LorentzVec<Scalar>& coords() const { return x_; }

 private:
  LorentzVec<Scalar> x_;
};

template <class Scalar>
class BallPoint {
 public:
  explicit BallPoint(const Vec3<Scalar>& p) : p_(p) {
    if (!(p.squaredNorm() < Scalar(1))) {
      throw InvalidModelPoint("ball point outside the open unit ball");
    }
  }

  const Vec3<Scalar>& coords() const { return p_; }

 private:
  Vec3<Scalar> p_;
};

/// Upper half-space point z + t j with z = x + i y.
template <class Scalar>
class UpperHalfPoint {
 public:
  UpperHalfPoint(std::complex<Scalar> z, Scalar t) : z_(z), t_(t) {
    if (!(t > Scalar(0)) || !std::isfinite(double(std::abs(z)))) {
      throw InvalidModelPoint("upper half-space point needs t > 0");
    }
  }

  std::complex<Scalar> z() const { return z_; }
  Scalar t() const { return t_; }
  Vec3<Scalar> coords() const { return {z_.real(), z_.imag(), t_}; }

 private:
  std::complex<Scalar> z_;
  Scalar t_;
};

template <class Scalar>
using ModelPoint = std::variant<HyperboloidPoint<Scalar>, BallPoint<Scalar>,
                                UpperHalfPoint<Scalar>>;

template <class Scalar>
Model model_of(const ModelPoint<Scalar>& p) {
  return static_cast<Model>(p.index());
}

// Ball output ordering (x, y, z) = (x3, x4, x2) / (1 + x1) puts the helicoid
// axis (x1, x2)-plane on the ball's z-axis, and the catenoid rotation axis
// (x1, x3)-plane on the ball's x-axis.
template <class Scalar>
BallPoint<Scalar> hyperboloid_to_ball(const HyperboloidPoint<Scalar>& p) {
  const auto& x = p.coords();
  const Scalar d = Scalar(1) + x(0);
  return BallPoint<Scalar>(Vec3<Scalar>(x(2) / d, x(3) / d, x(1) / d));
}

template <class Scalar>
HyperboloidPoint<Scalar> ball_to_hyperboloid(const BallPoint<Scalar>& p) {
  const auto& b = p.coords();
  const Scalar r2 = b.squaredNorm();
  const Scalar s = Scalar(1) - r2;
  LorentzVec<Scalar> x((Scalar(1) + r2) / s, 2 * b(2) / s, 2 * b(0) / s,
                       2 * b(1) / s);
  return HyperboloidPoint<Scalar>(x);
}

// Upper half-space: t = 1/(x1 - x2), z = (x3 + i x4)/(x1 - x2). The geodesic
// (cosh v, sinh v, 0, 0) maps to the t-axis.
template <class Scalar>
UpperHalfPoint<Scalar> hyperboloid_to_upper_half(
    const HyperboloidPoint<Scalar>& p) {
  const auto& x = p.coords();
  // x1 - x2 = 1/(x1 + x2) on the hyperboloid when x3 = x4 = 0; using the
  // identity (x1 - x2)(x1 + x2) = 1 + x3^2 + x4^2 avoids cancellation.
  const Scalar sum = x(0) + x(1);
  const Scalar diff = (Scalar(1) + x(2) * x(2) + x(3) * x(3)) / sum;
  return UpperHalfPoint<Scalar>(std::complex<Scalar>(x(2), x(3)) / diff,
                                Scalar(1) / diff);
}

template <class Scalar>
HyperboloidPoint<Scalar> upper_half_to_hyperboloid(
    const UpperHalfPoint<Scalar>& p) {
  const Scalar t = p.t();
  const Scalar z2 = std::norm(p.z());
  const Scalar sum = (t * t + z2) / t;  // x1 + x2
  const Scalar diff = Scalar(1) / t;    // x1 - x2
  LorentzVec<Scalar> x((sum + diff) / 2, (sum - diff) / 2, p.z().real() / t,
                       p.z().imag() / t);
  return HyperboloidPoint<Scalar>(x);
}

template <class Scalar>
HyperboloidPoint<Scalar> to_hyperboloid(const ModelPoint<Scalar>& p) {
  struct Visitor {
    HyperboloidPoint<Scalar> operator()(const HyperboloidPoint<Scalar>& h) const { return h; }
    HyperboloidPoint<Scalar> operator()(const BallPoint<Scalar>& b) const {
      return ball_to_hyperboloid(b);
    }
    HyperboloidPoint<Scalar> operator()(const UpperHalfPoint<Scalar>& u) const {
      return upper_half_to_hyperboloid(u);
    }
  };
  return std::visit(Visitor{}, p);
}

template <class Scalar>
ModelPoint<Scalar> to_model(const HyperboloidPoint<Scalar>& p, Model m) {
  switch (m) {
    case Model::Ball: return hyperboloid_to_ball(p);
    case Model::UpperHalf: return hyperboloid_to_upper_half(p);
    case Model::Hyperboloid: break;
  }
  return p;
}

/// Hyperbolic distance, evaluated in the hyperboloid model as
/// d = 2 asinh(|p - q| / 2), which equals acosh(-<p,q>) but keeps full
/// precision for nearby points.
template <class Scalar>
Scalar hyperbolic_distance(const ModelPoint<Scalar>& p,
                           const ModelPoint<Scalar>& q) {
  using std::asinh;
  using std::sqrt;
  const LorentzVec<Scalar> d =
      to_hyperboloid(p).coords() - to_hyperboloid(q).coords();
  const Scalar chord2 = std::max(Scalar(0), minkowski_dot(d, d));
  return 2 * asinh(sqrt(chord2) / 2);
}

}  // namespace hypermin
