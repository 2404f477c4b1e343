#pragma once

#include <cmath>

namespace hypermin {

/// Second-order forward-mode jet in two variables (u, v).
///
/// Carries the value together with the exact first and second partial
/// derivatives, so chart maps written once as templates over the scalar type
/// yield analytic derivative data when evaluated on Jet2.
template <class Scalar>
struct Jet2 {
  Scalar v{0}, du{0}, dv{0}, duu{0}, duv{0}, dvv{0};

  Jet2() = default;
  Jet2(Scalar value) : v(value) {}  // NOLINT: implicit lift of constants
  Jet2(Scalar value, Scalar d_u, Scalar d_v)
      : v(value), du(d_u), dv(d_v) {}

  static Jet2 variable_u(Scalar value) { return Jet2(value, 1, 0); }
  static Jet2 variable_v(Scalar value) { return Jet2(value, 0, 1); }

  Jet2 operator-() const { return {-v, -du, -dv, -duu, -duv, -dvv}; }

  Jet2& operator+=(const Jet2& o) {
    v += o.v; du += o.du; dv += o.dv; duu += o.duu; duv += o.duv; dvv += o.dvv;
    return *this;
  }
  Jet2& operator-=(const Jet2& o) { return *this += -o; }
  Jet2& operator*=(const Jet2& o) { return *this = *this * o; }
  Jet2& operator/=(const Jet2& o) { return *this = *this / o; }

  friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    return {a.v * b.v,
            a.du * b.v + a.v * b.du,
            a.dv * b.v + a.v * b.dv,
            a.duu * b.v + 2 * a.du * b.du + a.v * b.duu,
            a.duv * b.v + a.du * b.dv + a.dv * b.du + a.v * b.duv,
            a.dvv * b.v + 2 * a.dv * b.dv + a.v * b.dvv};
  }
  friend Jet2 operator/(const Jet2& a, const Jet2& b) {
    return a * chain(b, Scalar(1) / b.v, -Scalar(1) / (b.v * b.v),
                     Scalar(2) / (b.v * b.v * b.v));
  }

  /// Composes a scalar function f with this jet given f(x), f'(x), f''(x).
  friend Jet2 chain(const Jet2& x, Scalar f, Scalar df, Scalar d2f) {
    return {f,
            df * x.du,
            df * x.dv,
            d2f * x.du * x.du + df * x.duu,
            d2f * x.du * x.dv + df * x.duv,
            d2f * x.dv * x.dv + df * x.dvv};
  }

 private:
  Jet2(Scalar a, Scalar b, Scalar c, Scalar d, Scalar e, Scalar f)
      : v(a), du(b), dv(c), duu(d), duv(e), dvv(f) {}
};

template <class S> Jet2<S> sin(const Jet2<S>& x) {
  using std::sin; using std::cos;
  return chain(x, sin(x.v), cos(x.v), -sin(x.v));
}
template <class S> Jet2<S> cos(const Jet2<S>& x) {
  using std::sin; using std::cos;
  return chain(x, cos(x.v), -sin(x.v), -cos(x.v));
}
template <class S> Jet2<S> sinh(const Jet2<S>& x) {
  using std::sinh; using std::cosh;
  return chain(x, sinh(x.v), cosh(x.v), sinh(x.v));
}
template <class S> Jet2<S> cosh(const Jet2<S>& x) {
  using std::sinh; using std::cosh;
  return chain(x, cosh(x.v), sinh(x.v), cosh(x.v));
}
template <class S> Jet2<S> exp(const Jet2<S>& x) {
  using std::exp;
  const S e = exp(x.v);
  return chain(x, e, e, e);
}
template <class S> Jet2<S> sqrt(const Jet2<S>& x) {
  using std::sqrt;
  const S r = sqrt(x.v);
  return chain(x, r, S(0.5) / r, S(-0.25) / (r * x.v));
}

/// Plain-scalar overload of chain so templated code can treat double and
/// Jet2 uniformly when composing with tabulated functions.
inline double chain(double x, double f, double, double) {
  (void)x;
  return f;
}

template <class S> S value_of(const Jet2<S>& x) { return x.v; }
inline double value_of(double x) { return x; }

}  // namespace hypermin
