#pragma once

// Parametrized minimal surfaces in H^3: the helicoid family and the
// spherical, hyperbolic, parabolic and ball-model catenoids. Every chart maps
// parameters (u, v) into the hyperboloid model.

#include "hypermin/jet.hpp"
#include "hypermin/lorentz.hpp"
#include "hypermin/quadrature.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace hypermin {

/// Antiderivative F(s) = int_0^s f on [lo, hi] (lo <= 0 <= hi), tabulated on a
/// uniform grid and interpolated by cubic Hermite pieces that use the exact
/// integrand as slope. The grid is refined until the interpolant agrees with
/// direct quadrature at every panel midpoint to within tol.
class TabulatedIntegral {
 public:
  TabulatedIntegral(std::function<double(double)> integrand, double lo,
                    double hi, double tol, double initial_step = 0.05);

  double value(double s) const;
  double integrand(double s) const { return f_(s); }
  double lower() const { return lo_; }
  double upper() const { return hi_; }
  double step() const { return h_; }
  double tolerance() const { return tol_; }
  /// Largest midpoint discrepancy measured during construction.
  double interpolation_error() const { return interp_error_; }
  const std::vector<double>& nodes() const { return s_; }
  const std::vector<double>& values() const { return F_; }

 private:
  void tabulate(double h);

  std::function<double(double)> f_;
  double lo_, hi_, tol_, h_ = 0, interp_error_ = 0;
  std::vector<double> s_, F_, dF_;
};

// ---------------------------------------------------------------------------
// Catenoid generating curves

enum class CatenoidType { Spherical, Hyperbolic, Parabolic };

struct CatenoidKind {
  CatenoidType type = CatenoidType::Spherical;
  double atilde = 1.0;  // ignored for Parabolic

  static CatenoidKind spherical(double at) { return {CatenoidType::Spherical, at}; }
  static CatenoidKind hyperbolic(double at) { return {CatenoidType::Hyperbolic, at}; }
  static CatenoidKind parabolic() { return {CatenoidType::Parabolic, 0.0}; }
};

const char* to_string(CatenoidType t);

/// Integrand of the angular profile phi(s) (spherical/hyperbolic) or of
/// x4(s)/x1(s) (parabolic).
template <class S>
S catenoid_integrand(const CatenoidKind& kind, const S& s) {
  using std::cosh;
  using std::sqrt;
  const double at = kind.atilde;
  const S c = cosh(2 * s);
  switch (kind.type) {
    case CatenoidType::Spherical:
      return std::sqrt(at * at - 0.25) / ((at * c + 0.5) * sqrt(at * c - 0.5));
    case CatenoidType::Hyperbolic:
      return std::sqrt(at * at - 0.25) / ((at * c - 0.5) * sqrt(at * c + 0.5));
    case CatenoidType::Parabolic:
      break;
  }
  return S(1) / (c * sqrt(c));
}

/// Sampled generating curve of a catenoid in the hyperboloid model, in the
/// coordinates of its adapted (pseudo-)orthonormal basis.
class CatenoidProfile {
 public:
  CatenoidProfile(CatenoidKind kind, double s_max, double tol);

  const CatenoidKind& kind() const { return kind_; }
  double s_max() const { return integral_.upper(); }
  double tolerance() const { return integral_.tolerance(); }
  const TabulatedIntegral& integral() const { return integral_; }

  /// phi(s) for spherical/hyperbolic; the bare integral x4/x1 for parabolic.
  template <class S>
  S angle(const S& s) const {
    check_range(value_of(s));
    const double sv = value_of(s);
    const double f = integral_.integrand(sv);
    const double df = catenoid_integrand(kind_, Jet2<double>::variable_u(sv)).du;
    return chain(s, integral_.value(sv), f, df);
  }

  template <class S>
  S x1(const S& s) const {
    using std::cosh;
    using std::sqrt;
    switch (kind_.type) {
      case CatenoidType::Spherical: return sqrt(kind_.atilde * cosh(2 * s) - 0.5);
      case CatenoidType::Hyperbolic: return sqrt(kind_.atilde * cosh(2 * s) + 0.5);
      case CatenoidType::Parabolic: break;
    }
    return sqrt(cosh(2 * s));
  }

  /// Coordinates (x3, x4) of the curve point in the adapted basis.
  template <class S>
  std::pair<S, S> x3_x4(const S& s) const {
    using std::cos;
    using std::cosh;
    using std::sin;
    using std::sinh;
    using std::sqrt;
    const S x = x1(s);
    const S phi = angle(s);
    switch (kind_.type) {
      case CatenoidType::Spherical: {
        const S r = sqrt(x * x + 1.0);
        return {r * sinh(phi), r * cosh(phi)};
      }
      case CatenoidType::Hyperbolic: {
        const S r = sqrt(x * x - 1.0);
        return {r * sin(phi), r * cos(phi)};
      }
      case CatenoidType::Parabolic: break;
    }
    const S x4 = x * phi;
    return {(1.0 + x4 * x4) / (2.0 * x), x4};
  }

  struct Sample {
    double s, x1, angle, x3, x4;
  };
  /// One row per tabulation node over [-s_max, s_max].
  std::vector<Sample> samples() const;

 private:
  void check_range(double s) const;

  CatenoidKind kind_;
  TabulatedIntegral integral_;
};

CatenoidProfile catenoid_profile(const CatenoidKind& kind, double s_max,
                                 double tol = 1e-10);

/// Pseudo-orthonormal basis of L^4 used for the parabolic catenoid:
/// <e1,e1> = <e3,e3> = 0, <e1,e3> = -1, e2 and e4 unit spacelike and
/// orthogonal to everything else. Columns are e1..e4 in standard coordinates.
Eigen::Matrix4d parabolic_basis();

/// Conjugate helicoid pitch of a catenoid.
double relation_a_of_catenoid(const CatenoidKind& kind);
/// a = coth(abar) for the ball-model spherical catenoid C_abar.
double relation_a_of_ball_catenoid(double abar);
/// atilde with 2 atilde = cosh(2 abar).
double atilde_of_abar(double abar);

// ---------------------------------------------------------------------------
// Ball-model spherical catenoid

/// Warped-product metric cosh^2(y) dx^2 + dy^2 on the half-plane y >= 0 that
/// describes B^3 modulo rotations about the axis gamma_0.
struct WarpedMetric {
  static double dx2_coefficient(double y) { return std::cosh(y) * std::cosh(y); }
  static double dy2_coefficient(double) { return 1.0; }
  static double line_element(double y, double dx, double dy) {
    return dx2_coefficient(y) * dx * dx + dy2_coefficient(y) * dy * dy;
  }
};

/// Generating curve sigma_abar = {(x(t), t) : t >= abar} in warped
/// coordinates. The endpoint singularity at t = abar is removed by writing
/// t = abar + w^2; w >= 0 gives the + branch, w <= 0 the - branch, and the two
/// glue smoothly at w = 0.
class BallCatenoidCurve {
 public:
  BallCatenoidCurve(double abar, double t_max, double tol);

  double abar() const { return abar_; }
  double t_max() const { return abar_ + w_max_ * w_max_; }
  double w_max() const { return w_max_; }

  /// dx/dw, smooth and even in w.
  template <class S>
  static S dx_dw(double abar, const S& w) {
    using std::cosh;
    using std::sinh;
    using std::sqrt;
    const S w2 = w * w;
    const S tau = abar + w2;
    // 2|w| / sqrt(sinh(2 w^2)) written through the entire function
    // sinh(z)/z so it stays smooth at w = 0.
    const S z = 2.0 * w2;
    const S shc = value_of(z) < 1e-4 ? 1.0 + z * z / 6.0 + z * z * z * z / 120.0
                                     : sinh(z) / z;
    const S h = std::sqrt(2.0) / sqrt(shc);
    return std::sinh(2 * abar) * h / (cosh(tau) * sqrt(sinh(2.0 * (tau + abar))));
  }

  template <class S>
  S x_of_w(const S& w) const {
    check_range(value_of(w));
    const double wv = value_of(w);
    const double f = integral_.integrand(wv);
    const double df = dx_dw(abar_, Jet2<double>::variable_u(wv)).du;
    return chain(w, integral_.value(wv), f, df);
  }

  template <class S>
  S t_of_w(const S& w) const {
    return abar_ + w * w;
  }

  /// x(t) on the +/- branch; t must lie in [abar, t_max].
  double x_of_t(double t, bool plus_branch = true) const;

  /// Direct form of the integrand dx/dt for t > abar (singular at t = abar).
  double dx_dt(double t) const;

  const TabulatedIntegral& integral() const { return integral_; }

  struct Sample {
    double t, x_plus, x_minus;
  };
  std::vector<Sample> samples(int count) const;

 private:
  void check_range(double w) const;

  double abar_, w_max_;
  TabulatedIntegral integral_;
};

BallCatenoidCurve ball_catenoid_generating_curve(double abar, double t_max,
                                                 double tol = 1e-10);

// ---------------------------------------------------------------------------
// Charts

enum class SurfaceKind {
  Helicoid,
  SphericalCatenoid,
  HyperbolicCatenoid,
  ParabolicCatenoid,
  BallCatenoid,
  Custom
};

const char* to_string(SurfaceKind k);

/// Position and first/second partials of a chart at one parameter point.
struct ChartJet {
  LorentzVecd x, xu, xv, xuu, xuv, xvv;
};

/// Parametrized patch (u, v) -> hyperboloid model. Immutable and cheap to
/// copy; profile data is shared.
class SurfaceChart {
 public:
  using PointFn = std::function<LorentzVecd(double, double)>;
  using JetFn = std::function<ChartJet(double, double)>;

  SurfaceChart(SurfaceKind kind, double parameter, std::string name,
               PointFn point, JetFn jet = {})
      : kind_(kind), parameter_(parameter), name_(std::move(name)),
        point_(std::move(point)), jet_(std::move(jet)) {}

  /// Builds a chart from a map templated on the scalar type; the jet is
  /// obtained by evaluating the map on Jet2.
  template <class Map>
  static SurfaceChart from_map(SurfaceKind kind, double parameter,
                               std::string name, Map map) {
    PointFn point = [map](double u, double v) { return map(u, v); };
    JetFn jet = [map](double u, double v) {
      using J = Jet2<double>;
      const LorentzVec<J> X = map(J::variable_u(u), J::variable_v(v));
      ChartJet out;
      for (int i = 0; i < 4; ++i) {
        out.x(i) = X(i).v;
        out.xu(i) = X(i).du;
        out.xv(i) = X(i).dv;
        out.xuu(i) = X(i).duu;
        out.xuv(i) = X(i).duv;
        out.xvv(i) = X(i).dvv;
      }
      return out;
    };
    return SurfaceChart(kind, parameter, std::move(name), std::move(point),
                        std::move(jet));
  }

  SurfaceKind kind() const { return kind_; }
  /// a, atilde or abar depending on kind (0 for parabolic/custom).
  double parameter() const { return parameter_; }
  const std::string& name() const { return name_; }

  LorentzVecd point(double u, double v) const { return point_(u, v); }
  bool has_analytic_jet() const { return static_cast<bool>(jet_); }
  /// Analytic jet when available, central differences otherwise.
  ChartJet jet(double u, double v) const;

  /// True when the second parameter is an angle with period 2 pi.
  bool periodic_v() const { return periodic_v_; }
  SurfaceChart& set_periodic_v(bool p) {
    periodic_v_ = p;
    return *this;
  }

  /// True when v is the parameter of a one-parameter isometry group acting
  /// on the image (X(u, v) = M(v) X(u, 0)), so the forms depend on u only.
  bool orbit_v() const { return orbit_v_; }
  SurfaceChart& set_orbit_v(bool o) {
    orbit_v_ = o;
    return *this;
  }

 private:
  SurfaceKind kind_;
  double parameter_;
  std::string name_;
  PointFn point_;
  JetFn jet_;
  bool periodic_v_ = false;
  bool orbit_v_ = false;
};

/// Step used by the finite-difference fallback.
inline double default_fd_step(double u, double v) {
  return 1e-5 * std::max({1.0, std::abs(u), std::abs(v)});
}

/// Central-difference jet from point evaluations alone.
ChartJet finite_difference_jet(const SurfaceChart& chart, double u, double v,
                               double h = 0);

template <class S>
LorentzVec<S> helicoid_map(double a, const S& u, const S& v) {
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  const S cu = cosh(u), su = sinh(u);
  LorentzVec<S> x;
  x << cu * cosh(v), cu * sinh(v), su * cos(a * v), su * sin(a * v);
  return x;
}

LorentzVecd helicoid_point(double a, double u, double v);

SurfaceChart helicoid_chart(double a);
/// Catenoid chart in (s, rotation) parameters built on a shared profile.
SurfaceChart catenoid_chart(std::shared_ptr<const CatenoidProfile> profile);
SurfaceChart catenoid_chart(const CatenoidKind& kind, double s_max,
                            double tol = 1e-10);
/// Ball-model catenoid C_abar in (w, theta) with t = abar + w^2.
SurfaceChart ball_catenoid_chart(std::shared_ptr<const BallCatenoidCurve> curve);
SurfaceChart ball_catenoid_chart(double abar, double w_max, double tol = 1e-10);

/// Point of a catenoid at profile parameter s and orbit parameter rotation.
LorentzVecd catenoid_point(const CatenoidProfile& profile, double s,
                           double rotation);

/// Point of the ball catenoid in hyperboloid coordinates from warped
/// coordinates (x, y) and rotation angle theta about gamma_0.
template <class S>
LorentzVec<S> warped_to_hyperboloid(const S& x, const S& y, const S& theta) {
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  const S cy = cosh(y), sy = sinh(y);
  LorentzVec<S> p;
  p << cy * cosh(x), sy * cos(theta), cy * sinh(x), sy * sin(theta);
  return p;
}

/// Distance from a hyperboloid point to the geodesic through the basepoint
/// spanned by the standard coordinates i (timelike, 0) and j.
double distance_to_axis(const LorentzVecd& p, int axis_component);

}  // namespace hypermin
