#include "hypermin/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hypermin {

// ---------------------------------------------------------------------------
// TabulatedIntegral

TabulatedIntegral::TabulatedIntegral(std::function<double(double)> integrand,
                                     double lo, double hi, double tol,
                                     double initial_step)
    : f_(std::move(integrand)), lo_(lo), hi_(hi), tol_(tol) {
  if (!(lo <= 0 && 0 <= hi && lo < hi)) {
    throw std::invalid_argument("TabulatedIntegral: need lo <= 0 <= hi, lo < hi");
  }
  if (!(tol > 0)) throw std::invalid_argument("TabulatedIntegral: tol must be > 0");

  double h = initial_step;
  for (int level = 0; level < 12; ++level, h *= 0.5) {
    tabulate(h);
    // Midpoint check of the Hermite interpolant against direct quadrature.
    interp_error_ = 0;
    const QuadratureOptions q{tol_ * 0.01, 0, 2000};
    for (std::size_t i = 0; i + 1 < s_.size(); ++i) {
      const double mid = 0.5 * (s_[i] + s_[i + 1]);
      const double exact = F_[i] + integrate(f_, s_[i], mid, q).value;
      interp_error_ = std::max(interp_error_, std::abs(value(mid) - exact));
    }
    if (interp_error_ <= tol_) return;
  }
  std::ostringstream msg;
  msg << "TabulatedIntegral: interpolation error " << interp_error_
      << " exceeds tolerance " << tol_;
  throw QuadratureError(msg.str(), lo_, hi_, interp_error_);
}

void TabulatedIntegral::tabulate(double h) {
  const int n_neg = static_cast<int>(std::ceil(-lo_ / h - 1e-12));
  const int n_pos = static_cast<int>(std::ceil(hi_ / h - 1e-12));
  // Uniform spacing on each side of the origin so that 0 is a node.
  const double h_neg = n_neg > 0 ? -lo_ / n_neg : h;
  const double h_pos = n_pos > 0 ? hi_ / n_pos : h;
  h_ = std::max(h_neg, h_pos);

  const int n = n_neg + n_pos + 1;
  s_.assign(n, 0.0);
  F_.assign(n, 0.0);
  dF_.assign(n, 0.0);
  const int panels = std::max(1, n - 1);
  const QuadratureOptions q{tol_ * 0.01 / panels, 0, 2000};

  for (int i = 0; i <= n_neg; ++i) s_[n_neg - i] = -i * h_neg;
  for (int i = 1; i <= n_pos; ++i) s_[n_neg + i] = i * h_pos;
  s_.front() = lo_;
  s_.back() = hi_;

  for (int i = n_neg + 1; i < n; ++i) {
    F_[i] = F_[i - 1] + integrate(f_, s_[i - 1], s_[i], q).value;
  }
  for (int i = n_neg - 1; i >= 0; --i) {
    F_[i] = F_[i + 1] - integrate(f_, s_[i], s_[i + 1], q).value;
  }
  for (int i = 0; i < n; ++i) dF_[i] = f_(s_[i]);
}

double TabulatedIntegral::value(double s) const {
  if (s < lo_ - 1e-12 || s > hi_ + 1e-12) {
    std::ostringstream msg;
    msg << "TabulatedIntegral: s = " << s << " outside [" << lo_ << ", " << hi_ << "]";
    throw std::out_of_range(msg.str());
  }
  auto it = std::upper_bound(s_.begin(), s_.end(), s);
  std::size_t i = it == s_.begin() ? 0 : static_cast<std::size_t>(it - s_.begin()) - 1;
  if (i + 1 >= s_.size()) i = s_.size() - 2;
  const double h = s_[i + 1] - s_[i];
  const double t = (s - s_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * F_[i] + h10 * h * dF_[i] + h01 * F_[i + 1] + h11 * h * dF_[i + 1];
}

// ---------------------------------------------------------------------------
// Catenoid profiles

const char* to_string(CatenoidType t) {
  switch (t) {
    case CatenoidType::Spherical: return "spherical";
    case CatenoidType::Hyperbolic: return "hyperbolic";
    case CatenoidType::Parabolic: return "parabolic";
  }
  return "?";
}

namespace {

void check_atilde(const CatenoidKind& kind) {
  if (kind.type != CatenoidType::Parabolic && !(kind.atilde > 0.5)) {
    throw std::invalid_argument("catenoid parameter atilde must exceed 1/2");
  }
}

}  // namespace

CatenoidProfile::CatenoidProfile(CatenoidKind kind, double s_max, double tol)
    : kind_((check_atilde(kind), kind)),
      integral_([kind](double s) { return catenoid_integrand(kind, s); },
                -s_max, s_max, tol) {}

void CatenoidProfile::check_range(double s) const {
  if (std::abs(s) > s_max() + 1e-12) {
    std::ostringstream msg;
    msg << "catenoid profile: |s| = " << std::abs(s) << " beyond s_max = " << s_max();
    throw std::out_of_range(msg.str());
  }
}

std::vector<CatenoidProfile::Sample> CatenoidProfile::samples() const {
  std::vector<Sample> out;
  for (double s : integral_.nodes()) {
    const auto [x3, x4] = x3_x4(s);
    out.push_back({s, x1(s), angle(s), x3, x4});
  }
  return out;
}

CatenoidProfile catenoid_profile(const CatenoidKind& kind, double s_max,
                                 double tol) {
  if (!(s_max > 0)) throw std::invalid_argument("catenoid_profile: s_max must be > 0");
  return CatenoidProfile(kind, s_max, tol);
}

Eigen::Matrix4d parabolic_basis() {
  Eigen::Matrix4d e;
  e.col(0) << 1, 0, 0, 1;
  e.col(1) << 0, 1, 0, 0;
  e.col(2) << 0.5, 0, 0, -0.5;
  e.col(3) << 0, 0, 1, 0;
  return e;
}

double relation_a_of_catenoid(const CatenoidKind& kind) {
  check_atilde(kind);
  switch (kind.type) {
    case CatenoidType::Spherical:
      return std::sqrt((kind.atilde + 0.5) / (kind.atilde - 0.5));
    case CatenoidType::Hyperbolic:
      return std::sqrt((kind.atilde - 0.5) / (kind.atilde + 0.5));
    case CatenoidType::Parabolic:
      break;
  }
  return 1.0;
}

double relation_a_of_ball_catenoid(double abar) {
  if (!(abar > 0)) throw std::invalid_argument("abar must be positive");
  return 1.0 / std::tanh(abar);
}

double atilde_of_abar(double abar) { return 0.5 * std::cosh(2 * abar); }

// ---------------------------------------------------------------------------
// Ball catenoid generating curve

BallCatenoidCurve::BallCatenoidCurve(double abar, double t_max, double tol)
    : abar_(abar),
      w_max_(std::sqrt(std::max(0.0, t_max - abar))),
      integral_([abar](double w) { return dx_dw(abar, w); }, -w_max_, w_max_,
                tol) {}

void BallCatenoidCurve::check_range(double w) const {
  if (std::abs(w) > w_max_ + 1e-12) {
    std::ostringstream msg;
    msg << "ball catenoid curve: |w| = " << std::abs(w) << " beyond " << w_max_;
    throw std::out_of_range(msg.str());
  }
}

double BallCatenoidCurve::x_of_t(double t, bool plus_branch) const {
  if (t < abar_) throw std::out_of_range("ball catenoid curve: t below abar");
  const double w = std::sqrt(t - abar_);
  return x_of_w(plus_branch ? w : -w);
}

double BallCatenoidCurve::dx_dt(double t) const {
  const double s2a = std::sinh(2 * abar_);
  const double s2t = std::sinh(2 * t);
  return s2a / (std::cosh(t) * std::sqrt(s2t * s2t - s2a * s2a));
}

std::vector<BallCatenoidCurve::Sample> BallCatenoidCurve::samples(int count) const {
  std::vector<Sample> out;
  count = std::max(count, 2);
  for (int i = 0; i < count; ++i) {
    const double w = w_max_ * i / (count - 1);
    const double x = x_of_w(w);
    out.push_back({t_of_w(w), x, -x});
  }
  return out;
}

BallCatenoidCurve ball_catenoid_generating_curve(double abar, double t_max,
                                                 double tol) {
  if (!(abar > 0)) throw std::invalid_argument("ball catenoid: abar must be > 0");
  if (!(t_max > abar)) throw std::invalid_argument("ball catenoid: need t_max > abar");
  return BallCatenoidCurve(abar, t_max, tol);
}

// ---------------------------------------------------------------------------
// Charts

const char* to_string(SurfaceKind k) {
  switch (k) {
    case SurfaceKind::Helicoid: return "helicoid";
    case SurfaceKind::SphericalCatenoid: return "cat-spherical";
    case SurfaceKind::HyperbolicCatenoid: return "cat-hyperbolic";
    case SurfaceKind::ParabolicCatenoid: return "cat-parabolic";
    case SurfaceKind::BallCatenoid: return "cat-ball";
    case SurfaceKind::Custom: return "custom";
  }
  return "?";
}

ChartJet SurfaceChart::jet(double u, double v) const {
  if (jet_) return jet_(u, v);
  return finite_difference_jet(*this, u, v);
}

ChartJet finite_difference_jet(const SurfaceChart& chart, double u, double v,
                               double h) {
  if (!(h > 0)) h = default_fd_step(u, v);
  ChartJet j;
  const LorentzVecd x = chart.point(u, v);
  const LorentzVecd xp0 = chart.point(u + h, v), xm0 = chart.point(u - h, v);
  const LorentzVecd x0p = chart.point(u, v + h), x0m = chart.point(u, v - h);
  // Second derivatives use a doubled step: the truncation/round-off balance
  // for a second difference sits near eps^(1/4).
  const double k = std::max(h, 1e-4 * std::max({1.0, std::abs(u), std::abs(v)}));
  const LorentzVecd kp0 = chart.point(u + k, v), km0 = chart.point(u - k, v);
  const LorentzVecd k0p = chart.point(u, v + k), k0m = chart.point(u, v - k);
  const LorentzVecd kpp = chart.point(u + k, v + k), kpm = chart.point(u + k, v - k);
  const LorentzVecd kmp = chart.point(u - k, v + k), kmm = chart.point(u - k, v - k);
  j.x = x;
  j.xu = (xp0 - xm0) / (2 * h);
  j.xv = (x0p - x0m) / (2 * h);
  j.xuu = (kp0 - 2 * x + km0) / (k * k);
  j.xvv = (k0p - 2 * x + k0m) / (k * k);
  j.xuv = (kpp - kpm - kmp + kmm) / (4 * k * k);
  return j;
}

LorentzVecd helicoid_point(double a, double u, double v) {
  if (!(a >= 0)) throw std::invalid_argument("helicoid pitch a must be >= 0");
  return helicoid_map(a, u, v);
}

SurfaceChart helicoid_chart(double a) {
  if (!(a >= 0)) throw std::invalid_argument("helicoid pitch a must be >= 0");
  std::ostringstream name;
  name << "helicoid(a=" << a << ")";
  // v is the screw-motion parameter.
  return SurfaceChart::from_map(
             SurfaceKind::Helicoid, a, name.str(),
             [a](const auto& u, const auto& v) { return helicoid_map(a, u, v); })
      .set_orbit_v(true);
}

namespace {

// Orbit of the generating curve under O(P^2), in standard coordinates.
template <class S>
LorentzVec<S> catenoid_map(const CatenoidProfile& p, const S& s, const S& rot) {
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  const S x1 = p.x1(s);
  const auto [x3, x4] = p.x3_x4(s);
  LorentzVec<S> X;
  switch (p.kind().type) {
    case CatenoidType::Spherical:
      // e4 timelike; rotation in the (e1, e2) plane.
      X << x4, x1 * cos(rot), x1 * sin(rot), x3;
      return X;
    case CatenoidType::Hyperbolic:
      // e1 timelike; boost in the (e1, e2) plane.
      X << x1 * cosh(rot), x1 * sinh(rot), x3, x4;
      return X;
    case CatenoidType::Parabolic:
      break;
  }
  // Null rotation fixing e3, e4:
  //   e1 -> e1 + rot e2 + rot^2/2 e3,  e2 -> e2 + rot e3.
  const S c1 = x1, c2 = x1 * rot, c3 = x3 + 0.5 * x1 * rot * rot, c4 = x4;
  // e1 = (1,0,0,1), e2 = (0,1,0,0), e3 = (1,0,0,-1)/2, e4 = (0,0,1,0).
  X << c1 + 0.5 * c3, c2, c4, c1 - 0.5 * c3;
  return X;
}

SurfaceKind surface_kind_of(CatenoidType t) {
  switch (t) {
    case CatenoidType::Spherical: return SurfaceKind::SphericalCatenoid;
    case CatenoidType::Hyperbolic: return SurfaceKind::HyperbolicCatenoid;
    case CatenoidType::Parabolic: break;
  }
  return SurfaceKind::ParabolicCatenoid;
}

}  // namespace

SurfaceChart catenoid_chart(std::shared_ptr<const CatenoidProfile> profile) {
  const auto& kind = profile->kind();
  std::ostringstream name;
  name << "catenoid-" << to_string(kind.type);
  if (kind.type != CatenoidType::Parabolic) name << "(atilde=" << kind.atilde << ")";
  SurfaceChart chart = SurfaceChart::from_map(
      surface_kind_of(kind.type),
      kind.type == CatenoidType::Parabolic ? 0.0 : kind.atilde, name.str(),
      [profile](const auto& s, const auto& rot) {
        return catenoid_map(*profile, s, rot);
      });
  chart.set_periodic_v(kind.type == CatenoidType::Spherical).set_orbit_v(true);
  return chart;
}

SurfaceChart catenoid_chart(const CatenoidKind& kind, double s_max, double tol) {
  return catenoid_chart(std::make_shared<const CatenoidProfile>(
      catenoid_profile(kind, s_max, tol)));
}

LorentzVecd catenoid_point(const CatenoidProfile& profile, double s,
                           double rotation) {
  return catenoid_map(profile, s, rotation);
}

SurfaceChart ball_catenoid_chart(std::shared_ptr<const BallCatenoidCurve> curve) {
  std::ostringstream name;
  name << "ball-catenoid(abar=" << curve->abar() << ")";
  SurfaceChart chart = SurfaceChart::from_map(
      SurfaceKind::BallCatenoid, curve->abar(), name.str(),
      [curve](const auto& w, const auto& theta) {
        return warped_to_hyperboloid(curve->x_of_w(w), curve->t_of_w(w), theta);
      });
  chart.set_periodic_v(true).set_orbit_v(true);
  return chart;
}

SurfaceChart ball_catenoid_chart(double abar, double w_max, double tol) {
  return ball_catenoid_chart(std::make_shared<const BallCatenoidCurve>(
      ball_catenoid_generating_curve(abar, abar + w_max * w_max, tol)));
}

double distance_to_axis(const LorentzVecd& p, int axis_component) {
  double s2 = 0;
  for (int i = 1; i < 4; ++i) {
    if (i != axis_component) s2 += p(i) * p(i);
  }
  return std::asinh(std::sqrt(s2));
}

}  // namespace hypermin
