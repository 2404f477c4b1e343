#pragma once

// Fundamental forms of charts into H^3, computed ambiently in L^4, and the
// associate-family rotation of the second fundamental form.

#include "hypermin/surfaces.hpp"

#include <Eigen/Core>
#include <Eigen/LU>

#include <complex>
#include <memory>
#include <stdexcept>

namespace hypermin {

/// First form (E, F, G) and second form (b11, b12, b22) at one point.
template <class Scalar>
struct FundamentalForms {
  Scalar E{1}, F{0}, G{1};
  Scalar b11{0}, b12{0}, b22{0};

  Scalar det_metric() const { return E * G - F * F; }

  /// Trace of the shape operator (no factor 1/2).
  Scalar mean_curvature() const {
    return (G * b11 - 2 * F * b12 + E * b22) / det_metric();
  }

  Eigen::Matrix<Scalar, 2, 2> shape_operator() const {
    Eigen::Matrix<Scalar, 2, 2> g, b;
    g << E, F, F, G;
    b << b11, b12, b12, b22;
    return g.inverse() * b;
  }

  /// |A|^2 = tr(S^2), valid in any coordinates.
  Scalar norm_A2() const {
    const auto S = shape_operator();
    return (S * S).trace();
  }

  /// (b11^2 + 2 b12^2 + b22^2) / E^2, the isothermal-coordinate expression.
  Scalar norm_A2_isothermal() const {
    return (b11 * b11 + 2 * b12 * b12 + b22 * b22) / (E * E);
  }

  /// Gauss equation in a space form of curvature `ambient`.
  Scalar gauss_curvature_extrinsic(Scalar ambient = Scalar(-1)) const {
    return ambient + (b11 * b22 - b12 * b12) / det_metric();
  }
};

using Forms = FundamentalForms<double>;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DerivativeMode { Analytic, FiniteDifference };

/// Unit spacelike normal Minkowski-orthogonal to x, x_u, x_v. Sign: the first
/// component (in index order 0..3) that is not negligible is positive.
LorentzVecd unit_normal(const ChartJet& jet);

Forms forms_from_jet(const ChartJet& jet);

/// Forms of a chart at (u, v). Analytic mode falls back to central
/// differences when the chart carries no analytic jet.
Forms fundamental_forms(const SurfaceChart& chart, double u, double v,
                        DerivativeMode mode = DerivativeMode::Analytic,
                        double fd_step = 0);

/// Intrinsic curvature from E, F, G alone (Brioschi formula), with the
/// metric derivatives taken by fourth-order central differences of step h.
double brioschi_curvature(const SurfaceChart& chart, double u, double v,
                          double h = 2e-3);

/// Associate-family rotation: with psi = b11 - i b12,
/// b11(theta) = Re(e^{i theta} psi), b12(theta) = -Im(e^{i theta} psi),
/// b22(theta) = -b11(theta). theta = 0 is the identity and theta = pi/2
/// sends (b11, b12) to (b12, -b11). Requires isothermal, trace-free input.
template <class Scalar>
FundamentalForms<Scalar> conjugate_forms(const FundamentalForms<Scalar>& base,
                                         Scalar theta,
                                         Scalar tol = Scalar(1e-9)) {
  using std::abs;
  const Scalar scale = std::max(abs(base.E), abs(base.G));
  const Scalar dEG = abs(base.E - base.G), dF = abs(base.F);
  if (dEG > tol * scale || dF > tol * scale) {
    throw GeometryError("conjugate_forms: input not isothermal (|E-G| = " +
                        std::to_string(double(dEG)) + ", |F| = " +
                        std::to_string(double(dF)) + ")");
  }
  const Scalar bscale = std::max({abs(base.b11), abs(base.b12), abs(base.b22), Scalar(1)});
  if (abs(base.b11 + base.b22) > tol * bscale) {
    throw GeometryError("conjugate_forms: input not minimal (b11 + b22 = " +
                        std::to_string(double(base.b11 + base.b22)) + ")");
  }
  const std::complex<Scalar> psi(base.b11, -base.b12);
  const std::complex<Scalar> rotated = std::polar(Scalar(1), theta) * psi;
  FundamentalForms<Scalar> out = base;
  out.b11 = rotated.real();
  out.b12 = -rotated.imag();
  out.b22 = -rotated.real();
  return out;
}

/// Isothermal coordinates (sigma, v) for a chart with metric du^2 + G(u) dv^2,
/// sigma = int_0^u du / sqrt(G(u)); in them I = G (d sigma^2 + dv^2).
class IsothermalField {
 public:
  IsothermalField(SurfaceChart chart, double u_lo, double u_hi,
                  double tol = 1e-10);

  double sigma_of_u(double u) const { return sigma_->value(u); }
  double u_of_sigma(double sigma) const;
  double sigma_lower() const { return sigma_->value(u_lo_); }
  double sigma_upper() const { return sigma_->value(u_hi_); }

  /// Forms at (sigma, v) transported from the base chart by the chain rule.
  Forms forms_at(double sigma, double v) const;

  /// The reparametrized chart (sigma, v) -> X(u(sigma), v); it carries no
  /// analytic jet, so its forms come from central differences.
  SurfaceChart chart() const;

  const SurfaceChart& base() const { return base_; }

 private:
  SurfaceChart base_;
  double u_lo_, u_hi_;
  std::shared_ptr<const TabulatedIntegral> sigma_;
};

/// Validates the separable-metric precondition and builds the field.
IsothermalField isothermal_reparametrize(const SurfaceChart& chart, double u_lo,
                                         double u_hi, double tol = 1e-10);

}  // namespace hypermin
