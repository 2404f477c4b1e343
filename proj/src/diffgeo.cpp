#include "hypermin/diffgeo.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace hypermin {

namespace {

double mdot(const LorentzVecd& a, const LorentzVecd& b) { return minkowski_dot(a, b); }

}  // namespace

LorentzVecd unit_normal(const ChartJet& jet) {
  // Minkowski Gram-Schmidt on {x, x_u, x_v}; the first vector is timelike,
  // the tangents spacelike.
  std::array<LorentzVecd, 3> basis;
  std::array<double, 3> sign{};
  const std::array<const LorentzVecd*, 3> in{&jet.x, &jet.xu, &jet.xv};
  for (int k = 0; k < 3; ++k) {
    LorentzVecd w = *in[k];
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < k; ++i) w -= sign[i] * mdot(w, basis[i]) * basis[i];
    }
    const double n2 = mdot(w, w);
    if (!(std::abs(n2) > 1e-14 * std::max(1.0, w.squaredNorm()))) {
      throw GeometryError("unit_normal: degenerate frame (lightlike or dependent vectors)");
    }
    sign[k] = n2 > 0 ? 1.0 : -1.0;
    basis[k] = w / std::sqrt(std::abs(n2));
  }

  LorentzVecd best = LorentzVecd::Zero();
  double best_n2 = 0;
  for (int c = 0; c < 4; ++c) {
    LorentzVecd w = LorentzVecd::Unit(c);
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < 3; ++i) w -= sign[i] * mdot(w, basis[i]) * basis[i];
    }
    const double n2 = mdot(w, w);
    if (n2 > best_n2) {
      best_n2 = n2;
      best = w;
    }
  }
  if (!(best_n2 > 1e-14)) {
    throw GeometryError("unit_normal: no spacelike normal candidate");
  }
  LorentzVecd n = best / std::sqrt(best_n2);
  const double big = n.cwiseAbs().maxCoeff();
  for (int c = 0; c < 4; ++c) {
    if (std::abs(n(c)) > 1e-10 * big) {
      if (n(c) < 0) n = -n;
      break;
    }
  }
  return n;
}

Forms forms_from_jet(const ChartJet& jet) {
  Forms f;
  f.E = mdot(jet.xu, jet.xu);
  f.F = mdot(jet.xu, jet.xv);
  f.G = mdot(jet.xv, jet.xv);
  if (!(f.E > 0 && f.G > 0 && f.det_metric() > 1e-14)) {
    std::ostringstream msg;
    msg << "degenerate metric: E = " << f.E << ", F = " << f.F << ", G = " << f.G;
    throw GeometryError(msg.str());
  }
  // Covariant second derivatives differ from x_ij by a multiple of x, which
  // is orthogonal to n.
  const LorentzVecd n = unit_normal(jet);
  f.b11 = mdot(jet.xuu, n);
  f.b12 = mdot(jet.xuv, n);
  f.b22 = mdot(jet.xvv, n);
  return f;
}

Forms fundamental_forms(const SurfaceChart& chart, double u, double v,
                        DerivativeMode mode, double fd_step) {
  if (mode == DerivativeMode::FiniteDifference) {
    return forms_from_jet(finite_difference_jet(chart, u, v, fd_step));
  }
  return forms_from_jet(chart.jet(u, v));
}

double brioschi_curvature(const SurfaceChart& chart, double u, double v,
                          double h) {
  struct Metric {
    double E, F, G;
  };
  const auto metric = [&](double uu, double vv) {
    const ChartJet j = chart.jet(uu, vv);
    return Metric{mdot(j.xu, j.xu), mdot(j.xu, j.xv), mdot(j.xv, j.xv)};
  };
  // Sample on a 5x5 stencil; fourth-order differences.
  Metric m[5][5];
  for (int i = 0; i < 5; ++i) {
    for (int k = 0; k < 5; ++k) m[i][k] = metric(u + (i - 2) * h, v + (k - 2) * h);
  }
  const auto d1 = [h](double fm2, double fm1, double fp1, double fp2) {
    return (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h);
  };
  const auto d2 = [h](double fm2, double fm1, double f0, double fp1, double fp2) {
    return (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h);
  };
  const auto du = [&](auto field) {
    return d1(field(m[0][2]), field(m[1][2]), field(m[3][2]), field(m[4][2]));
  };
  const auto dv = [&](auto field) {
    return d1(field(m[2][0]), field(m[2][1]), field(m[2][3]), field(m[2][4]));
  };
  const auto duu = [&](auto field) {
    return d2(field(m[0][2]), field(m[1][2]), field(m[2][2]), field(m[3][2]), field(m[4][2]));
  };
  const auto dvv = [&](auto field) {
    return d2(field(m[2][0]), field(m[2][1]), field(m[2][2]), field(m[2][3]), field(m[2][4]));
  };
  const auto duv = [&](auto field) {
    double acc = 0;
    const int off[4] = {0, 1, 3, 4};
    const double w[4] = {1, -8, 8, -1};
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) acc += w[a] * w[b] * field(m[off[a]][off[b]]);
    }
    return acc / (144 * h * h);
  };
  const auto fE = [](const Metric& x) { return x.E; };
  const auto fF = [](const Metric& x) { return x.F; };
  const auto fG = [](const Metric& x) { return x.G; };

  const double E = m[2][2].E, F = m[2][2].F, G = m[2][2].G;
  const double Eu = du(fE), Ev = dv(fE), Fu = du(fF), Fv = dv(fF);
  const double Gu = du(fG), Gv = dv(fG);
  const double Evv = dvv(fE), Fuv = duv(fF), Guu = duu(fG);

  Eigen::Matrix3d M1, M2;
  M1 << -0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev,
        Fv - 0.5 * Gu, E, F,
        0.5 * Gv, F, G;
  M2 << 0, 0.5 * Ev, 0.5 * Gu,
        0.5 * Ev, E, F,
        0.5 * Gu, F, G;
  const double det = E * G - F * F;
  return (M1.determinant() - M2.determinant()) / (det * det);
}

// ---------------------------------------------------------------------------
// Isothermal reparametrization

IsothermalField::IsothermalField(SurfaceChart chart, double u_lo, double u_hi,
                                 double tol)
    : base_(std::move(chart)), u_lo_(u_lo), u_hi_(u_hi) {
  const SurfaceChart& c = base_;
  sigma_ = std::make_shared<const TabulatedIntegral>(
      [c](double u) {
        const ChartJet j = c.jet(u, 0.0);
        return 1.0 / std::sqrt(mdot(j.xv, j.xv));
      },
      u_lo, u_hi, tol);
}

double IsothermalField::u_of_sigma(double sigma) const {
  // Newton on sigma(u) = sigma; sigma is strictly increasing with slope
  // 1/sqrt(G) so a bisection safeguard keeps iterates inside the table.
  double lo = u_lo_, hi = u_hi_;
  if (sigma < sigma_lower() - 1e-12 || sigma > sigma_upper() + 1e-12) {
    throw std::out_of_range("u_of_sigma: sigma outside tabulated range");
  }
  double u = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double r = sigma_->value(u) - sigma;
    if (r > 0) hi = u; else lo = u;
    const double step = r / sigma_->integrand(u);
    double next = u - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) < 1e-15 * std::max(1.0, std::abs(u))) return next;
    u = next;
  }
  return u;
}

Forms IsothermalField::forms_at(double sigma, double v) const {
  const double u = u_of_sigma(sigma);
  const Forms f = fundamental_forms(base_, u, v);
  // du/dsigma = sqrt(G).
  const double s = std::sqrt(f.G);
  Forms out;
  out.E = f.E * f.G;
  out.F = f.F * s;
  out.G = f.G;
  out.b11 = f.b11 * f.G;
  out.b12 = f.b12 * s;
  out.b22 = f.b22;
  return out;
}

SurfaceChart IsothermalField::chart() const {
  auto self = std::make_shared<const IsothermalField>(*this);
  return SurfaceChart(SurfaceKind::Custom, base_.parameter(),
                      base_.name() + "[isothermal]",
                      [self](double sigma, double v) {
                        return self->base().point(self->u_of_sigma(sigma), v);
                      });
}

IsothermalField isothermal_reparametrize(const SurfaceChart& chart, double u_lo,
                                         double u_hi, double tol) {
  if (!(u_lo <= 0 && 0 <= u_hi && u_lo < u_hi)) {
    throw std::invalid_argument("isothermal_reparametrize: need u_lo <= 0 <= u_hi");
  }
  // Precondition: E = 1, F = 0 and G independent of v on sample points.
  constexpr int kSamples = 9;
  for (int i = 0; i < kSamples; ++i) {
    const double u = u_lo + (u_hi - u_lo) * i / (kSamples - 1);
    const Forms f0 = fundamental_forms(chart, u, 0.0);
    for (double v : {-1.0, 0.7}) {
      const Forms f = fundamental_forms(chart, u, v);
      if (std::abs(f.E - 1) > 1e-8 || std::abs(f.F) > 1e-8 * std::sqrt(f.G) ||
          std::abs(f.G - f0.G) > 1e-8 * f0.G) {
        throw GeometryError(
            "isothermal_reparametrize: metric is not of the form du^2 + G(u) dv^2");
      }
    }
  }
  return IsothermalField(chart, u_lo, u_hi, tol);
}

}  // namespace hypermin
