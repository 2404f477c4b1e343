#include "hypermin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

namespace hypermin {

namespace {

// Abscissae and weights of the 15-point Kronrod extension of the 7-point
// Gauss rule (QUADPACK qk15).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace

double gauss_kronrod_15(const std::function<double(double)>& f, double a,
                        double b, double& error) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  error = std::abs((kronrod - gauss) * half);
  return kronrod * half;
}

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& options) {
  if (a == b) return {};
  if (!(options.abs_tol > 0 || options.rel_tol > 0)) {
    throw std::invalid_argument("integrate: tolerance must be positive");
  }

  std::priority_queue<Panel> panels;
  double total = 0;
  double total_error = 0;
  {
    double err = 0;
    const double v = gauss_kronrod_15(f, a, b, err);
    panels.push({a, b, v, err});
    total = v;
    total_error = err;
  }

  int count = 1;
  const auto target = [&] {
    return std::max(options.abs_tol, options.rel_tol * std::abs(total));
  };
  while (total_error > target()) {
    if (count >= options.max_intervals) {
      const Panel& worst = panels.top();
      std::ostringstream msg;
      msg << "quadrature did not converge: error " << total_error
          << " after " << count << " intervals; worst subinterval ["
          << worst.a << ", " << worst.b << "]";
      throw QuadratureError(msg.str(), worst.a, worst.b, worst.error);
    }
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    double e1 = 0, e2 = 0;
    const double v1 = gauss_kronrod_15(f, worst.a, mid, e1);
    const double v2 = gauss_kronrod_15(f, mid, worst.b, e2);
    if (!std::isfinite(v1) || !std::isfinite(v2)) {
      throw QuadratureError("quadrature produced a non-finite value", worst.a,
                            worst.b, worst.error);
    }
    total += v1 + v2 - worst.value;
    total_error += e1 + e2 - worst.error;
    panels.push({worst.a, mid, v1, e1});
    panels.push({mid, worst.b, v2, e2});
    ++count;
  }

  // Re-sum to drop the drift accumulated by incremental updates.
  double value = 0, error = 0;
  while (!panels.empty()) {
    value += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  return {value, error, count};
}

}  // namespace hypermin
