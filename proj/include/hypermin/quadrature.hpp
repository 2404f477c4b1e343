#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace hypermin {

/// Raised when adaptive quadrature cannot meet its tolerance. Carries the
/// subinterval with the largest remaining error estimate.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double a, double b, double error)
      : std::runtime_error(what), a_(a), b_(b), error_(error) {}

  double lower() const { return a_; }
  double upper() const { return b_; }
  double error_estimate() const { return error_; }

 private:
  double a_, b_, error_;
};

struct QuadratureResult {
  double value = 0;
  double error = 0;
  int intervals = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0;
  int max_intervals = 2000;
};

/// Globally adaptive 7/15-point Gauss-Kronrod integration of f on [a, b].
/// The interval with the largest error estimate is bisected until the summed
/// estimate drops below max(abs_tol, rel_tol * |I|).
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& options = {});

/// Single G7/K15 panel; returns the Kronrod value and |K15 - G7| in error.
double gauss_kronrod_15(const std::function<double(double)>& f, double a,
                        double b, double& error);

}  // namespace hypermin
