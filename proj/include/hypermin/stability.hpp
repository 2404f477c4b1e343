#pragma once

// Jacobi operator L = Laplacian + |A|^2 + Ric(e3) on parameter rectangles,
// discretized by 5-point divergence-form finite differences with Dirichlet
// conditions (optionally periodic in the second parameter).

#include "hypermin/diffgeo.hpp"
#include "hypermin/surfaces.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypermin {

/// Ric(e3) in a space form of curvature -1.
inline constexpr double kAmbientRicci = -2.0;

struct Domain {
  double u0 = -1, u1 = 1, v0 = -1, v1 = 1;

  static Domain square(double half_width) {
    return {-half_width, half_width, -half_width, half_width};
  }
  bool contains(const Domain& o) const {
    return u0 <= o.u0 && o.u1 <= u1 && v0 <= o.v0 && o.v1 <= v1;
  }
  bool operator==(const Domain&) const = default;
};

enum class VBoundary { Dirichlet, Periodic };

/// Interior node counts. For a periodic v-direction nv counts all nodes of
/// one period.
struct Grid {
  int nu = 0, nv = 0;
  bool operator==(const Grid&) const = default;
};

/// Grid with the given spacing (rounded to fit the domain exactly).
Grid grid_from_spacing(const Domain& d, double spacing,
                       VBoundary vb = VBoundary::Dirichlet);

struct JacobiCoefficients {
  double E = 1, F = 0, G = 1;
  double potential = 0;  // |A|^2 + Ric(e3)
};

using CoefficientField = std::function<JacobiCoefficients(double, double)>;

struct JacobiProblem {
  CoefficientField field;
  Domain domain;
  Grid grid;
  VBoundary v_boundary = VBoundary::Dirichlet;
  std::string label;

  double hu() const { return (domain.u1 - domain.u0) / (grid.nu + 1); }
  double hv() const {
    return v_boundary == VBoundary::Periodic ? (domain.v1 - domain.v0) / grid.nv
                                             : (domain.v1 - domain.v0) / (grid.nv + 1);
  }
  double u_node(double i) const { return domain.u0 + (i + 1) * hu(); }
  double v_node(double j) const {
    return v_boundary == VBoundary::Periodic ? domain.v0 + j * hv()
                                             : domain.v0 + (j + 1) * hv();
  }
  int size() const { return grid.nu * grid.nv; }
};

/// Coefficients from the chart's fundamental forms; periodic charts get a
/// periodic v-direction and must be given a domain of v-length 2 pi.
JacobiProblem make_jacobi_problem(const SurfaceChart& chart, const Domain& d,
                                  const Grid& g);

/// Euclidean metric with a prescribed potential q(u, v).
JacobiProblem flat_problem(const Domain& d, const Grid& g,
                           std::function<double(double, double)> potential);

/// Discrete pair: eigenvalues of A phi = lambda B phi approximate those of
/// -L phi = lambda phi. A is symmetric, B the lumped mass sqrt(g) du dv.
/// Node (i, j) has index j * nu + i.
struct JacobiSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd B;
  int nu = 0, nv = 0;
};

JacobiSystem assemble(const JacobiProblem& problem);

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double last_residual)
      : std::runtime_error(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

struct Inertia {
  int negative = 0, zero = 0, positive = 0;
};

/// Inertia of A - shift * B from a sparse LDL^T factorization.
Inertia inertia(const JacobiSystem& sys, double shift = 0.0);

enum class Stability { Stable, Unstable, Marginal };
const char* to_string(Stability s);
Stability classify(double lambda1, double marginal_band = 1e-4);

struct SolverOptions {
  int max_iterations = 300;
  double residual_tolerance = 1e-11;  // inverse-iteration stopping target
  double converged_residual = 1e-8;   // below this the report counts as converged
  int lanczos_steps = 40;
  double marginal_band = 1e-4;
  bool compute_index = true;
};

struct SpectrumReport {
  std::string label;
  Domain domain;
  Grid grid;
  double lambda1 = 0;
  int negative_count = 0;  // Morse index on the domain
  double residual = 0;     // normwise relative residual of (lambda1, phi1)
  bool converged = false;
  bool ground_state_one_signed = false;
  int iterations = 0;
  std::optional<double> lambda1_extrapolated;
  Stability stability = Stability::Marginal;
};

/// Smallest eigenvalue of (A, B) by shift-and-invert iteration. The shift
/// starts below the Gershgorin bound, is moved up to just under a Lanczos
/// estimate, and is certified to lie below the spectrum by inertia.
SpectrumReport lambda1(const JacobiProblem& problem, const SolverOptions& opts = {});
SpectrumReport lambda1(const JacobiSystem& sys, const SolverOptions& opts = {});

/// Also solves on the grid with halved spacing and stores the Richardson
/// extrapolate (4 lambda(h/2) - lambda(h)) / 3.
SpectrumReport lambda1_richardson(const JacobiProblem& problem,
                                  const SolverOptions& opts = {});

/// Number of negative eigenvalues of (A, B), i.e. the inertia of A since B
/// is positive definite. Falls back to a shifted count if LDL^T breaks down.
int morse_index(const JacobiProblem& problem);
int morse_index(const JacobiSystem& sys);

/// All generalized eigenvalues by dense decomposition (small grids only).
Eigen::VectorXd dense_eigenvalues(const JacobiSystem& sys);

/// Lower bound on the spectrum of (A, B) from Gershgorin discs of
/// B^{-1/2} A B^{-1/2}.
double gershgorin_lower_bound(const JacobiSystem& sys);

// ---------------------------------------------------------------------------
// Exhaustion and parameter searches

/// Squares [-k, k]^2 for the given half-widths.
std::vector<Domain> square_schedule(const std::vector<double>& half_widths);
std::vector<double> default_half_widths();  // 1, 2, ..., 8
inline constexpr double kDefaultScheduleSpacing = 0.05;
inline constexpr double kDefaultCriticalSpacing = 0.04;

struct ExhaustionResult {
  std::vector<SpectrumReport> reports;
  bool monotone = true;  // lambda1 nonincreasing along the schedule
  /// Tail fit lambda1 ~ limit + c / size^2 over the last (up to) three
  /// domains, size being the half-extent of the domain.
  double limit_estimate = 0;
  double fit_residual = 0;
};

using ProblemFactory = std::function<JacobiProblem(const Domain&)>;

ExhaustionResult exhaustion(const ProblemFactory& factory,
                            const std::vector<Domain>& schedule,
                            const SolverOptions& opts = {});
ExhaustionResult exhaustion(const SurfaceChart& chart,
                            const std::vector<Domain>& schedule, double spacing,
                            const SolverOptions& opts = {});

struct BisectionStep {
  double parameter = 0;
  double lambda1 = 0;
  int index = 0;
};

struct CriticalResult {
  double estimate = 0;
  double lower = 0, upper = 0;  // final bracket
  std::vector<BisectionStep> trace;
};

/// Bisection on a parameter p for the sign change of p -> lambda1. Either
/// orientation is accepted; the bracket must straddle zero.
CriticalResult bisect_zero_crossing(
    const std::function<SpectrumReport(double)>& evaluate, double lo, double hi,
    double tol);

/// Called once per solve, in evaluation order.
using PitchObserver = std::function<void(double, const SpectrumReport&)>;

/// Critical helicoid pitch on a fixed domain: bisection on a of
/// a -> lambda1(Omega; a), requiring lambda1(a_lo) > 0 > lambda1(a_hi).
CriticalResult critical_pitch(const Domain& domain, double spacing, double a_lo,
                              double a_hi, double tol,
                              const SolverOptions& opts = {},
                              const PitchObserver& observer = {});

// Conjugate helicoid / ball catenoid comparison

struct ConjugacyOptions {
  std::vector<double> helicoid_half_widths = default_half_widths();
  double helicoid_spacing = kDefaultScheduleSpacing;
  /// Catenoid domains |w| <= W with t = abar + w^2, full rotation.
  std::vector<double> catenoid_half_widths = {0.6, 0.9, 1.2, 1.5, 1.8, 2.1};
  double catenoid_spacing = 0.01;
  int catenoid_rotation_nodes = 16;
  SolverOptions solver;
};

struct ConjugacyReport {
  double a = 0, abar = 0;
  ExhaustionResult helicoid, catenoid;
  Stability helicoid_class = Stability::Marginal;
  Stability catenoid_class = Stability::Marginal;
  bool agree = false;
};

/// Jacobi problem of the ball catenoid C_abar on |w| <= half_width.
JacobiProblem ball_catenoid_problem(double abar, double half_width,
                                    double spacing, int rotation_nodes);

ConjugacyReport conjugacy_crosscheck(double a, const ConjugacyOptions& opts = {});

}  // namespace hypermin
