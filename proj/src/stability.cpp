#include "hypermin/stability.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hypermin {

using SparseMatrix = Eigen::SparseMatrix<double>;

Grid grid_from_spacing(const Domain& d, double spacing, VBoundary vb) {
  if (!(spacing > 0)) throw std::invalid_argument("grid spacing must be positive");
  const int cells_u = std::max(2, static_cast<int>(std::lround((d.u1 - d.u0) / spacing)));
  const int cells_v = std::max(2, static_cast<int>(std::lround((d.v1 - d.v0) / spacing)));
  return {cells_u - 1, vb == VBoundary::Periodic ? cells_v : cells_v - 1};
}

JacobiProblem make_jacobi_problem(const SurfaceChart& chart, const Domain& d,
                                  const Grid& g) {
  JacobiProblem p;
  p.domain = d;
  p.grid = g;
  p.label = chart.name();
  if (chart.periodic_v()) {
    p.v_boundary = VBoundary::Periodic;
    if (std::abs((d.v1 - d.v0) - 2 * std::numbers::pi) > 1e-9) {
      throw std::invalid_argument("periodic chart needs a v-domain of length 2 pi");
    }
  }
  // Along an isometry orbit the forms are those at v = 0; evaluating there
  // avoids cancellation in the ambient coordinates, which grow like
  // cosh u cosh v on the helicoid.
  p.field = [chart](double u, double v) {
    const Forms f = fundamental_forms(chart, u, chart.orbit_v() ? 0.0 : v);
    return JacobiCoefficients{f.E, f.F, f.G, f.norm_A2() + kAmbientRicci};
  };
  return p;
}

JacobiProblem flat_problem(const Domain& d, const Grid& g,
                           std::function<double(double, double)> potential) {
  JacobiProblem p;
  p.domain = d;
  p.grid = g;
  p.label = "flat";
  p.field = [q = std::move(potential)](double u, double v) {
    return JacobiCoefficients{1, 0, 1, q ? q(u, v) : 0.0};
  };
  return p;
}

JacobiSystem assemble(const JacobiProblem& P) {
  const int nu = P.grid.nu, nv = P.grid.nv;
  const bool periodic = P.v_boundary == VBoundary::Periodic;
  if (nu < 1 || nv < (periodic ? 3 : 1)) {
    throw std::invalid_argument("assemble: grid too small");
  }
  if (!(P.domain.u1 > P.domain.u0 && P.domain.v1 > P.domain.v0)) {
    throw std::invalid_argument("assemble: degenerate domain");
  }
  if (!P.field) throw std::invalid_argument("assemble: no coefficient field");

  const double hu = P.hu(), hv = P.hv();
  const auto at = [&](double i, double j) {
    const JacobiCoefficients c = P.field(P.u_node(i), P.v_node(j));
    if (!std::isfinite(c.E) || !std::isfinite(c.F) || !std::isfinite(c.G) ||
        !std::isfinite(c.potential)) {
      std::ostringstream msg;
      msg << "assemble: nonfinite coefficients at (" << P.u_node(i) << ", "
          << P.v_node(j) << ")";
      throw GeometryError(msg.str());
    }
    if (std::abs(c.F) > 1e-8 * std::sqrt(c.E * c.G)) {
      throw GeometryError("assemble: 5-point scheme needs an orthogonal chart (F = 0)");
    }
    return c;
  };
  const auto idx = [nu, nv](int i, int j) { return ((j % nv + nv) % nv) * nu + i; };

  const int n = nu * nv;
  JacobiSystem sys;
  sys.nu = nu;
  sys.nv = nv;
  sys.B.resize(n);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * static_cast<std::size_t>(n));

  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nu; ++i) {
      const JacobiCoefficients c = at(i, j);
      const double sqrt_g = std::sqrt(c.E * c.G);
      sys.B(idx(i, j)) = sqrt_g * hu * hv;
      diag(idx(i, j)) -= c.potential * sqrt_g * hu * hv;
    }
  }
  // Fluxes across u-faces: sqrt(g) g^{uu} = sqrt(G/E) at half-nodes.
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i <= nu; ++i) {
      const JacobiCoefficients c = at(i - 0.5, j);
      const double w = std::sqrt(c.G / c.E) * hv / hu;
      if (i > 0) diag(idx(i - 1, j)) += w;
      if (i < nu) diag(idx(i, j)) += w;
      if (i > 0 && i < nu) {
        trip.emplace_back(idx(i - 1, j), idx(i, j), -w);
        trip.emplace_back(idx(i, j), idx(i - 1, j), -w);
      }
    }
  }
  // Fluxes across v-faces: sqrt(E/G).
  const int faces_v = periodic ? nv : nv + 1;
  for (int j = 0; j < faces_v; ++j) {
    for (int i = 0; i < nu; ++i) {
      const JacobiCoefficients c = at(i, j - 0.5);
      const double w = std::sqrt(c.E / c.G) * hu / hv;
      const bool has_lo = periodic || j > 0;
      const bool has_hi = periodic || j < nv;
      if (has_lo) diag(idx(i, j - 1)) += w;
      if (has_hi) diag(idx(i, j)) += w;
      if (has_lo && has_hi) {
        trip.emplace_back(idx(i, j - 1), idx(i, j), -w);
        trip.emplace_back(idx(i, j), idx(i, j - 1), -w);
      }
    }
  }
  for (int p = 0; p < n; ++p) trip.emplace_back(p, p, diag(p));

  sys.A.resize(n, n);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  sys.A.makeCompressed();
  return sys;
}

// ---------------------------------------------------------------------------
// Factorizations

namespace {

using Ldlt = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

/// LDL^T of A - shift B with the symbolic analysis shared across shifts.
class ShiftedFactorization {
 public:
  explicit ShiftedFactorization(const JacobiSystem& sys) : sys_(sys) {
    ldlt_.analyzePattern(sys.A);
  }

  /// Returns false on numerical breakdown.
  bool factorize(double shift) {
    shift_ = shift;
    SparseMatrix K = sys_.A;
    if (shift != 0) {
      for (int p = 0; p < K.rows(); ++p) K.coeffRef(p, p) -= shift * sys_.B(p);
    }
    ldlt_.factorize(K);
    if (ldlt_.info() != Eigen::Success) return false;
    const Eigen::VectorXd& D = ldlt_.vectorD();
    const double big = D.cwiseAbs().maxCoeff();
    inertia_ = {};
    for (Eigen::Index k = 0; k < D.size(); ++k) {
      if (!std::isfinite(D(k))) return false;
      if (std::abs(D(k)) <= 1e-14 * big) {
        ++inertia_.zero;
      } else if (D(k) < 0) {
        ++inertia_.negative;
      } else {
        ++inertia_.positive;
      }
    }
    return inertia_.zero == 0;
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return ldlt_.solve(rhs); }
  const Inertia& inertia() const { return inertia_; }
  double shift() const { return shift_; }

 private:
  const JacobiSystem& sys_;
  Ldlt ldlt_;
  Inertia inertia_;
  double shift_ = 0;
};

double gershgorin_upper_bound(const JacobiSystem& sys) {
  const Eigen::VectorXd s = sys.B.cwiseSqrt().cwiseInverse();
  Eigen::VectorXd center = Eigen::VectorXd::Zero(sys.B.size());
  Eigen::VectorXd radius = Eigen::VectorXd::Zero(sys.B.size());
  for (int k = 0; k < sys.A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(sys.A, k); it; ++it) {
      const double c = it.value() * s(it.row()) * s(it.col());
      if (it.row() == it.col()) center(it.row()) += c;
      else radius(it.row()) += std::abs(c);
    }
  }
  return (center + radius).maxCoeff();
}

}  // namespace

double gershgorin_lower_bound(const JacobiSystem& sys) {
  const Eigen::VectorXd s = sys.B.cwiseSqrt().cwiseInverse();
  Eigen::VectorXd center = Eigen::VectorXd::Zero(sys.B.size());
  Eigen::VectorXd radius = Eigen::VectorXd::Zero(sys.B.size());
  for (int k = 0; k < sys.A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(sys.A, k); it; ++it) {
      const double c = it.value() * s(it.row()) * s(it.col());
      if (it.row() == it.col()) center(it.row()) += c;
      else radius(it.row()) += std::abs(c);
    }
  }
  return (center - radius).minCoeff();
}

Inertia inertia(const JacobiSystem& sys, double shift) {
  ShiftedFactorization f(sys);
  if (!f.factorize(shift)) {
    std::ostringstream msg;
    msg << "LDL^T breakdown at shift " << shift;
    throw SolverError(msg.str(), 0);
  }
  return f.inertia();
}

Eigen::VectorXd dense_eigenvalues(const JacobiSystem& sys) {
  if (sys.A.rows() > 4000) {
    throw std::invalid_argument("dense_eigenvalues: system too large");
  }
  const Eigen::VectorXd s = sys.B.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd C = s.asDiagonal() * Eigen::MatrixXd(sys.A) * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

int morse_index(const JacobiSystem& sys) {
  ShiftedFactorization f(sys);
  if (f.factorize(0.0)) return f.inertia().negative;
  // Breakdown: count eigenvalues below a small negative shift instead.
  const double scale = std::max(1.0, std::abs(gershgorin_lower_bound(sys)));
  for (double eps : {1e-10, 1e-8, 1e-6}) {
    if (f.factorize(-eps * scale)) return f.inertia().negative;
  }
  if (sys.A.rows() <= 4000) {
    const Eigen::VectorXd ev = dense_eigenvalues(sys);
    return static_cast<int>((ev.array() < 0).count());
  }
  throw SolverError("morse_index: LDL^T breakdown at every trial shift", 0);
}

int morse_index(const JacobiProblem& problem) { return morse_index(assemble(problem)); }

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Marginal: return "marginal";
  }
  return "?";
}

Stability classify(double lambda1, double band) {
  if (lambda1 > band) return Stability::Stable;
  if (lambda1 < -band) return Stability::Unstable;
  return Stability::Marginal;
}

// ---------------------------------------------------------------------------
// Smallest eigenvalue

namespace {

struct LanczosEstimate {
  double lambda = 0, next = 0;
  Eigen::VectorXd vector;
};

// Lanczos on K^{-1} B in the B-inner product, K = A - shift B positive
// definite. Ritz values theta map back to lambda = shift + 1/theta.
LanczosEstimate lanczos_estimate(const JacobiSystem& sys,
                                 const ShiftedFactorization& K, int steps) {
  const int n = static_cast<int>(sys.B.size());
  const int m = std::min(steps, n);
  const auto bdot = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return x.dot(sys.B.cwiseProduct(y));
  };

  Eigen::MatrixXd Q(n, m);
  Eigen::VectorXd alpha(m), beta(m);
  Eigen::VectorXd q = Eigen::VectorXd::Ones(n);
  q /= std::sqrt(bdot(q, q));
  int used = m;
  for (int k = 0; k < m; ++k) {
    Q.col(k) = q;
    Eigen::VectorXd w = K.solve(sys.B.cwiseProduct(q));
    alpha(k) = bdot(q, w);
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= k; ++i) w -= bdot(Q.col(i), w) * Q.col(i);
    }
    beta(k) = std::sqrt(std::max(0.0, bdot(w, w)));
    if (k + 1 == m) break;
    if (beta(k) <= 1e-12 * std::abs(alpha(k))) {
      used = k + 1;
      break;
    }
    q = w / beta(k);
  }

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(used, used);
  for (int k = 0; k < used; ++k) {
    T(k, k) = alpha(k);
    if (k + 1 < used) T(k, k + 1) = T(k + 1, k) = beta(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  const Eigen::VectorXd& theta = es.eigenvalues();
  LanczosEstimate out;
  out.lambda = K.shift() + 1.0 / theta(used - 1);
  out.next = used > 1 ? K.shift() + 1.0 / theta(used - 2)
                      : std::numeric_limits<double>::infinity();
  out.vector = Q.leftCols(used) * es.eigenvectors().col(used - 1);
  return out;
}

}  // namespace

SpectrumReport lambda1(const JacobiSystem& sys, const SolverOptions& opts) {
  SpectrumReport rep;
  rep.grid = {sys.nu, sys.nv};
  const int n = static_cast<int>(sys.B.size());
  const Eigen::VectorXd inv_sqrt_b = sys.B.cwiseSqrt().cwiseInverse();
  const double lower = gershgorin_lower_bound(sys);
  const double upper = gershgorin_upper_bound(sys);
  const double op_norm = std::max({std::abs(lower), std::abs(upper), 1e-300});

  ShiftedFactorization K(sys);
  const double shift0 = lower - 1e-3 * (1.0 + std::abs(lower));
  if (!K.factorize(shift0) || K.inertia().negative != 0) {
    throw SolverError("lambda1: factorization below the Gershgorin bound failed", 0);
  }
  const LanczosEstimate est = lanczos_estimate(sys, K, opts.lanczos_steps);

  // Move the shift just below the estimate; inertia certifies it sits below
  // the whole spectrum so inverse iteration targets lambda1.
  const double gap = std::isfinite(est.next) ? est.next - est.lambda : 1.0;
  double delta = std::max(0.05 * gap, 1e-7 * (1.0 + std::abs(est.lambda)));
  bool placed = false;
  for (int attempt = 0; attempt < 12 && !placed; ++attempt, delta *= 4) {
    const double shift = est.lambda - delta;
    if (shift <= shift0) break;
    placed = K.factorize(shift) && K.inertia().negative == 0;
  }
  if (!placed && !(K.factorize(shift0) && K.inertia().negative == 0)) {
    throw SolverError("lambda1: could not place a shift below the spectrum", 0);
  }

  Eigen::VectorXd x = est.vector;
  double rho = 0, residual = std::numeric_limits<double>::infinity();
  double best = residual;
  int since_best = 0;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    x = K.solve(sys.B.cwiseProduct(x));
    x /= std::sqrt(x.dot(sys.B.cwiseProduct(x)));
    const Eigen::VectorXd Ax = sys.A * x;
    rho = x.dot(Ax);  // x is B-normalized
    residual = (inv_sqrt_b.cwiseProduct(Ax - rho * sys.B.cwiseProduct(x))).norm() / op_norm;
    if (residual < opts.residual_tolerance) break;
    if (residual < 0.5 * best) {
      best = residual;
      since_best = 0;
    } else if (++since_best > 20 && residual < opts.converged_residual) {
      break;  // stagnated at round-off
    }
  }
  rep.iterations = it + 1;
  rep.lambda1 = rho;
  rep.residual = residual;
  rep.converged = residual < opts.converged_residual;
  if (!rep.converged) {
    std::ostringstream msg;
    msg << "lambda1: no convergence after " << rep.iterations
        << " iterations (residual " << residual << ")";
    throw SolverError(msg.str(), residual);
  }

  const double xmax = x.cwiseAbs().maxCoeff();
  const double sgn = x.sum() >= 0 ? 1.0 : -1.0;
  int wrong = 0;
  for (int k = 0; k < n; ++k) {
    if (sgn * x(k) < -1e-8 * xmax) ++wrong;
  }
  rep.ground_state_one_signed = wrong == 0;

  if (opts.compute_index) {
    rep.negative_count = rep.lambda1 > opts.marginal_band ? 0 : morse_index(sys);
  }
  rep.stability = classify(rep.lambda1, opts.marginal_band);
  return rep;
}

SpectrumReport lambda1(const JacobiProblem& problem, const SolverOptions& opts) {
  SpectrumReport rep = lambda1(assemble(problem), opts);
  rep.label = problem.label;
  rep.domain = problem.domain;
  return rep;
}

SpectrumReport lambda1_richardson(const JacobiProblem& problem,
                                  const SolverOptions& opts) {
  SpectrumReport coarse = lambda1(problem, opts);
  JacobiProblem fine = problem;
  fine.grid.nu = 2 * problem.grid.nu + 1;
  fine.grid.nv = problem.v_boundary == VBoundary::Periodic ? 2 * problem.grid.nv
                                                           : 2 * problem.grid.nv + 1;
  SolverOptions fine_opts = opts;
  fine_opts.compute_index = false;
  const SpectrumReport f = lambda1(fine, fine_opts);
  coarse.lambda1_extrapolated = (4 * f.lambda1 - coarse.lambda1) / 3;
  return coarse;
}

// ---------------------------------------------------------------------------
// Exhaustion and searches

std::vector<Domain> square_schedule(const std::vector<double>& half_widths) {
  std::vector<Domain> out;
  for (double k : half_widths) out.push_back(Domain::square(k));
  return out;
}

std::vector<double> default_half_widths() { return {1, 2, 3, 4, 5, 6, 7, 8}; }

ExhaustionResult exhaustion(const ProblemFactory& factory,
                            const std::vector<Domain>& schedule,
                            const SolverOptions& opts) {
  for (std::size_t k = 1; k < schedule.size(); ++k) {
    if (!schedule[k].contains(schedule[k - 1])) {
      throw std::invalid_argument("exhaustion: domain schedule is not nested");
    }
  }
  ExhaustionResult res;
  std::vector<double> sizes;
  for (const Domain& d : schedule) {
    const JacobiProblem p = factory(d);
    res.reports.push_back(lambda1(p, opts));
    const double su = 0.5 * (d.u1 - d.u0), sv = 0.5 * (d.v1 - d.v0);
    sizes.push_back(p.v_boundary == VBoundary::Periodic ? su : std::max(su, sv));
  }
  for (std::size_t k = 1; k < res.reports.size(); ++k) {
    if (res.reports[k].lambda1 > res.reports[k - 1].lambda1) res.monotone = false;
  }

  const std::size_t n = res.reports.size();
  if (n == 0) return res;
  res.limit_estimate = res.reports.back().lambda1;
  const std::size_t m = std::min<std::size_t>(3, n);
  if (m >= 2 && sizes[n - 1] > sizes[n - m]) {
    Eigen::MatrixXd X(m, 2);
    Eigen::VectorXd y(m);
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t k = n - m + r;
      X(r, 0) = 1.0;
      X(r, 1) = 1.0 / (sizes[k] * sizes[k]);
      y(r) = res.reports[k].lambda1;
    }
    const Eigen::Vector2d c = X.colPivHouseholderQr().solve(y);
    res.limit_estimate = c(0);
    res.fit_residual = (X * c - y).norm();
  }
  return res;
}

ExhaustionResult exhaustion(const SurfaceChart& chart,
                            const std::vector<Domain>& schedule, double spacing,
                            const SolverOptions& opts) {
  const VBoundary vb = chart.periodic_v() ? VBoundary::Periodic : VBoundary::Dirichlet;
  return exhaustion(
      [&](const Domain& d) {
        return make_jacobi_problem(chart, d, grid_from_spacing(d, spacing, vb));
      },
      schedule, opts);
}

CriticalResult bisect_zero_crossing(
    const std::function<SpectrumReport(double)>& evaluate, double lo, double hi,
    double tol) {
  if (!(lo < hi) || !(tol > 0)) {
    throw std::invalid_argument("bisect_zero_crossing: need lo < hi and tol > 0");
  }
  CriticalResult res;
  const auto eval = [&](double p) {
    const SpectrumReport r = evaluate(p);
    res.trace.push_back({p, r.lambda1, r.negative_count});
    return r.lambda1;
  };
  double f_lo = eval(lo);
  const double f_hi = eval(hi);
  if (!(f_lo * f_hi < 0)) {
    std::ostringstream msg;
    msg << "invalid bracket: lambda1(" << lo << ") = " << f_lo << ", lambda1("
        << hi << ") = " << f_hi << " have the same sign";
    throw std::invalid_argument(msg.str());
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = eval(mid);
    if ((f_mid > 0) == (f_lo > 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  res.lower = lo;
  res.upper = hi;
  res.estimate = 0.5 * (lo + hi);
  return res;
}

CriticalResult critical_pitch(const Domain& domain, double spacing, double a_lo,
                              double a_hi, double tol, const SolverOptions& opts,
                              const PitchObserver& observer) {
  const Grid grid = grid_from_spacing(domain, spacing);
  const auto evaluate = [&](double a) {
    SpectrumReport r = lambda1(make_jacobi_problem(helicoid_chart(a), domain, grid), opts);
    if (observer) observer(a, r);
    return r;
  };
  // The pitch search is oriented: stable at a_lo, unstable at a_hi.
  const SpectrumReport lo = evaluate(a_lo);
  const SpectrumReport hi = evaluate(a_hi);
  if (!(lo.lambda1 > 0 && hi.lambda1 < 0)) {
    std::ostringstream msg;
    msg << "critical_pitch: bracket [" << a_lo << ", " << a_hi
        << "] invalid: lambda1 = " << lo.lambda1 << ", " << hi.lambda1;
    throw std::invalid_argument(msg.str());
  }
  // Reuse the two endpoint solves.
  bool first = true, second = true;
  return bisect_zero_crossing(
      [&](double a) {
        if (first && a == a_lo) { first = false; return lo; }
        if (second && a == a_hi) { second = false; return hi; }
        return evaluate(a);
      },
      a_lo, a_hi, tol);
}

JacobiProblem ball_catenoid_problem(double abar, double half_width,
                                    double spacing, int rotation_nodes) {
  const SurfaceChart chart = ball_catenoid_chart(abar, half_width);
  const Domain d{-half_width, half_width, 0.0, 2 * std::numbers::pi};
  Grid g = grid_from_spacing(d, spacing, VBoundary::Periodic);
  g.nv = rotation_nodes;
  return make_jacobi_problem(chart, d, g);
}

ConjugacyReport conjugacy_crosscheck(double a, const ConjugacyOptions& opts) {
  if (!(a > 1)) throw std::invalid_argument("conjugacy_crosscheck: need a > 1");
  ConjugacyReport rep;
  rep.a = a;
  rep.abar = std::atanh(1.0 / a);

  rep.helicoid = exhaustion(helicoid_chart(a), square_schedule(opts.helicoid_half_widths),
                            opts.helicoid_spacing, opts.solver);

  const double w_max = *std::max_element(opts.catenoid_half_widths.begin(),
                                         opts.catenoid_half_widths.end());
  const SurfaceChart catenoid = ball_catenoid_chart(rep.abar, w_max);
  std::vector<Domain> schedule;
  for (double w : opts.catenoid_half_widths) {
    schedule.push_back({-w, w, 0.0, 2 * std::numbers::pi});
  }
  rep.catenoid = exhaustion(
      [&](const Domain& d) {
        Grid g = grid_from_spacing(d, opts.catenoid_spacing, VBoundary::Periodic);
        g.nv = opts.catenoid_rotation_nodes;
        return make_jacobi_problem(catenoid, d, g);
      },
      schedule, opts.solver);

  const double band = opts.solver.marginal_band;
  rep.helicoid_class = classify(rep.helicoid.reports.back().lambda1, band);
  rep.catenoid_class = classify(rep.catenoid.reports.back().lambda1, band);
  rep.agree = rep.helicoid_class == rep.catenoid_class;
  return rep;
}

}  // namespace hypermin
