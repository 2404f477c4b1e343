#include "commands.hpp"

#include "hypermin/diffgeo.hpp"
#include "hypermin/io.hpp"
#include "hypermin/parallel.hpp"
#include "hypermin/quadrature.hpp"
#include "hypermin/stability.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

namespace hypermin::cli {

namespace {

using json = nlohmann::json;
constexpr double kTwoPi = 2 * std::numbers::pi;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- output plumbing --------------------------------------------------------

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw ConfigError("cannot open output file: " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void write_svg_file(const std::string& path, const io::PlotSpec& spec) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open svg file: " + path);
  io::write_svg(f, spec);
}

std::string format_or(const RunConfig& cfg, const std::string& fallback,
                      std::initializer_list<const char*> allowed) {
  const std::string f = cfg.format.value_or(fallback);
  for (const char* a : allowed) {
    if (f == a) return f;
  }
  throw ConfigError("format '" + f + "' not supported by " + cfg.subcommand);
}

// --- settings ---------------------------------------------------------------

bool is_catenoid(const std::string& s) { return s.rfind("cat-", 0) == 0; }

void check_surface(const std::string& s) {
  static const char* known[] = {"helicoid", "cat-spherical", "cat-hyperbolic",
                                "cat-parabolic", "cat-ball"};
  for (const char* k : known) {
    if (s == k) return;
  }
  throw ConfigError("unknown surface: " + s);
}

double geometry_tol(const RunConfig& cfg) {
  const double t = cfg.tol.value_or(1e-10);
  if (!(t > 0)) throw ConfigError("--tol must be positive");
  return t;
}

double surface_parameter(const RunConfig& cfg) {
  if (cfg.surface == "helicoid") return cfg.a;
  if (cfg.surface == "cat-ball") return cfg.abar;
  if (cfg.surface == "cat-parabolic") return 0.0;
  return cfg.atilde;
}

/// Default (u, v) rectangle per surface.
Domain default_domain(const RunConfig& cfg, bool for_spectrum) {
  const std::string& s = cfg.surface;
  if (s == "helicoid") return for_spectrum ? Domain::square(6) : Domain{-2, 2, -3, 3};
  if (s == "cat-spherical") return {-1.5, 1.5, 0, kTwoPi};
  if (s == "cat-ball") return {-1.2, 1.2, 0, kTwoPi};
  return {-1.5, 1.5, -1, 1};
}

Domain domain_of(const RunConfig& cfg, bool for_spectrum) {
  if (!cfg.domain) return default_domain(cfg, for_spectrum);
  const auto& d = *cfg.domain;
  if (d.size() != 4) throw ConfigError("--domain needs four values u0,u1,v0,v1");
  if (!(d[0] < d[1]) || !(d[2] < d[3])) {
    throw ConfigError("--domain needs u0 < u1 and v0 < v1");
  }
  return {d[0], d[1], d[2], d[3]};
}

double extent_of(const Domain& d) { return std::max(std::abs(d.u0), std::abs(d.u1)); }

SolverOptions solver_options(const RunConfig& cfg) {
  SolverOptions o;
  if (!(cfg.marginal >= 0)) throw ConfigError("--marginal must be non-negative");
  o.marginal_band = cfg.marginal;
  if (cfg.inject_fault == "solver") o.max_iterations = 0;
  return o;
}

std::pair<int, int> grid_pair(const RunConfig& cfg, int nu, int nv) {
  if (!cfg.grid) return {nu, nv};
  const auto& g = *cfg.grid;
  if (g.size() != 2) throw ConfigError("--grid needs two values Nu,Nv");
  if (g[0] < 1 || g[1] < 1) throw ConfigError("--grid values must be positive");
  return {g[0], g[1]};
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
  return out;
}

/// Zero crossing of y(x) by linear interpolation at the first sign change.
double zero_crossing(const std::vector<double>& x, const std::vector<double>& y) {
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    if ((y[k] > 0) != (y[k + 1] > 0)) {
      return x[k] + (x[k + 1] - x[k]) * y[k] / (y[k] - y[k + 1]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::mutex log_mutex;

void progress(std::ostream& log, const std::string& line) {
  std::lock_guard<std::mutex> lock(log_mutex);
  log << line << std::endl;
}

JacobiProblem spectrum_problem(const RunConfig& cfg, const Domain& d,
                               std::optional<double> spacing_override = {}) {
  const SurfaceChart chart = chart_for(cfg, extent_of(d));
  const VBoundary vb = chart.periodic_v() ? VBoundary::Periodic : VBoundary::Dirichlet;
  Grid g;
  if (cfg.grid) {
    const auto [nu, nv] = grid_pair(cfg, 1, 1);
    g = {nu, nv};
  } else {
    const double default_h = cfg.surface == "helicoid" ? kDefaultScheduleSpacing : 0.01;
    const double h = spacing_override.value_or(cfg.spacing.value_or(default_h));
    if (!(h > 0)) throw ConfigError("--spacing must be positive");
    g = grid_from_spacing(d, h, vb);
    if (vb == VBoundary::Periodic) {
      if (cfg.rotation_nodes < 3) throw ConfigError("--rotation-nodes must be at least 3");
      g.nv = cfg.rotation_nodes;
    }
  }
  return make_jacobi_problem(chart, d, g);
}

/// Runs body; solver and configuration failures become exit codes, with an
/// error trailer when a CSV was started.
int guarded(std::ostream& log, const std::function<int()>& body,
            io::CsvWriter* const* csv = nullptr) {
  const auto trailer = [&](const std::string& msg) {
    if (csv && *csv) (*csv)->error_trailer(msg);
    log << "error: " << msg << std::endl;
  };
  try {
    return body();
  } catch (const SolverError& e) {
    trailer(std::string(e.what()) + " (residual " + io::format_real(e.last_residual()) + ")");
    return kSolverError;
  } catch (const QuadratureError& e) {
    trailer(e.what());
    return kSolverError;
  } catch (const std::exception& e) {
    trailer(e.what());
    return kConfigError;
  }
}

std::string stability_name(Stability s) { return to_string(s); }

}  // namespace

// --- public helpers ---------------------------------------------------------

Model parse_model(const std::string& name) {
  if (name == "hyperboloid") return Model::Hyperboloid;
  if (name == "ball") return Model::Ball;
  if (name == "upper-half") return Model::UpperHalf;
  throw ConfigError("unknown model: " + name);
}

SurfaceChart chart_for(const RunConfig& cfg, double extent) {
  check_surface(cfg.surface);
  const double tol = geometry_tol(cfg);
  const std::string& s = cfg.surface;
  if (s == "helicoid") return helicoid_chart(cfg.a);
  if (s == "cat-spherical") return catenoid_chart(CatenoidKind::spherical(cfg.atilde), extent, tol);
  if (s == "cat-hyperbolic") return catenoid_chart(CatenoidKind::hyperbolic(cfg.atilde), extent, tol);
  if (s == "cat-parabolic") return catenoid_chart(CatenoidKind::parabolic(), extent, tol);
  return ball_catenoid_chart(cfg.abar, extent, tol);
}

void apply_json_config(RunConfig& cfg, const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a flat JSON object");
  const auto numbers = [](const json& v) {
    if (v.is_string()) {
      std::vector<double> out;
      std::stringstream ss(v.get<std::string>());
      for (std::string item; std::getline(ss, item, ',');) out.push_back(std::stod(item));
      return out;
    }
    return v.get<std::vector<double>>();
  };
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "subcommand") cfg.subcommand = v.get<std::string>();
      else if (key == "surface") cfg.surface = v.get<std::string>();
      else if (key == "a") cfg.a = v.get<double>();
      else if (key == "atilde") cfg.atilde = v.get<double>();
      else if (key == "abar") cfg.abar = v.get<double>();
      else if (key == "model") cfg.model = v.get<std::string>();
      else if (key == "domain") cfg.domain = numbers(v);
      else if (key == "grid") {
        std::vector<int> g;
        for (double x : numbers(v)) g.push_back(static_cast<int>(x));
        cfg.grid = g;
      }
      else if (key == "spacing") cfg.spacing = v.get<double>();
      else if (key == "tol") cfg.tol = v.get<double>();
      else if (key == "out") cfg.out = v.get<std::string>();
      else if (key == "format") cfg.format = v.get<std::string>();
      else if (key == "a_list") cfg.a_list = numbers(v);
      else if (key == "half_widths") cfg.half_widths = numbers(v);
      else if (key == "bracket") cfg.bracket = numbers(v);
      else if (key == "svg") cfg.svg = v.get<std::string>();
      else if (key == "rulings") cfg.rulings = v.get<int>();
      else if (key == "s_max") cfg.s_max = v.get<double>();
      else if (key == "t_max") cfg.t_max = v.get<double>();
      else if (key == "rotation_nodes") cfg.rotation_nodes = v.get<int>();
      else if (key == "richardson") cfg.richardson = v.get<bool>();
      else if (key == "marginal") cfg.marginal = v.get<double>();
      else throw ConfigError("unknown config key: " + key);
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    } catch (const std::logic_error& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
}

// --- sample -----------------------------------------------------------------

int run_sample(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const std::string fmt = format_or(cfg, "obj", {"obj", "csv", "json"});
  const Model model = parse_model(cfg.model);
  const Domain d = domain_of(cfg, false);
  const auto [nu, nv] = grid_pair(cfg, 80, 120);
  if (nu < 2 || nv < 2) throw ConfigError("sample needs at least 2x2 vertices");
  if (cfg.rulings < 0) throw ConfigError("--rulings must be non-negative");
  const SurfaceChart chart = chart_for(cfg, extent_of(d));
  const auto us = linspace(d.u0, d.u1, nu), vs = linspace(d.v0, d.v1, nv);
  progress(log, "sample: " + chart.name() + " " + std::to_string(nu) + "x" +
                    std::to_string(nv) + " in " + to_string(model));

  std::vector<Eigen::Vector4d> coords;
  coords.reserve(static_cast<std::size_t>(nu) * nv);
  for (double u : us) {
    for (double v : vs) {
      const LorentzVecd p = chart.point(u, v);
      Eigen::Vector4d c = Eigen::Vector4d::Zero();
      switch (model) {
        case Model::Hyperboloid: c = p; break;
        case Model::Ball:
          c.head<3>() = hyperboloid_to_ball(HyperboloidPoint<double>(p, 1e-8)).coords();
          break;
        case Model::UpperHalf:
          c.head<3>() = hyperboloid_to_upper_half(HyperboloidPoint<double>(p, 1e-8)).coords();
          break;
      }
      coords.push_back(c);
    }
  }

  io::GridMesh mesh;
  mesh.nu = nu;
  mesh.nv = nv;
  for (const auto& c : coords) {
    // Hyperboloid vertices are projected to their spatial part.
    mesh.vertices.push_back(model == Model::Hyperboloid ? Eigen::Vector3d(c.tail<3>())
                                                        : Eigen::Vector3d(c.head<3>()));
  }
  for (int r = 0; r < cfg.rulings; ++r) {
    const int j = cfg.rulings == 1 ? nv / 2
                                   : static_cast<int>(std::lround(double(r) * (nv - 1) / (cfg.rulings - 1)));
    std::vector<int> line;
    for (int i = 0; i < nu; ++i) line.push_back(i * nv + j);
    mesh.polylines.push_back(std::move(line));
  }

  if (fmt == "obj") {
    io::write_obj(out, mesh, chart.name() + " " + to_string(model));
  } else if (fmt == "csv") {
    std::vector<std::string> header = {"i", "j", "u", "v"};
    if (model == Model::Hyperboloid) header.insert(header.end(), {"x1", "x2", "x3", "x4"});
    else if (model == Model::Ball) header.insert(header.end(), {"x", "y", "z"});
    else header.insert(header.end(), {"re_z", "im_z", "t"});
    io::CsvWriter w(out, header);
    for (int i = 0; i < nu; ++i) {
      for (int j = 0; j < nv; ++j) {
        const auto& c = coords[static_cast<std::size_t>(i) * nv + j];
        w.cell(i).cell(j).cell(us[i]).cell(vs[j]);
        for (int k = 0; k < (model == Model::Hyperboloid ? 4 : 3); ++k) w.cell(c(k));
        w.end_row();
      }
    }
  } else {
    json j;
    j["surface"] = chart.name();
    j["model"] = to_string(model);
    j["nu"] = nu;
    j["nv"] = nv;
    j["vertices"] = json::array();
    for (const auto& c : coords) {
      const int n = model == Model::Hyperboloid ? 4 : 3;
      std::vector<double> row(c.data(), c.data() + n);
      j["vertices"].push_back(row);
    }
    j["rulings"] = mesh.polylines;
    out << j.dump(1) << '\n';
  }
  return kSuccess;
}

// --- check ------------------------------------------------------------------

namespace {

struct CheckItem {
  std::string name;
  double value;
  double tolerance;
  bool pass() const { return std::isfinite(value) && value < tolerance; }
};

}  // namespace

int run_check(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  format_or(cfg, "json", {"json"});
  const Domain d = domain_of(cfg, false);
  const auto [nu, nv] = grid_pair(cfg, 100, 100);
  const SurfaceChart chart = chart_for(cfg, extent_of(d));
  const bool analytic_profile = cfg.surface == "helicoid" || cfg.surface == "cat-ball";
  const auto us = linspace(d.u0, d.u1, nu), vs = linspace(d.v0, d.v1, nv);
  progress(log, "check: " + chart.name() + " on " + std::to_string(nu * nv) + " samples");

  double constraint = 0, mean_h = 0, ball_rt = 0, upper_rt = 0, first_form = 0;
  const double fault = cfg.inject_fault == "roundtrip" ? 1e-6 : 0.0;
  for (double u : us) {
    for (double v : vs) {
      const LorentzVecd p = chart.point(u, v);
      constraint = std::max(constraint, std::abs(minkowski_dot(p, p) + 1));
      const HyperboloidPoint<double> hp(p, 1e-8);

      const Eigen::Vector3d b = hyperboloid_to_ball(hp).coords();
      Eigen::Vector3d back = hyperboloid_to_ball(ball_to_hyperboloid(BallPoint<double>(b))).coords();
      back.x() += fault;
      ball_rt = std::max(ball_rt, (back - b).lpNorm<Eigen::Infinity>());

      const auto uh = hyperboloid_to_upper_half(hp);
      const auto uh2 = hyperboloid_to_upper_half(upper_half_to_hyperboloid(uh));
      const double scale = std::max({1.0, std::abs(uh.z()), uh.t()});
      upper_rt = std::max(upper_rt, std::max(std::abs(uh2.z() - uh.z()),
                                             std::abs(uh2.t() - uh.t())) / scale);

      const Forms f = fundamental_forms(chart, u, v);
      mean_h = std::max(mean_h, std::abs(f.mean_curvature()));
      if (cfg.surface == "helicoid") {
        const double G = std::pow(std::cosh(u), 2) + cfg.a * cfg.a * std::pow(std::sinh(u), 2);
        first_form = std::max({first_form, std::abs(f.E - 1), std::abs(f.F),
                               std::abs(f.G - G) / std::max(1.0, G)});
      }
    }
  }

  std::vector<CheckItem> items;
  items.push_back({"hyperboloid_constraint", constraint, analytic_profile ? 1e-12 : 1e-8});
  items.push_back({"mean_curvature", mean_h, 1e-6});
  items.push_back({"ball_roundtrip", ball_rt, 1e-12});
  items.push_back({"upper_half_roundtrip", upper_rt, 1e-12});
  if (cfg.surface == "helicoid") items.push_back({"first_form_closed_form", first_form, 1e-9});

  // Intrinsic against extrinsic curvature on a coarse interior subgrid.
  double gauss = 0;
  const int nc = 8;
  const double mu = 0.1 * (d.u1 - d.u0), mv = 0.1 * (d.v1 - d.v0);
  for (double u : linspace(d.u0 + mu, d.u1 - mu, nc)) {
    for (double v : linspace(d.v0 + mv, d.v1 - mv, nc)) {
      const double k_int = brioschi_curvature(chart, u, v);
      const double k_ext = fundamental_forms(chart, u, v).gauss_curvature_extrinsic();
      gauss = std::max(gauss, std::abs(k_int - k_ext) / std::max(1.0, std::abs(k_ext)));
    }
  }
  items.push_back({"gauss_equation", gauss, 1e-5});

  if (cfg.surface == "cat-spherical" || cfg.surface == "cat-hyperbolic") {
    const bool sph = cfg.surface == "cat-spherical";
    const auto prof = catenoid_profile(sph ? CatenoidKind::spherical(cfg.atilde)
                                           : CatenoidKind::hyperbolic(cfg.atilde),
                                       extent_of(d), geometry_tol(cfg));
    double ident = 0;
    for (const auto& s : prof.samples()) {
      const double lhs = sph ? s.x4 * s.x4 - s.x3 * s.x3 : s.x3 * s.x3 + s.x4 * s.x4;
      const double rhs = sph ? s.x1 * s.x1 + 1 : s.x1 * s.x1 - 1;
      ident = std::max(ident, std::abs(lhs - rhs));
    }
    items.push_back({"profile_identity", ident, 1e-10});
  }
  if (cfg.surface == "cat-ball") {
    // The neck circle w = 0 sits at distance abar from the rotation axis.
    const double dist = distance_to_axis(chart.point(0.0, 0.0), 2);
    items.push_back({"neck_axis_distance", std::abs(dist - cfg.abar), 1e-10});
  }

  json report;
  report["surface"] = chart.name();
  report["parameter"] = surface_parameter(cfg);
  report["samples"] = nu * nv;
  report["domain"] = {d.u0, d.u1, d.v0, d.v1};
  bool all = true;
  report["checks"] = json::array();
  for (const auto& it : items) {
    all = all && it.pass();
    report["checks"].push_back(
        {{"name", it.name}, {"value", it.value}, {"tolerance", it.tolerance}, {"pass", it.pass()}});
    if (!it.pass()) progress(log, "check failed: " + it.name + " = " + io::format_real(it.value));
  }
  report["pass"] = all;
  out << report.dump(2) << '\n';
  return all ? kSuccess : kCheckFailure;
}

// --- lambda1 ----------------------------------------------------------------

int run_lambda1(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  format_or(cfg, "csv", {"csv"});
  const Domain d = domain_of(cfg, true);
  const JacobiProblem problem = spectrum_problem(cfg, d);
  progress(log, "lambda1: " + problem.label + " grid " + std::to_string(problem.grid.nu) +
                    "x" + std::to_string(problem.grid.nv));
  io::CsvWriter* csv = nullptr;
  io::CsvWriter w(out, {"surface", "parameter", "u0", "u1", "v0", "v1", "nu", "nv",
                        "lambda1", "lambda1_extrapolated", "index", "residual",
                        "stability", "one_signed"});
  csv = &w;
  return guarded(log, [&] {
    const SolverOptions opts = solver_options(cfg);
    const SpectrumReport r = cfg.richardson ? lambda1_richardson(problem, opts)
                                            : lambda1(problem, opts);
    w.cell(cfg.surface).cell(surface_parameter(cfg)).cell(d.u0).cell(d.u1).cell(d.v0)
        .cell(d.v1).cell(r.grid.nu).cell(r.grid.nv).cell(r.lambda1)
        .cell(r.lambda1_extrapolated.value_or(std::numeric_limits<double>::quiet_NaN()))
        .cell(r.negative_count).cell(r.residual).cell(stability_name(r.stability))
        .cell(r.ground_state_one_signed ? 1 : 0);
    w.end_row();
    if (!r.converged) {
      throw SolverError("lambda1 did not reach the convergence residual", r.residual);
    }
    return int(kSuccess);
  }, &csv);
}

// --- sweep ------------------------------------------------------------------

int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const std::string fmt = format_or(cfg, "csv", {"csv", "svg"});
  if (cfg.surface != "helicoid") throw ConfigError("sweep runs over the helicoid pitch a");
  const std::vector<double> as =
      cfg.a_list.empty() ? std::vector<double>{0.5, 1.0, 1.5, 2.0, 2.5, 3.0} : cfg.a_list;
  for (double a : as) {
    if (!(a >= 0)) throw ConfigError("sweep pitches must be non-negative");
  }
  const std::vector<Domain> schedule = cfg.half_widths.empty()
                                           ? std::vector<Domain>{domain_of(cfg, true)}
                                           : square_schedule(cfg.half_widths);
  const SolverOptions opts = solver_options(cfg);
  const double spacing = cfg.spacing.value_or(kDefaultScheduleSpacing);
  if (!(spacing > 0)) throw ConfigError("--spacing must be positive");
  // Validate nesting before any work.
  for (std::size_t k = 1; k < schedule.size(); ++k) {
    if (!schedule[k].contains(schedule[k - 1])) throw ConfigError("schedule is not nested");
  }

  struct Outcome {
    std::vector<SpectrumReport> reports;
    std::string error;
    bool solver_failure = false;
  };
  const auto outcomes = parallel_map(as, [&](double a) {
    Outcome o;
    try {
      RunConfig c = cfg;
      c.a = a;
      for (const Domain& d : schedule) {
        o.reports.push_back(lambda1(spectrum_problem(c, d, spacing), opts));
        const auto& r = o.reports.back();
        progress(log, "sweep: a=" + io::format_real(a) + " k=" + io::format_real(d.u1) +
                          " lambda1=" + io::format_real(r.lambda1));
        if (!r.converged) throw SolverError("lambda1 did not converge", r.residual);
      }
    } catch (const SolverError& e) {
      o.error = e.what();
      o.solver_failure = true;
    } catch (const std::exception& e) {
      o.error = e.what();
    }
    return o;
  });

  if (fmt == "svg") {
    io::PlotSpec spec;
    spec.title = "helicoid lambda1 against pitch";
    spec.x_label = "a";
    spec.y_label = "lambda1";
    for (std::size_t k = 0; k < schedule.size(); ++k) {
      io::PlotSeries s;
      const Domain& d = schedule[k];
      s.label = "[" + io::format_real(d.u0) + "," + io::format_real(d.u1) + "]x[" +
                io::format_real(d.v0) + "," + io::format_real(d.v1) + "]";
      for (std::size_t i = 0; i < as.size(); ++i) {
        if (k < outcomes[i].reports.size()) {
          s.x.push_back(as[i]);
          s.y.push_back(outcomes[i].reports[k].lambda1);
        }
      }
      spec.series.push_back(std::move(s));
    }
    if (!spec.series.empty()) {
      spec.marker_x = zero_crossing(spec.series.back().x, spec.series.back().y);
      spec.marker_label = "a = " + io::format_real(std::round(spec.marker_x * 1e4) / 1e4);
    }
    io::write_svg(out, spec);
    for (const auto& o : outcomes) {
      if (!o.error.empty()) {
        progress(log, "error: " + o.error);
        return o.solver_failure ? kSolverError : kConfigError;
      }
    }
    return kSuccess;
  }

  io::CsvWriter w(out, {"a", "k", "u0", "u1", "v0", "v1", "nu", "nv", "lambda1", "index",
                        "residual", "stability"});
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < as.size(); ++i) {
    for (const auto& r : outcomes[i].reports) {
      w.cell(as[i]).cell(r.domain.u1).cell(r.domain.u0).cell(r.domain.u1).cell(r.domain.v0)
          .cell(r.domain.v1).cell(r.grid.nu).cell(r.grid.nv).cell(r.lambda1)
          .cell(r.negative_count).cell(r.residual).cell(stability_name(r.stability));
      w.end_row();
    }
    if (!outcomes[i].error.empty()) {
      w.error_trailer(outcomes[i].error);
      progress(log, "error: " + outcomes[i].error);
      return outcomes[i].solver_failure ? kSolverError : kConfigError;
    }
    xs.push_back(as[i]);
    ys.push_back(outcomes[i].reports.back().lambda1);
  }
  if (!cfg.svg.empty()) {
    io::PlotSpec spec;
    spec.title = "helicoid lambda1 against pitch";
    spec.x_label = "a";
    spec.y_label = "lambda1 on the largest domain";
    spec.series.push_back({"lambda1", xs, ys});
    spec.marker_x = zero_crossing(xs, ys);
    spec.marker_label = "zero crossing";
    write_svg_file(cfg.svg, spec);
  }
  return kSuccess;
}

// --- critical ---------------------------------------------------------------

int run_critical(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  format_or(cfg, "csv", {"csv"});
  if (cfg.surface != "helicoid") throw ConfigError("critical searches the helicoid pitch");
  const Domain d = domain_of(cfg, true);
  const double spacing = cfg.spacing.value_or(kDefaultCriticalSpacing);
  const double tol = cfg.tol.value_or(1e-3);
  if (cfg.bracket.size() != 2 || !(cfg.bracket[0] < cfg.bracket[1])) {
    throw ConfigError("--bracket needs lo,hi with lo < hi");
  }
  if (!(spacing > 0) || !(tol > 0)) throw ConfigError("spacing and tol must be positive");
  const SolverOptions opts = solver_options(cfg);

  io::CsvWriter w(out, {"kind", "step", "a", "lambda1", "index", "lower", "upper"});
  io::CsvWriter* csv = &w;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  int step = 0;
  std::vector<double> xs, ys;
  return guarded(log, [&] {
    const CriticalResult res = critical_pitch(
        d, spacing, cfg.bracket[0], cfg.bracket[1], tol, opts,
        [&](double a, const SpectrumReport& r) {
          progress(log, "critical: step " + std::to_string(step) + " a=" + io::format_real(a) +
                            " lambda1=" + io::format_real(r.lambda1));
          w.cell("eval").cell(step++).cell(a).cell(r.lambda1).cell(r.negative_count)
              .cell(nan).cell(nan);
          w.end_row();
          xs.push_back(a);
          ys.push_back(r.lambda1);
        });
    w.cell("estimate").cell(step).cell(res.estimate).cell(nan).cell(-1).cell(res.lower)
        .cell(res.upper);
    w.end_row();
    if (!cfg.svg.empty()) {
      std::vector<std::size_t> order(xs.size());
      for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
      std::sort(order.begin(), order.end(), [&](auto i, auto j) { return xs[i] < xs[j]; });
      io::PlotSeries s{"bisection evaluations", {}, {}};
      for (auto k : order) {
        s.x.push_back(xs[k]);
        s.y.push_back(ys[k]);
      }
      io::PlotSpec spec;
      spec.title = "critical pitch search";
      spec.x_label = "a";
      spec.y_label = "lambda1";
      spec.series.push_back(std::move(s));
      spec.marker_x = res.estimate;
      spec.marker_label = "a_c ~ " + io::format_real(std::round(res.estimate * 1e5) / 1e5);
      write_svg_file(cfg.svg, spec);
    }
    return int(kSuccess);
  }, &csv);
}

// --- conjugacy --------------------------------------------------------------

int run_conjugacy(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  format_or(cfg, "csv", {"csv"});
  const std::vector<double> as = cfg.a_list.empty() ? std::vector<double>{1.5, 2.5} : cfg.a_list;
  for (double a : as) {
    if (!(a > 1)) throw ConfigError("conjugacy needs pitches a > 1");
  }
  ConjugacyOptions opts;
  opts.solver = solver_options(cfg);
  if (!cfg.half_widths.empty()) opts.helicoid_half_widths = cfg.half_widths;
  if (cfg.spacing) opts.helicoid_spacing = *cfg.spacing;
  opts.catenoid_rotation_nodes = cfg.rotation_nodes;

  struct Outcome {
    std::optional<ConjugacyReport> report;
    std::string error;
    bool solver_failure = false;
  };
  const auto outcomes = parallel_map(as, [&](double a) {
    Outcome o;
    try {
      o.report = conjugacy_crosscheck(a, opts);
      progress(log, "conjugacy: a=" + io::format_real(a) + " helicoid " +
                        to_string(o.report->helicoid_class) + ", catenoid " +
                        to_string(o.report->catenoid_class));
    } catch (const SolverError& e) {
      o.error = e.what();
      o.solver_failure = true;
    } catch (const std::exception& e) {
      o.error = e.what();
    }
    return o;
  });

  io::CsvWriter w(out, {"a", "abar", "helicoid_lambda1", "helicoid_limit", "helicoid_class",
                        "catenoid_lambda1", "catenoid_limit", "catenoid_class", "agree"});
  for (const auto& o : outcomes) {
    if (!o.error.empty()) {
      w.error_trailer(o.error);
      progress(log, "error: " + o.error);
      return o.solver_failure ? kSolverError : kConfigError;
    }
    const ConjugacyReport& r = *o.report;
    w.cell(r.a).cell(r.abar).cell(r.helicoid.reports.back().lambda1)
        .cell(r.helicoid.limit_estimate).cell(stability_name(r.helicoid_class))
        .cell(r.catenoid.reports.back().lambda1).cell(r.catenoid.limit_estimate)
        .cell(stability_name(r.catenoid_class)).cell(r.agree ? 1 : 0);
    w.end_row();
  }
  return kSuccess;
}

// --- profile ----------------------------------------------------------------

int run_profile(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  format_or(cfg, "csv", {"csv"});
  check_surface(cfg.surface);
  if (!is_catenoid(cfg.surface)) throw ConfigError("profile needs a catenoid surface");
  const double tol = geometry_tol(cfg);
  if (cfg.surface == "cat-ball") {
    const int count = cfg.grid ? grid_pair(cfg, 0, 0).first : 201;
    if (count < 2) throw ConfigError("profile needs at least two samples");
    progress(log, "profile: ball catenoid abar=" + io::format_real(cfg.abar));
    const auto curve = ball_catenoid_generating_curve(cfg.abar, cfg.t_max, tol);
    io::CsvWriter w(out, {"t", "x_plus", "x_minus"});
    for (const auto& s : curve.samples(count)) {
      w.cell(s.t).cell(s.x_plus).cell(s.x_minus);
      w.end_row();
    }
    return kSuccess;
  }
  const CatenoidKind kind = cfg.surface == "cat-spherical"    ? CatenoidKind::spherical(cfg.atilde)
                            : cfg.surface == "cat-hyperbolic" ? CatenoidKind::hyperbolic(cfg.atilde)
                                                              : CatenoidKind::parabolic();
  if (!(cfg.s_max > 0)) throw ConfigError("--s-max must be positive");
  progress(log, "profile: " + cfg.surface + " s_max=" + io::format_real(cfg.s_max));
  const auto prof = catenoid_profile(kind, cfg.s_max, tol);
  io::CsvWriter w(out, {"s", "x1", "angle", "x3", "x4"});
  for (const auto& s : prof.samples()) {
    w.cell(s.s).cell(s.x1).cell(s.angle).cell(s.x3).cell(s.x4);
    w.end_row();
  }
  return kSuccess;
}

// --- command line -----------------------------------------------------------

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Stability of minimal helicoids and catenoids in hyperbolic 3-space", "hypermin"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  RunConfig flags;
  std::string config_path;
  std::vector<double> domain, a_list, half_widths, bracket;
  std::vector<int> grid;
  double spacing = 0, tol = 0;
  std::string format;

  // Options shared by every subcommand; registered per subcommand so they
  // may follow it on the command line.
  std::map<std::string, CLI::Option*> given;
  const auto add_shared = [&](CLI::App* sub) {
    const auto reg = [&](const std::string& key, CLI::Option* o) {
      given[sub->get_name() + ":" + key] = o;
    };
    reg("surface", sub->add_option("--surface", flags.surface, "surface kind")
                       ->check(CLI::IsMember({"helicoid", "cat-spherical", "cat-hyperbolic",
                                              "cat-parabolic", "cat-ball"})));
    reg("a", sub->add_option("--a", flags.a, "helicoid pitch"));
    reg("atilde", sub->add_option("--atilde", flags.atilde, "catenoid parameter"));
    reg("abar", sub->add_option("--abar", flags.abar, "ball catenoid neck distance"));
    reg("model", sub->add_option("--model", flags.model, "export model")
                     ->check(CLI::IsMember({"hyperboloid", "ball", "upper-half"})));
    reg("domain", sub->add_option("--domain", domain, "u0,u1,v0,v1")->delimiter(',')->expected(4));
    reg("grid", sub->add_option("--grid", grid, "Nu,Nv")->delimiter(',')->expected(2));
    reg("spacing", sub->add_option("--spacing", spacing, "grid spacing"));
    reg("tol", sub->add_option("--tol", tol, "quadrature tolerance, or bisection width for critical"));
    reg("out", sub->add_option("--out", flags.out, "output path, - for stdout"));
    reg("format", sub->add_option("--format", format, "obj|csv|svg|json")
                      ->check(CLI::IsMember({"obj", "csv", "svg", "json"})));
    sub->add_option("--config", config_path, "flat JSON config file");
    reg("a_list", sub->add_option("--a-list", a_list, "pitches")->delimiter(','));
    reg("half_widths", sub->add_option("--half-widths", half_widths, "square schedule")->delimiter(','));
    reg("bracket", sub->add_option("--bracket", bracket, "lo,hi")->delimiter(',')->expected(2));
    reg("svg", sub->add_option("--svg", flags.svg, "also write an SVG plot"));
    reg("rulings", sub->add_option("--rulings", flags.rulings, "number of ruling polylines"));
    reg("s_max", sub->add_option("--s-max", flags.s_max, "profile range"));
    reg("t_max", sub->add_option("--t-max", flags.t_max, "ball catenoid profile range"));
    reg("rotation_nodes", sub->add_option("--rotation-nodes", flags.rotation_nodes,
                                          "angular nodes for rotation surfaces"));
    reg("richardson", sub->add_flag("--richardson", flags.richardson, "also solve at h/2"));
    reg("marginal", sub->add_option("--marginal", flags.marginal, "marginal band for lambda1"));
    reg("inject_fault", sub->add_option("--inject-fault", flags.inject_fault)->group(""));
  };

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"sample", "export a surface mesh"},
      {"check", "run the geometry invariant suite"},
      {"lambda1", "lowest Jacobi eigenvalue on one domain"},
      {"sweep", "lambda1 over pitches and domains"},
      {"critical", "bisection for the critical pitch"},
      {"conjugacy", "helicoid against conjugate ball catenoid"},
      {"profile", "catenoid generating curve"},
  };
  for (const auto& [name, help] : commands) add_shared(app.add_subcommand(name, help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  RunConfig cfg;
  try {
    const std::string sub = app.get_subcommands().front()->get_name();
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ConfigError("cannot read config file: " + config_path);
      std::stringstream ss;
      ss << f.rdbuf();
      apply_json_config(cfg, ss.str());
    }
    cfg.subcommand = sub;
    const auto set = [&](const std::string& key) {
      const auto it = given.find(sub + ":" + key);
      return it != given.end() && it->second->count() > 0;
    };
    if (set("surface")) cfg.surface = flags.surface;
    if (set("a")) cfg.a = flags.a;
    if (set("atilde")) cfg.atilde = flags.atilde;
    if (set("abar")) cfg.abar = flags.abar;
    if (set("model")) cfg.model = flags.model;
    if (set("domain")) cfg.domain = domain;
    if (set("grid")) cfg.grid = grid;
    if (set("spacing")) cfg.spacing = spacing;
    if (set("tol")) cfg.tol = tol;
    if (set("out")) cfg.out = flags.out;
    if (set("format")) cfg.format = format;
    if (set("a_list")) cfg.a_list = a_list;
    if (set("half_widths")) cfg.half_widths = half_widths;
    if (set("bracket")) cfg.bracket = bracket;
    if (set("svg")) cfg.svg = flags.svg;
    if (set("rulings")) cfg.rulings = flags.rulings;
    if (set("s_max")) cfg.s_max = flags.s_max;
    if (set("t_max")) cfg.t_max = flags.t_max;
    if (set("rotation_nodes")) cfg.rotation_nodes = flags.rotation_nodes;
    if (set("richardson")) cfg.richardson = flags.richardson;
    if (set("marginal")) cfg.marginal = flags.marginal;
    if (set("inject_fault")) cfg.inject_fault = flags.inject_fault;
    if (!cfg.inject_fault.empty() && cfg.inject_fault != "roundtrip" &&
        cfg.inject_fault != "solver") {
      throw ConfigError("unknown fault: " + cfg.inject_fault);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kConfigError;
  }

  static const std::map<std::string, int (*)(const RunConfig&, std::ostream&, std::ostream&)>
      dispatch = {{"sample", run_sample},   {"check", run_check},
                  {"lambda1", run_lambda1}, {"sweep", run_sweep},
                  {"critical", run_critical}, {"conjugacy", run_conjugacy},
                  {"profile", run_profile}};
  return guarded(std::cerr, [&] {
    Output output(cfg.out);
    const int code = dispatch.at(cfg.subcommand)(cfg, output.stream(), std::cerr);
    output.stream().flush();
    return code;
  });
}

}  // namespace hypermin::cli
