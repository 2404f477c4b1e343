#pragma once

#include "hypermin/lorentz.hpp"
#include "hypermin/surfaces.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hypermin::cli {

enum ExitCode : int {
  kSuccess = 0,
  kCheckFailure = 1,
  kConfigError = 2,
  kSolverError = 3,
};

/// Settings for one run. Precedence: command-line flags, then the JSON
/// config file, then these defaults.
struct RunConfig {
  std::string subcommand;
  std::string surface = "helicoid";
  double a = 1.0;
  double atilde = 1.0;
  double abar = 0.5;
  std::string model = "hyperboloid";
  std::optional<std::vector<double>> domain;  // u0,u1,v0,v1
  std::optional<std::vector<int>> grid;       // Nu,Nv
  std::optional<double> spacing;
  std::optional<double> tol;
  std::string out = "-";
  std::optional<std::string> format;

  std::vector<double> a_list;        // sweep / conjugacy
  std::vector<double> half_widths;   // square schedule [-k,k]^2
  std::vector<double> bracket = {1.0, 4.0};
  std::string svg;                   // optional plot path
  int rulings = 0;                   // sample: constant-v polylines
  double s_max = 3.0;                // profile / catenoid sample range
  double t_max = 4.0;                // ball catenoid profile range
  int rotation_nodes = 16;
  bool richardson = false;
  double marginal = 1e-4;
  std::string inject_fault;          // test hook: "roundtrip" or "solver"
};

/// Fills cfg from a flat JSON object; unknown keys are a configuration error.
void apply_json_config(RunConfig& cfg, const std::string& json_text);

Model parse_model(const std::string& name);

/// Chart for the configured surface. Catenoid profiles cover `extent` in
/// the first parameter.
SurfaceChart chart_for(const RunConfig& cfg, double extent);

int run_sample(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int run_check(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int run_lambda1(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int run_critical(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int run_conjugacy(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int run_profile(const RunConfig& cfg, std::ostream& out, std::ostream& log);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace hypermin::cli
