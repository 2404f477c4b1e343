#include "commands.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using hypermin::cli::run_cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("hypermin_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "hypermin");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream f(path);
  for (std::string line; std::getline(f, line);) {
    std::vector<std::string> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("sample: helicoid a = 5 in the ball model") {
  TempDir tmp;
  const std::string out = tmp.file("h5.obj");
  REQUIRE(run({"sample", "--a", "5", "--model", "ball", "--domain", "-2,2,-3,3", "--grid",
               "80,120", "--rulings", "5", "--out", out}) == 0);
  std::ifstream f(out);
  int vertices = 0, faces = 0, lines = 0;
  double worst = 0;
  for (std::string line; std::getline(f, line);) {
    if (line.rfind("v ", 0) == 0) {
      std::stringstream ss(line.substr(2));
      double x, y, z;
      ss >> x >> y >> z;
      worst = std::max(worst, x * x + y * y + z * z);
      ++vertices;
    } else if (line.rfind("f ", 0) == 0) {
      ++faces;
    } else if (line.rfind("l ", 0) == 0) {
      ++lines;
    }
  }
  CHECK(vertices == 9600);
  CHECK(faces == 2 * 79 * 119);
  CHECK(lines == 5);
  CHECK(worst < 1.0);
}

TEST_CASE("sample: a = 0 is a totally geodesic disk") {
  TempDir tmp;
  const std::string out = tmp.file("plane.csv");
  REQUIRE(run({"sample", "--a", "0", "--model", "ball", "--format", "csv", "--grid", "20,30",
               "--out", out}) == 0);
  const auto rows = read_csv(out);
  REQUIRE(rows.size() == 601);
  CHECK(rows[0] == std::vector<std::string>{"i", "j", "u", "v", "x", "y", "z"});
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(std::abs(std::stod(rows[k][5])) < 1e-15);
}

TEST_CASE("sample: upper half-space export of a = 10") {
  TempDir tmp;
  const std::string out = tmp.file("uh.csv");
  REQUIRE(run({"sample", "--a", "10", "--model", "upper-half", "--format", "csv", "--grid",
               "15,17", "--domain", "-1.5,1.5,-1,1", "--out", out}) == 0);
  const auto rows = read_csv(out);
  REQUIRE(rows.size() == 1 + 15 * 17);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double u = std::stod(rows[k][2]), v = std::stod(rows[k][3]);
    const std::complex<double> z = std::exp(std::complex<double>(v, 10 * v)) * std::tanh(u);
    const double t = std::exp(v) / std::cosh(u);
    CHECK(std::abs(std::stod(rows[k][4]) - z.real()) < 1e-10);
    CHECK(std::abs(std::stod(rows[k][5]) - z.imag()) < 1e-10);
    CHECK(std::abs(std::stod(rows[k][6]) - t) < 1e-10);
  }
}

TEST_CASE("sample: json export") {
  TempDir tmp;
  const std::string out = tmp.file("s.json");
  REQUIRE(run({"sample", "--surface", "cat-spherical", "--atilde", "1.5", "--format", "json",
               "--grid", "6,7", "--out", out}) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["vertices"].size() == 42);
  CHECK(j["vertices"][0].size() == 4);
}

TEST_CASE("check: helicoid passes, injected fault fails") {
  TempDir tmp;
  const std::string ok = tmp.file("ok.json"), bad = tmp.file("bad.json");
  CHECK(run({"check", "--a", "1", "--out", ok}) == 0);
  const auto good = nlohmann::json::parse(slurp(ok));
  CHECK(good["pass"] == true);
  CHECK(good["samples"] == 10000);
  CHECK(run({"check", "--a", "1", "--inject-fault", "roundtrip", "--out", bad}) == 1);
  const auto failed = nlohmann::json::parse(slurp(bad));
  CHECK(failed["pass"] == false);
  bool roundtrip_failed = false;
  for (const auto& c : failed["checks"]) {
    if (c["name"] == "ball_roundtrip") roundtrip_failed = c["pass"] == false;
  }
  CHECK(roundtrip_failed);
}

TEST_CASE("check: catenoids") {
  TempDir tmp;
  for (const char* s : {"cat-spherical", "cat-hyperbolic", "cat-parabolic", "cat-ball"}) {
    const std::string out = tmp.file(std::string(s) + ".json");
    INFO(s);
    CHECK(run({"check", "--surface", s, "--atilde", "1", "--abar", "0.6", "--out", out}) == 0);
  }
  const auto j = nlohmann::json::parse(slurp(tmp.file("cat-spherical.json")));
  bool found = false;
  for (const auto& c : j["checks"]) {
    if (c["name"] == "profile_identity") {
      found = true;
      CHECK(c["pass"] == true);
      CHECK(c["tolerance"] == 1e-10);
    }
  }
  CHECK(found);
}

TEST_CASE("configuration errors exit with code 2") {
  TempDir tmp;
  const std::string cfg = tmp.file("bad.json");
  std::ofstream(cfg) << R"({"a": 1.0, "colour": "red"})";
  CHECK(run({"lambda1", "--config", cfg}) == 2);
  std::ofstream(tmp.file("broken.json")) << "{not json";
  CHECK(run({"lambda1", "--config", tmp.file("broken.json")}) == 2);
  CHECK(run({"lambda1", "--config", tmp.file("missing.json")}) == 2);
  CHECK(run({"lambda1", "--surface", "torus"}) == 2);
  CHECK(run({"sample", "--a", "-1", "--out", tmp.file("x.obj")}) == 2);
  CHECK(run({"lambda1", "--domain", "1,0,0,1"}) == 2);
  CHECK(run({"profile", "--surface", "helicoid"}) == 2);
  CHECK(run({"profile", "--surface", "cat-spherical", "--atilde", "0.5"}) == 2);
  CHECK(run({"sample", "--format", "svg"}) == 2);
  CHECK(run({"frobnicate"}) == 2);
  CHECK(run({"check", "--inject-fault", "nonsense"}) == 2);
}

TEST_CASE("solver failure exits with code 3 and an error trailer") {
  TempDir tmp;
  const std::string out = tmp.file("l.csv");
  CHECK(run({"lambda1", "--domain", "-1,1,-1,1", "--spacing", "0.2", "--inject-fault", "solver",
             "--out", out}) == 3);
  const std::string text = slurp(out);
  CHECK(text.rfind("surface,parameter,", 0) == 0);
  CHECK(text.find("# error: ") != std::string::npos);
}

TEST_CASE("critical: invalid bracket leaves an error trailer") {
  TempDir tmp;
  const std::string out = tmp.file("c.csv");
  CHECK(run({"critical", "--domain", "-2,2,-2,2", "--spacing", "0.2", "--bracket", "2.6,4",
             "--out", out}) == 2);
  const auto rows = read_csv(out);
  REQUIRE(rows.size() >= 2);
  CHECK(rows.back()[0].rfind("# error:", 0) == 0);
}

TEST_CASE("lambda1: flags override the config file, which overrides defaults") {
  TempDir tmp;
  const std::string cfg = tmp.file("run.json");
  std::ofstream(cfg) << R"({"a": 2.5, "domain": "-2,2,-2,2", "spacing": 0.1})";
  const std::string from_cfg = tmp.file("cfg.csv"), from_flag = tmp.file("flag.csv");
  REQUIRE(run({"lambda1", "--config", cfg, "--out", from_cfg}) == 0);
  REQUIRE(run({"lambda1", "--config", cfg, "--a", "1", "--out", from_flag}) == 0);
  const auto a = read_csv(from_cfg), b = read_csv(from_flag);
  REQUIRE(a.size() == 2);
  REQUIRE(b.size() == 2);
  CHECK(a[0] == std::vector<std::string>{"surface", "parameter", "u0", "u1", "v0", "v1", "nu",
                                         "nv", "lambda1", "lambda1_extrapolated", "index",
                                         "residual", "stability", "one_signed"});
  CHECK(a[1][1] == "2.5");
  CHECK(a[1][2] == "-2");
  CHECK(a[1][6] == "39");
  CHECK(std::stod(a[1][8]) < 0);
  CHECK(a[1][10] == "1");
  CHECK(a[1][12] == "unstable");
  CHECK(b[1][1] == "1");
  CHECK(std::stod(b[1][8]) > 0);
  CHECK(b[1][12] == "stable");
}

TEST_CASE("sweep: sign change between a = 2.0 and 2.5 on [-6,6]^2") {
  TempDir tmp;
  const std::string out = tmp.file("sweep.csv"), svg = tmp.file("sweep.svg");
  REQUIRE(run({"sweep", "--a-list", "0.5,1,1.5,2,2.5,3", "--domain", "-6,6,-6,6", "--out", out,
               "--svg", svg}) == 0);
  const auto rows = read_csv(out);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == std::vector<std::string>{"a", "k", "u0", "u1", "v0", "v1", "nu", "nv",
                                            "lambda1", "index", "residual", "stability"});
  for (std::size_t k = 1; k <= 4; ++k) CHECK(std::stod(rows[k][8]) > 0);
  for (std::size_t k = 5; k <= 6; ++k) CHECK(std::stod(rows[k][8]) < 0);
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(std::stod(rows[k][10]) < 1e-8);
  const std::string plot = slurp(svg);
  CHECK(plot.rfind("<svg", 0) == 0);
  CHECK(plot.find("zero crossing") != std::string::npos);
}

TEST_CASE("sweep output is identical across runs and thread counts") {
  TempDir tmp;
  const std::string cfg = tmp.file("sweep.json");
  std::ofstream(cfg) << R"({"a_list": [0.5, 2.5, 1.5], "half_widths": [1, 2], "spacing": 0.1})";
  ::setenv("HYPERMIN_THREADS", "1", 1);
  REQUIRE(run({"sweep", "--config", cfg, "--out", tmp.file("a.csv")}) == 0);
  ::setenv("HYPERMIN_THREADS", "3", 1);
  REQUIRE(run({"sweep", "--config", cfg, "--out", tmp.file("b.csv")}) == 0);
  REQUIRE(run({"sweep", "--config", cfg, "--out", tmp.file("c.csv")}) == 0);
  ::unsetenv("HYPERMIN_THREADS");
  const std::string a = slurp(tmp.file("a.csv"));
  CHECK(a == slurp(tmp.file("b.csv")));
  CHECK(a == slurp(tmp.file("c.csv")));
  const auto rows = read_csv(tmp.file("a.csv"));
  REQUIRE(rows.size() == 7);
  // Input order is kept.
  CHECK(rows[1][0] == "0.5");
  CHECK(rows[3][0] == "2.5");
  CHECK(rows[5][0] == "1.5");
}

TEST_CASE("critical: trace and estimate rows") {
  TempDir tmp;
  const std::string out = tmp.file("crit.csv"), svg = tmp.file("crit.svg");
  REQUIRE(run({"critical", "--domain", "-3,3,-3,3", "--spacing", "0.1", "--tol", "0.01",
               "--out", out, "--svg", svg}) == 0);
  const auto rows = read_csv(out);
  CHECK(rows[0] == std::vector<std::string>{"kind", "step", "a", "lambda1", "index", "lower",
                                            "upper"});
  REQUIRE(rows.size() > 5);
  CHECK(rows[1][2] == "1");
  CHECK(rows[2][2] == "4");
  CHECK(rows.back()[0] == "estimate");
  const double lo = std::stod(rows.back()[5]), hi = std::stod(rows.back()[6]);
  CHECK(hi - lo <= 0.01);
  CHECK(std::stod(rows.back()[2]) > 2.17966);
  CHECK(fs::exists(svg));
}

TEST_CASE("conjugacy: paired rows on a short schedule") {
  TempDir tmp;
  const std::string out = tmp.file("conj.csv");
  REQUIRE(run({"conjugacy", "--a-list", "1.5,2.5", "--half-widths", "1,2,3", "--spacing", "0.1",
               "--out", out}) == 0);
  const auto rows = read_csv(out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][4] == "stable");
  CHECK(rows[1][7] == "stable");
  CHECK(rows[1][8] == "1");
  CHECK(rows[2][4] == "unstable");
  CHECK(rows[2][7] == "unstable");
  CHECK(rows[2][8] == "1");
  CHECK(run({"conjugacy", "--a-list", "0.8"}) == 2);
}

TEST_CASE("profile: generating curves") {
  TempDir tmp;
  REQUIRE(run({"profile", "--surface", "cat-spherical", "--atilde", "1", "--s-max", "1", "--out",
               tmp.file("p.csv")}) == 0);
  const auto rows = read_csv(tmp.file("p.csv"));
  CHECK(rows[0] == std::vector<std::string>{"s", "x1", "angle", "x3", "x4"});
  CHECK(rows.size() > 20);
  REQUIRE(run({"profile", "--surface", "cat-ball", "--abar", "0.5", "--grid", "11,1", "--out",
               tmp.file("b.csv")}) == 0);
  const auto ball = read_csv(tmp.file("b.csv"));
  REQUIRE(ball.size() == 12);
  CHECK(ball[1] == std::vector<std::string>{"0.5", "0", "0"});
}

#ifdef HYPERMIN_CLI_PATH
TEST_CASE("the executable reports exit codes and keeps stdout machine-readable") {
  TempDir tmp;
  const std::string cmd = std::string(HYPERMIN_CLI_PATH);
  const std::string out = tmp.file("stdout.csv");
  const int code = std::system((cmd + " profile --surface cat-ball --grid 3,1 > " + out +
                                " 2>" + tmp.file("stderr.txt")).c_str());
  CHECK(WEXITSTATUS(code) == 0);
  CHECK(slurp(out).rfind("t,x_plus,x_minus\n", 0) == 0);
  CHECK(slurp(tmp.file("stderr.txt")).find("profile:") != std::string::npos);
  CHECK(WEXITSTATUS(std::system((cmd + " check --inject-fault roundtrip > /dev/null 2>&1").c_str())) == 1);
  CHECK(WEXITSTATUS(std::system((cmd + " lambda1 --grid 3 > /dev/null 2>&1").c_str())) == 2);
}
#endif
