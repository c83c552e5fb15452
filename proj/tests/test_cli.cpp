#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sng/commands.hpp"
#include "sng/evolve.hpp"

using namespace sng;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("sng_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

std::string slurp(const std::string& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct Table {
  std::string header;
  std::vector<std::vector<double>> rows;
  std::vector<double> column(std::size_t k) const {
    std::vector<double> c;
    for (const auto& r : rows) c.push_back(r.at(k));
    return c;
  }
};

Table read_csv(const std::string& text) {
  std::istringstream is(text);
  Table t;
  std::getline(is, t.header);
  for (std::string line; std::getline(is, line);) {
    std::vector<double> row;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::stod(cell));
    t.rows.push_back(row);
  }
  return t;
}

// Writes the n = 0 summary once for the tests that consume it.
const std::string& ground_json() {
  static const std::string p = [] {
    const auto p = path("ground.json");
    REQUIRE(cli({"solve", "--n", "0", "--out-json", p, "--out-csv", path("ground.csv")}).code == 0);
    return p;
  }();
  return p;
}

}  // namespace

TEST_CASE("solve n=0 writes the summary and profile") {
  const auto j = nlohmann::ordered_json::parse(slurp(ground_json()));
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  const std::vector<std::string> expected = {"n",          "gamma0",        "gamma1", "epsilon_star",
                                             "node_count", "bracket_width", "grid",   "generated_by",
                                             "x_tol",      "x_clamp_radius"};
  CHECK(keys == expected);
  CHECK(j["grid"]["rho_max"].get<double>() == 40.0);
  CHECK(j["grid"]["points"].get<long long>() == 8001);
  CHECK(j["node_count"].get<int>() == 0);
  CHECK(j["generated_by"].get<std::string>() == kVersion);

  const auto t = read_csv(slurp(path("ground.csv")));
  CHECK(t.header == "rho,f_star,g_star");
  REQUIRE(t.rows.size() == 8001);
  const auto f = t.column(1);
  CHECK(f.front() == 1.0);
  for (std::size_t i = 1; i < f.size(); ++i) CHECK(f[i] < f[i - 1]);
  // 17 significant digits in scientific notation.
  CHECK(slurp(path("ground.csv")).find("0.0000000000000000e+00,1.0000000000000000e+00") != std::string::npos);
}

TEST_CASE("solve n=1 has exactly one sign change") {
  const auto r = cli({"solve", "--n", "1", "--out-csv", path("n1.csv")});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["n"].get<int>() == 1);
  const auto f = read_csv(slurp(path("n1.csv"))).column(1);
  int changes = 0;
  for (std::size_t i = 1; i < f.size(); ++i) changes += (f[i] < 0.0) != (f[i - 1] < 0.0);
  CHECK(changes == 1);
}

TEST_CASE("solve is byte-for-byte deterministic") {
  for (int k = 0; k < 2; ++k) {
    REQUIRE(cli({"solve", "--n", "0", "--tol", "1e-10", "--out-json", path("det" + std::to_string(k) + ".json"),
                 "--out-csv", path("det" + std::to_string(k) + ".csv")})
                .code == 0);
  }
  CHECK(slurp(path("det0.json")) == slurp(path("det1.json")));
  CHECK(slurp(path("det0.csv")) == slurp(path("det1.csv")));
}

TEST_CASE("spectrum n_max=1 gives two ordered records") {
  const auto r = cli({"spectrum", "--n-max", "1", "--csv-prefix", path("spec")});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.size() == 2);
  CHECK(j[0]["node_count"].get<int>() == 0);
  CHECK(j[1]["node_count"].get<int>() == 1);
  CHECK(j[1]["gamma0"].get<double>() < j[0]["gamma0"].get<double>());
  CHECK(fs::exists(path("spec_n0.csv")));
  CHECK(fs::exists(path("spec_n1.csv")));
}

TEST_CASE("rescale in natural units") {
  const auto r = cli({"rescale", "--in", ground_json(), "--natural", "--out-csv", path("nat.csv")});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::ordered_json::parse(r.out);
  CHECK(j["bohr_radius_m"].get<double>() == 1.0);
  CHECK(std::abs(j["virial_residual"].get<double>()) <= 1e-3);
  CHECK(j["renormalized"].get<bool>() == false);
  CHECK(j["e_gravity_J"].get<double>() < 0.0);
  for (const auto& [k, v] : j.items()) {
    const bool listed = k == "bohr_radius_m" || k == "half_max_radius_m" || k == "rms_radius_m" ||
                        k == "e_kinetic_J" || k == "e_gravity_J" || k == "e_total_J" || k == "epsilon_J" ||
                        k == "e_single_J" || k == "virial_residual" || k == "renormalized" ||
                        k == "generated_by";
    CHECK((listed || k.rfind("x_", 0) == 0));
  }
  CHECK(read_csv(slurp(path("nat.csv"))).header == "r_m,f,phi");
}

TEST_CASE("rescale with nucleon mass reproduces the astronomical scales") {
  const auto one = nlohmann::json::parse(cli({"rescale", "--in", ground_json()}).out);
  const double a1 = one["bohr_radius_m"].get<double>();
  CHECK(a1 == doctest::Approx(3.5608e22).epsilon(1e-3));
  const double half = one["half_max_radius_m"].get<double>();
  CHECK(half / 1e23 < 3.0);
  CHECK(half / 1e23 > 1.0 / 3.0);

  const auto many = nlohmann::json::parse(cli({"rescale", "--in", ground_json(), "--n-particles", "1e23"}).out);
  const double scale = 10.0 * many["bohr_radius_m"].get<double>();
  CHECK(scale >= 0.3);
  CHECK(scale <= 10.0);
}

TEST_CASE("rescale rejects malformed input") {
  std::ofstream(path("bad.json")) << "{\"n\": 0}";
  CHECK(cli({"rescale", "--in", path("bad.json")}).code == exit_code::usage);
  CHECK(cli({"rescale", "--in", path("missing.json")}).code == exit_code::usage);
  CHECK(cli({"rescale"}).code == exit_code::usage);
}

TEST_CASE("evolve free gaussian follows the dispersion law") {
  const auto r = cli({"evolve", "--free", "--gaussian-sigma", "1", "--observe-every", "20"});
  REQUIRE(r.code == 0);
  const auto t = read_csv(r.out);
  CHECK(t.header == "t,norm,energy,rms_width");
  double worst = 0.0;
  for (const auto& row : t.rows) {
    worst = std::max(worst, std::abs(row[3] / free_gaussian_rms_width(1.0, 1.0, 1.0, row[0]) - 1.0));
  }
  CHECK(worst <= 1e-3);
}

TEST_CASE("evolve cubic with zero coupling matches free output") {
  const auto a = cli({"evolve", "--free", "--gaussian-sigma", "1", "--steps", "100", "--points", "2001"});
  const auto b = cli({"evolve", "--cubic", "--kappa", "0", "--sign", "1", "--gaussian-sigma", "1", "--steps", "100",
                      "--points", "2001"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("evolve gravity from a solved state keeps the norm") {
  const auto r = cli({"evolve", "--gravity", "--from", ground_json(), "--steps", "200", "--observe-every", "20",
                      "--snapshot-every", "100", "--snapshot-prefix", path("snap"), "--out-csv",
                      path("grav.csv")});
  REQUIRE(r.code == 0);
  const auto norms = read_csv(slurp(path("grav.csv"))).column(1);
  for (double n : norms) CHECK(std::abs(n / norms.front() - 1.0) <= 1e-8);
  CHECK(fs::exists(path("snap_0000.csv")));
  CHECK(fs::exists(path("snap_0002.csv")));
  CHECK(read_csv(slurp(path("snap_0001.csv"))).header == "r,density");
}

TEST_CASE("evolve argument errors") {
  CHECK(cli({"evolve", "--gaussian-sigma", "1"}).code == exit_code::usage);
  CHECK(cli({"evolve", "--free", "--cubic", "--gaussian-sigma", "1"}).code == exit_code::usage);
  CHECK(cli({"evolve", "--cubic", "--gaussian-sigma", "1"}).code == exit_code::usage);
  CHECK(cli({"evolve", "--free"}).code == exit_code::usage);
}

TEST_CASE("evolve reports rejected steps") {
  const auto r = cli({"evolve", "--cubic", "--kappa", "200", "--sign", "-1", "--gaussian-sigma", "1", "--points",
                      "1201", "--dt", "5", "--steps", "2", "--out-csv", path("rejected.csv")});
  CHECK(r.code == exit_code::step_rejected);
  CHECK(r.err.find("dt") != std::string::npos);
  CHECK_FALSE(fs::exists(path("rejected.csv")));
}

TEST_CASE("check suites") {
  const auto r = cli({"check", "--suites", "poisson"});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(cli({"check", "--suites", "poisson,nonsense"}).code == exit_code::usage);
}

TEST_CASE("usage errors") {
  CHECK(cli({}).code == exit_code::usage);
  CHECK(cli({"frobnicate"}).code == exit_code::usage);
  CHECK(cli({"solve", "--n", "abc"}).code == exit_code::usage);
  CHECK(cli({"solve", "--n", "-1"}).code == exit_code::usage);
  CHECK(cli({"solve", "--help"}).code == exit_code::ok);
  CHECK(cli({"--version"}).out.find(kVersion) != std::string::npos);
}

TEST_CASE("no bracket on a grid too small to hold the state") {
  CHECK(cli({"solve", "--n", "4", "--rho-max", "5", "--points", "501"}).code == exit_code::no_bracket);
}

TEST_CASE("installed binary exit codes") {
  const std::string bin = SNG_CLI_PATH;
  CHECK(WEXITSTATUS(std::system((bin + " check --suites bogus > /dev/null 2>&1").c_str())) == exit_code::usage);
  CHECK(WEXITSTATUS(std::system((bin + " --version > /dev/null 2>&1").c_str())) == 0);
}
