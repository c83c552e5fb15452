#include "sng/commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "sng/checks.hpp"
#include "sng/evolve.hpp"
#include "sng/physical.hpp"
#include "sng/universal.hpp"

namespace sng {

namespace {

using ojson = nlohmann::ordered_json;

/// Bad input files or inconsistent options; maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

unsigned worker_count() {
  if (const char* env = std::getenv("SNG_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

// Output files are collected and written only once a command has succeeded.
struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;

  void add(const std::string& path, std::string content) {
    if (!path.empty()) files.emplace_back(path, std::move(content));
  }
  void flush() const {
    for (const auto& [path, content] : files) {
      std::ofstream os(path, std::ios::binary);
      if (!os) throw UsageError("cannot write " + path);
      os << content;
      if (!os) throw UsageError("failed writing " + path);
    }
  }
};

std::string universal_csv(const UniversalSolution& sol) {
  std::string s = "rho,f_star,g_star\n";
  for (std::size_t i = 0; i < sol.grid.size(); ++i) {
    s += num(sol.grid.node(i)) + "," + num(sol.f_star[i]) + "," + num(sol.g_star[i]) + "\n";
  }
  return s;
}

ojson solution_summary(const UniversalSolution& sol, double tol) {
  ojson j;
  j["n"] = sol.n;
  j["gamma0"] = sol.gamma0;
  j["gamma1"] = sol.gamma1;
  j["epsilon_star"] = sol.epsilon_star;
  j["node_count"] = sol.node_count;
  j["bracket_width"] = sol.bracket_width;
  j["grid"] = {{"rho_max", sol.grid.rho_max()}, {"points", sol.grid.size()}};
  j["generated_by"] = kVersion;
  j["x_tol"] = tol;
  j["x_clamp_radius"] = sol.clamp_radius;
  return j;
}

struct SolveInput {
  int n;
  double gamma0;
  double bracket_width;
  double rho_max;
  long long points;
  double tol;
};

SolveInput read_solve_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read " + path);
  ojson j;
  try {
    j = ojson::parse(is);
    SolveInput in{};
    in.n = j.at("n").get<int>();
    in.gamma0 = j.at("gamma0").get<double>();
    in.bracket_width = j.at("bracket_width").get<double>();
    in.rho_max = j.at("grid").at("rho_max").get<double>();
    in.points = j.at("grid").at("points").get<long long>();
    in.tol = j.contains("x_tol") ? j.at("x_tol").get<double>() : kDefaultTol;
    return in;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path + " is not a solve summary: " + e.what());
  }
}

// Re-solves the state recorded in a solve summary and checks it reproduces.
UniversalSolution resolve(const SolveInput& in) {
  const auto sol = solve_state(in.n, make_grid(in.rho_max, in.points), in.tol, kDefaultCap, worker_count());
  const double slack = std::max(in.bracket_width, in.tol);
  if (std::abs(sol.gamma0 - in.gamma0) > slack) {
    throw UsageError("recorded gamma0 " + num(in.gamma0) + " does not match the re-solved state " +
                     num(sol.gamma0));
  }
  return sol;
}

PhysicalParams params_from(bool natural, double mass, double n_particles) {
  if (natural) return PhysicalParams::natural();
  PhysicalParams p{mass, n_particles, si::hbar, si::G};
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------

struct SolveOpts {
  int n = 0;
  double rho_max = kDefaultRhoMax;
  long long points = kDefaultPoints;
  double tol = kDefaultTol;
  std::string out_json;
  std::string out_csv;
};

int cmd_solve(const SolveOpts& o, std::ostream& out) {
  if (o.n < 0) throw InvalidArgument("--n must be non-negative");
  const auto sol = solve_state(o.n, make_grid(o.rho_max, o.points), o.tol, kDefaultCap, worker_count());
  const auto summary = solution_summary(sol, o.tol).dump(2) + "\n";
  Outputs files;
  files.add(o.out_json, summary);
  files.add(o.out_csv, universal_csv(sol));
  files.flush();
  if (o.out_json.empty()) out << summary;
  return exit_code::ok;
}

struct SpectrumOpts {
  int n_max = 4;
  double rho_max = kDefaultRhoMax;
  long long points = kDefaultPoints;
  double tol = kDefaultTol;
  std::string out_json;
  std::string csv_prefix;
};

int cmd_spectrum(const SpectrumOpts& o, std::ostream& out) {
  if (o.n_max < 0) throw InvalidArgument("--n-max must be non-negative");
  const auto grid = make_grid(o.rho_max, o.points);
  const unsigned threads = worker_count();
  const auto brackets = scan_brackets({-2.0, 0.0}, 801, grid, kDefaultCap, threads);

  const auto count = static_cast<std::size_t>(o.n_max) + 1;
  std::vector<std::optional<UniversalSolution>> sols(count);
  std::vector<std::exception_ptr> errors(count);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t k = first; k < count; k += stride) {
      try {
        const int n = static_cast<int>(k);
        const auto bracket = find_bracket(brackets, n);
        if (!bracket) throw InvalidBracket("no gamma0 bracket found for state " + std::to_string(n));
        sols[k] = shoot_gamma0(n, *bracket, grid, o.tol);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(threads, count);
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ojson arr = ojson::array();
  Outputs files;
  for (std::size_t k = 0; k < count; ++k) {
    if (k > 0 && !(sols[k]->gamma0 < sols[k - 1]->gamma0)) {
      throw WrongState("gamma0 is not strictly decreasing between n=" + std::to_string(k - 1) +
                       " and n=" + std::to_string(k));
    }
    arr.push_back(solution_summary(*sols[k], o.tol));
    if (!o.csv_prefix.empty()) {
      files.add(o.csv_prefix + "_n" + std::to_string(k) + ".csv", universal_csv(*sols[k]));
    }
  }
  const auto text = arr.dump(2) + "\n";
  files.add(o.out_json, text);
  files.flush();
  if (o.out_json.empty()) out << text;
  return exit_code::ok;
}

struct RescaleOpts {
  std::string in_json;
  double mass = si::proton_mass;
  double n_particles = 1.0;
  bool natural = false;
  std::string out_json;
  std::string out_csv;
};

int cmd_rescale(const RescaleOpts& o, std::ostream& out) {
  const auto input = read_solve_json(o.in_json);
  const auto params = params_from(o.natural, o.mass, o.n_particles);
  const auto sol = resolve(input);
  const auto profile = rescale_to_physical(sol, params);
  const auto e = energy_breakdown(profile);

  ojson j;
  j["bohr_radius_m"] = profile.bohr_radius;
  j["half_max_radius_m"] = half_max_radius(profile.f);
  j["rms_radius_m"] = rms_radius(profile.f);
  j["e_kinetic_J"] = e.e_kinetic;
  j["e_gravity_J"] = e.e_gravity;
  j["e_total_J"] = e.e_total;
  j["epsilon_J"] = e.epsilon;
  j["e_single_J"] = e.e_single;
  j["virial_residual"] = 2.0 * e.e_kinetic / std::abs(e.e_gravity) - 1.0;
  j["renormalized"] = profile.renormalized;
  j["generated_by"] = kVersion;
  j["x_n"] = profile.n;
  j["x_printed_norm"] = profile.printed_norm;
  j["x_phi_shift"] = profile.phi_shift;
  j["x_epsilon_from_shooting_J"] = profile.epsilon_from_shooting;
  j["x_mass_kg"] = params.mass;
  j["x_n_particles"] = params.n_particles;

  std::string csv = "r_m,f,phi\n";
  for (std::size_t i = 0; i < profile.f.size(); ++i) {
    csv += num(profile.f.grid.node(i)) + "," + num(profile.f[i]) + "," + num(profile.phi[i]) + "\n";
  }
  const auto text = j.dump(2) + "\n";
  Outputs files;
  files.add(o.out_json, text);
  files.add(o.out_csv, csv);
  files.flush();
  if (o.out_json.empty()) out << text;
  return exit_code::ok;
}

struct EvolveOpts {
  bool free = false;
  bool cubic = false;
  bool gravity = false;
  std::optional<double> kappa;
  std::optional<int> sign;
  std::optional<double> gaussian_sigma;
  std::string from;
  std::optional<double> r_max;
  long long points = 6001;
  bool natural = true;
  std::optional<double> mass;
  double n_particles = 1.0;
  std::optional<double> dt;
  long long steps = 1000;
  int observe_every = 1;
  std::optional<int> snapshot_every;
  std::string snapshot_prefix = "snapshot";
  std::string out_csv;
};

int cmd_evolve(const EvolveOpts& o, std::ostream& out, std::ostream& err) {
  if (int(o.free) + int(o.cubic) + int(o.gravity) != 1) {
    throw InvalidArgument("choose exactly one of --free, --cubic, --gravity");
  }
  if (o.cubic && (!o.kappa || !o.sign)) throw InvalidArgument("--cubic requires --kappa and --sign");
  if (o.gaussian_sigma.has_value() == !o.from.empty()) {
    throw InvalidArgument("choose exactly one of --gaussian-sigma, --from");
  }
  if (o.steps < 1) throw InvalidArgument("--steps must be >= 1");

  PhysicalParams params = PhysicalParams::natural();
  if (o.mass) params = params_from(false, *o.mass, o.n_particles);

  std::optional<RadialState> initial;
  double default_dt = 0.0;
  if (o.gaussian_sigma) {
    const double sigma = *o.gaussian_sigma;
    if (!(sigma > 0.0)) throw InvalidArgument("--gaussian-sigma must be positive");
    const auto grid = make_grid(o.r_max.value_or(60.0 * sigma), o.points);
    initial = gaussian_state(grid, sigma, params.mass, params.hbar);
    default_dt = dispersion_time(sigma, params.mass, params.hbar) / 200.0;
  } else {
    const auto sol = resolve(read_solve_json(o.from));
    const auto profile = rescale_to_physical(sol, params);
    initial = state_from_profile(profile);
    default_dt = bound_period(energy_breakdown(profile).e_single, params.hbar) / 200.0;
  }

  Nonlinearity nl = FreeParticle{};
  if (o.cubic) nl = CubicNonlinearity{*o.kappa, *o.sign};
  if (o.gravity) nl = GravityNonlinearity{params.G, params.mass, params.n_particles};

  const double dt = o.dt.value_or(default_dt);
  if (!(dt > 0.0)) throw InvalidArgument("--dt must be positive");
  const auto series = evolve(*initial, initial->time + static_cast<double>(o.steps) * dt, dt, nl,
                             o.observe_every, o.snapshot_every);
  for (const auto& w : series.warnings) err << "warning: " << w << "\n";

  std::string csv = "t,norm,energy,rms_width\n";
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    csv += num(series.times[k]) + "," + num(series.norms[k]) + "," + num(series.energies[k]) + "," +
           num(series.widths[k]) + "\n";
  }
  Outputs files;
  for (std::size_t k = 0; k < series.snapshots.size(); ++k) {
    const auto& snap = series.snapshots[k];
    std::string s = "r,density\n";
    for (std::size_t i = 0; i < snap.density.size(); ++i) {
      s += num(snap.density.grid.node(i)) + "," + num(snap.density[i]) + "\n";
    }
    char name[32];
    std::snprintf(name, sizeof name, "_%04zu.csv", k);
    files.add(o.snapshot_prefix + name, std::move(s));
  }
  files.add(o.out_csv, csv);
  files.flush();
  if (o.out_csv.empty()) out << csv;
  return exit_code::ok;
}

int cmd_check(const std::vector<std::string>& suites, std::ostream& out) {
  for (const auto& s : suites) {
    if (std::find(known_suites().begin(), known_suites().end(), s) == known_suites().end()) {
      throw UsageError("unknown suite '" + s + "'");
    }
  }
  bool all = true;
  out << std::left << std::setw(12) << "suite" << std::setw(44) << "check" << std::setw(14) << "value"
      << std::setw(12) << "threshold" << "result\n";
  for (const auto& s : suites) {
    for (const auto& r : run_suite(s)) {
      all = all && r.passed;
      char value[32], thr[32];
      std::snprintf(value, sizeof value, "%.3e", r.value);
      std::snprintf(thr, sizeof thr, "%.1e", r.threshold);
      out << std::left << std::setw(12) << r.suite << std::setw(44) << r.name << std::setw(14) << value
          << std::setw(12) << thr << (r.passed ? "PASS" : "FAIL") << "\n";
    }
  }
  return all ? exit_code::ok : exit_code::check_failed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Schrodinger-Newton bound states, rescaling and evolution", "sng"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SolveOpts solve;
  auto* sub_solve = app.add_subcommand("solve", "Find the universal state with n nodes by shooting");
  sub_solve->add_option("--n", solve.n, "Principal quantum number (node count)")->capture_default_str();
  sub_solve->add_option("--rho-max", solve.rho_max, "Outer radius of the universal grid")->capture_default_str();
  sub_solve->add_option("--points", solve.points, "Number of grid points")->capture_default_str();
  sub_solve->add_option("--tol", solve.tol, "Bisection tolerance on gamma0")->capture_default_str();
  sub_solve->add_option("--out-json", solve.out_json, "Summary JSON (stdout when omitted)");
  sub_solve->add_option("--out-csv", solve.out_csv, "Profile CSV rho,f_star,g_star");

  SpectrumOpts spectrum;
  auto* sub_spec = app.add_subcommand("spectrum", "Solve states n = 0..n_max");
  sub_spec->add_option("--n-max", spectrum.n_max, "Highest state")->capture_default_str();
  sub_spec->add_option("--rho-max", spectrum.rho_max, "Outer radius of the universal grid")->capture_default_str();
  sub_spec->add_option("--points", spectrum.points, "Number of grid points")->capture_default_str();
  sub_spec->add_option("--tol", spectrum.tol, "Bisection tolerance on gamma0")->capture_default_str();
  sub_spec->add_option("--out-json", spectrum.out_json, "Summary JSON array (stdout when omitted)");
  sub_spec->add_option("--csv-prefix", spectrum.csv_prefix, "Write <prefix>_n<k>.csv profiles");

  RescaleOpts rescale;
  auto* sub_rescale = app.add_subcommand("rescale", "Rescale a solved state to physical units");
  sub_rescale->add_option("--in", rescale.in_json, "JSON written by `solve`")->required();
  sub_rescale->add_option("--mass-kg", rescale.mass, "Particle mass in kg")->capture_default_str();
  sub_rescale->add_option("--n-particles", rescale.n_particles, "Particle number N")->capture_default_str();
  sub_rescale->add_flag("--natural", rescale.natural, "Use hbar = G = m = N = 1");
  sub_rescale->add_option("--out-json", rescale.out_json, "Summary JSON (stdout when omitted)");
  sub_rescale->add_option("--out-csv", rescale.out_csv, "Profile CSV r_m,f,phi");

  EvolveOpts ev;
  auto* sub_ev = app.add_subcommand("evolve", "Crank-Nicolson evolution of a radial wave packet");
  sub_ev->add_flag("--free", ev.free, "No nonlinearity");
  sub_ev->add_flag("--cubic", ev.cubic, "Cubic nonlinearity sign * kappa * |psi|^2");
  sub_ev->add_flag("--gravity", ev.gravity, "Gravitational self-potential");
  sub_ev->add_option("--kappa", ev.kappa, "Cubic coupling (>= 0)");
  sub_ev->add_option("--sign", ev.sign, "Cubic sign, +1 or -1");
  sub_ev->add_option("--gaussian-sigma", ev.gaussian_sigma, "Start from a Gaussian of this width");
  sub_ev->add_option("--from", ev.from, "Start from the state in a `solve` JSON");
  sub_ev->add_option("--r-max", ev.r_max, "Outer radius for Gaussian starts (default 60 sigma)");
  sub_ev->add_option("--points", ev.points, "Grid points for Gaussian starts")->capture_default_str();
  sub_ev->add_option("--mass-kg", ev.mass, "Particle mass in kg (SI units; natural units otherwise)");
  sub_ev->add_option("--n-particles", ev.n_particles, "Particle number N")->capture_default_str();
  sub_ev->add_option("--dt", ev.dt, "Time step (default: period/200 or dispersion time/200)");
  sub_ev->add_option("--steps", ev.steps, "Number of steps")->capture_default_str();
  sub_ev->add_option("--observe-every", ev.observe_every, "Observation cadence in steps")->capture_default_str();
  sub_ev->add_option("--snapshot-every", ev.snapshot_every, "Density snapshot cadence in steps");
  sub_ev->add_option("--snapshot-prefix", ev.snapshot_prefix, "Snapshot files <prefix>_<k>.csv")->capture_default_str();
  sub_ev->add_option("--out-csv", ev.out_csv, "Observable CSV t,norm,energy,rms_width (stdout when omitted)");

  std::vector<std::string> suites = known_suites();
  auto* sub_check = app.add_subcommand("check", "Run verification suites");
  sub_check->add_option("--suites", suites, "Comma-separated subset of: virial, homogeneity, poisson, oracle, evolution, continuity")
      ->delimiter(',');

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("sng");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? exit_code::ok : exit_code::usage;
  }

  try {
    if (sub_solve->parsed()) return cmd_solve(solve, out);
    if (sub_spec->parsed()) return cmd_spectrum(spectrum, out);
    if (sub_rescale->parsed()) return cmd_rescale(rescale, out);
    if (sub_ev->parsed()) return cmd_evolve(ev, out, err);
    if (sub_check->parsed()) return cmd_check(suites, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    if (sub_check->parsed()) err << sub_check->help();
    return exit_code::usage;
  } catch (const InvalidBracket& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::no_bracket;
  } catch (const WrongState& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::not_converged;
  } catch (const StepRejected& e) {
    err << "error: " << e.what() << " (suggested dt " << num(e.suggested_dt()) << ")\n";
    return exit_code::step_rejected;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::not_converged;
  }
  return exit_code::usage;
}

}  // namespace sng
