#include "sng/checks.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "sng/evolve.hpp"
#include "sng/physical.hpp"
#include "sng/scf_oracle.hpp"
#include "sng/universal.hpp"

namespace sng {

namespace {

constexpr double kPi = std::numbers::pi;

CheckResult at_most(const std::string& suite, const std::string& name, double value, double threshold) {
  return {suite, name, value, threshold, std::isfinite(value) && value <= threshold};
}

RadialGrid default_grid() { return make_grid(kDefaultRhoMax, kDefaultPoints); }

double max_drift(const std::vector<double>& v) {
  double d = 0.0;
  for (double x : v) d = std::max(d, std::abs(x / v.front() - 1.0));
  return d;
}

std::vector<CheckResult> virial_suite() {
  std::vector<CheckResult> out;
  const auto grid = default_grid();
  for (int n = 0; n <= 2; ++n) {
    const auto sol = solve_state(n, grid);
    const auto profile = rescale_to_physical(sol, PhysicalParams::natural());
    const auto e = energy_breakdown(profile);
    const std::string tag = "n=" + std::to_string(n);
    out.push_back(at_most("virial", tag + " |2K/|W| - 1|",
                          std::abs(2.0 * e.e_kinetic / std::abs(e.e_gravity) - 1.0), 1e-3));
    out.push_back(at_most("virial", tag + " epsilon vs shooting",
                          std::abs(e.epsilon / profile.epsilon_from_shooting - 1.0), 1e-3));
    out.push_back(at_most("virial", tag + " epsilon vs -3K",
                          std::abs(e.epsilon / (-3.0 * e.e_kinetic) - 1.0), 1e-3));
  }
  return out;
}

std::vector<CheckResult> homogeneity_suite() {
  std::vector<CheckResult> out;
  const auto params = PhysicalParams::natural();
  const auto grid = make_grid(30.0, 3001);
  std::vector<std::pair<std::string, RadialState>> states;
  states.emplace_back("gaussian", gaussian_state(grid, 1.5, 1.0, 1.0));
  {
    const auto sol = solve_state(0, default_grid());
    states.emplace_back("ground state", state_from_profile(rescale_to_physical(sol, params)));
  }
  {
    // Complex, unnormalized packet with a radial phase gradient.
    std::vector<std::complex<double>> psi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r = grid.node(i);
      psi[i] = 3.0 * std::exp(-r * r / 8.0) * std::polar(1.0, 0.7 * r) * (1.0 + 0.2 * r);
    }
    RadialState s = state_from_psi(grid, psi, 1.0, 1.0);
    s.u.back() = 0.0;
    states.emplace_back("complex packet", s);
  }
  for (const auto& [name, s] : states) {
    const double h1 = hamiltonian_functional(s, params);
    for (double lambda : {0.1, 2.5, 10.0}) {
      RadialState scaled = s;
      for (auto& x : scaled.u) x *= lambda;
      const double hl = hamiltonian_functional(scaled, params);
      out.push_back(at_most("homogeneity", name + " lambda=" + std::to_string(lambda).substr(0, 4),
                            std::abs(hl / (lambda * lambda * h1) - 1.0), 1e-12));
    }
  }
  return out;
}

std::vector<CheckResult> poisson_suite() {
  std::vector<CheckResult> out;
  const double radius = 1.0;
  const double rho0 = 1.0;
  const auto grid = make_grid(2.0 * radius, 4001);
  std::vector<double> d(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.node(i);
    d[i] = r < radius ? rho0 : (r == radius ? 0.5 * rho0 : 0.0);
  }
  const auto phi = solve_radial_poisson(RealField(grid, d), 4.0 * kPi);
  const double mass = 4.0 / 3.0 * kPi * radius * radius * radius * rho0;
  double inside = 0.0, outside = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.node(i);
    if (r <= radius) {
      const double exact = -2.0 * kPi * rho0 * (radius * radius - r * r / 3.0);
      inside = std::max(inside, std::abs(phi[i] / exact - 1.0));
    } else {
      outside = std::max(outside, std::abs(phi[i] / (-mass / r) - 1.0));
    }
  }
  out.push_back(at_most("poisson", "uniform ball interior", inside, 1e-4));
  out.push_back(at_most("poisson", "uniform ball exterior -GM/r", outside, 1e-4));
  return out;
}

std::vector<CheckResult> oracle_suite() {
  std::vector<CheckResult> out;
  const auto grid = default_grid();
  for (int n = 0; n <= 1; ++n) {
    const double tol = n == 0 ? 1e-4 : 1e-3;
    const auto sol = solve_state(n, grid);
    const auto profile = rescale_to_physical(sol, PhysicalParams::natural());
    const auto ref = scf_oracle(profile.f.grid, n);
    double diff = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < ref.psi.size(); ++i) {
      const double a = profile.f[i] * profile.f[i];
      diff = std::max(diff, std::abs(a - ref.psi[i] * ref.psi[i]));
      peak = std::max(peak, a);
    }
    const std::string tag = "n=" + std::to_string(n);
    out.push_back(at_most("oracle", tag + " gamma0", std::abs(sol.gamma0 / ref.gamma0() - 1.0), tol));
    out.push_back(at_most("oracle", tag + " density", diff / peak, tol));
    out.push_back({"oracle", tag + " SCF converged", ref.last_change, 1e-12, ref.converged});
  }
  return out;
}

std::vector<CheckResult> evolution_suite() {
  std::vector<CheckResult> out;
  const double sigma = 1.0;
  const auto grid = make_grid(60.0 * sigma, 6001);
  const auto packet = gaussian_state(grid, sigma, 1.0, 1.0);
  const double td = dispersion_time(sigma, 1.0, 1.0);
  const double dt = td / 200.0;

  const std::vector<std::pair<std::string, Nonlinearity>> modes = {
      {"free", FreeParticle{}},
      {"cubic+", CubicNonlinearity{1.0, 1}},
      {"cubic-", CubicNonlinearity{1.0, -1}}};
  for (const auto& [name, nl] : modes) {
    const auto series = evolve(packet, packet.time + 1000 * dt, dt, nl, 10);
    out.push_back(at_most("evolution", name + " norm drift", max_drift(series.norms), 1e-8));
    out.push_back(at_most("evolution", name + " energy drift", max_drift(series.energies), 1e-5));
    if (name == "free") {
      double worst = 0.0;
      for (std::size_t k = 0; k < series.times.size(); ++k) {
        const double exact = free_gaussian_rms_width(sigma, 1.0, 1.0, series.times[k] - packet.time);
        worst = std::max(worst, std::abs(series.widths[k] / exact - 1.0));
      }
      out.push_back(at_most("evolution", "free width vs dispersion law", worst, 1e-3));
    }
  }

  const auto params = PhysicalParams::natural();
  const auto profile = rescale_to_physical(solve_state(0, default_grid()), params);
  const auto e = energy_breakdown(profile);
  const auto ground = state_from_profile(profile);
  const double period = bound_period(e.e_single, params.hbar);
  const GravityNonlinearity gravity{params.G, params.mass, params.n_particles};
  const auto series = evolve(ground, ground.time + 1000 * period / 200.0, period / 200.0, gravity, 10, 200);
  out.push_back(at_most("evolution", "gravity norm drift", max_drift(series.norms), 1e-8));
  out.push_back(at_most("evolution", "gravity energy drift", max_drift(series.energies), 1e-5));
  const auto& first = series.snapshots.front().density.values;
  const auto& after = series.snapshots.at(1).density.values;
  double diff = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    diff = std::max(diff, std::abs(after[i] - first[i]));
    peak = std::max(peak, first[i]);
  }
  out.push_back(at_most("evolution", "ground state density after one period", diff / peak, 1e-3));
  return out;
}

std::vector<CheckResult> continuity_suite() {
  std::vector<CheckResult> out;
  const auto params = PhysicalParams::natural();
  const auto ground = state_from_profile(rescale_to_physical(solve_state(0, default_grid()), params));
  out.push_back(at_most("continuity", "real stationary profile", continuity_residual(ground, ground), 1e-6));

  std::vector<double> residuals;
  for (int k : {1, 2, 4}) {
    const auto grid = make_grid(60.0, 3000 * k + 1);
    const double td = dispersion_time(1.0, 1.0, 1.0);
    const double dt = td / (100.0 * k);
    const auto start = gaussian_state(grid, 1.0, 1.0, 1.0);
    const auto mid = evolve(start, 0.5 * td, dt, FreeParticle{}, 1 << 30).final_state;
    residuals.push_back(continuity_residual(mid, step(mid, dt, FreeParticle{})));
  }
  out.push_back(at_most("continuity", "dispersing gaussian, coarse", residuals[0], 1e-3));
  for (std::size_t k = 1; k < residuals.size(); ++k) {
    const double order = std::log2(residuals[k - 1] / residuals[k]);
    out.push_back({"continuity", "refinement order " + std::to_string(k), order, 1.8, order >= 1.8});
  }
  return out;
}

}  // namespace

const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> names = {"virial",    "homogeneity", "poisson",
                                                 "oracle",    "evolution",   "continuity"};
  return names;
}

std::vector<CheckResult> run_suite(const std::string& suite) {
  if (suite == "virial") return virial_suite();
  if (suite == "homogeneity") return homogeneity_suite();
  if (suite == "poisson") return poisson_suite();
  if (suite == "oracle") return oracle_suite();
  if (suite == "evolution") return evolution_suite();
  if (suite == "continuity") return continuity_suite();
  throw InvalidArgument("unknown check suite '" + suite + "'");
}

}  // namespace sng
