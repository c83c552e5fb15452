#include "sng/physical.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace sng {

namespace {
constexpr double kPi = std::numbers::pi;
}

void PhysicalParams::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument(std::string(name) + " must be positive and finite");
    }
  };
  check(mass, "particle mass");
  check(n_particles, "particle number");
  check(hbar, "hbar");
  check(G, "G");
}

double gravitational_bohr_radius(const PhysicalParams& params) {
  params.validate();
  const double m = params.mass;
  return params.hbar * params.hbar / (params.G * params.n_particles * m * m * m);
}

double potential_energy_scale(double gamma1, const PhysicalParams& params) {
  const double a_g = gravitational_bohr_radius(params);
  return 2.0 / (gamma1 * gamma1) * params.hbar * params.hbar / (params.mass * a_g * a_g);
}

// ---------------------------------------------------------------------------
// RadialState

void RadialState::validate() const {
  if (u.size() != grid.size()) throw InvalidField("state size does not match its grid");
  if (u.front() != std::complex<double>{}) throw InvalidArgument("u(0) must vanish");
  if (!all_finite(u)) throw InvalidField("state contains non-finite samples");
  if (!(mass > 0.0) || !(hbar > 0.0)) throw InvalidArgument("mass and hbar must be positive");
}

double RadialState::norm() const {
  std::vector<double> a(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) a[i] = std::norm(u[i]);
  return 4.0 * kPi * integrate(grid, a);
}

std::vector<std::complex<double>> RadialState::u_with_phase() const {
  const std::complex<double> rot = std::polar(1.0, phase);
  std::vector<std::complex<double>> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = rot * u[i];
  return out;
}

RadialState state_from_psi(const RadialGrid& grid, std::span<const std::complex<double>> psi,
                           double mass, double hbar, double time) {
  if (psi.size() != grid.size()) throw InvalidField("psi size does not match grid");
  std::vector<std::complex<double>> u(psi.size());
  for (std::size_t i = 1; i < psi.size(); ++i) u[i] = grid.node(i) * psi[i];
  RadialState s{grid, std::move(u), mass, hbar, time, 0.0};
  s.validate();
  return s;
}

RadialState state_from_psi(const RadialGrid& grid, std::span<const double> psi, double mass,
                           double hbar, double time) {
  std::vector<std::complex<double>> c(psi.begin(), psi.end());
  return state_from_psi(grid, c, mass, hbar, time);
}

// ---------------------------------------------------------------------------
// Functionals

std::vector<double> density_from_reduced(const RadialGrid& grid,
                                         std::span<const std::complex<double>> u) {
  const std::size_t n = grid.size();
  std::vector<double> rho(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) rho[i] = std::norm(u[i] / grid.node(i));
  const std::complex<double> psi0 = (4.0 * u[1] / grid.node(1) - u[2] / grid.node(2)) / 3.0;
  rho[0] = std::norm(psi0);
  return rho;
}

RealField hartree_potential(const RadialGrid& grid, std::span<const std::complex<double>> u,
                            const PhysicalParams& params, double norm) {
  auto rho = density_from_reduced(grid, u);
  const double scale = params.n_particles * params.mass / norm;
  for (double& x : rho) x *= scale;
  return solve_radial_poisson(RealField(grid, std::move(rho)), 4.0 * kPi * params.G);
}

double kinetic_energy(const RadialGrid& grid, std::span<const std::complex<double>> u, double mass,
                      double hbar) {
  const std::size_t n = grid.size();
  std::vector<double> re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    re[i] = u[i].real();
    im[i] = u[i].imag();
  }
  const auto dre = derivative(grid, re);
  const auto dim = derivative(grid, im);
  std::vector<double> grad2(n);
  for (std::size_t i = 0; i < n; ++i) grad2[i] = dre[i] * dre[i] + dim[i] * dim[i];
  return hbar * hbar / (2.0 * mass) * 4.0 * kPi * integrate(grid, grad2);
}

FunctionalParts functional_parts(const RadialGrid& grid, std::span<const std::complex<double>> u,
                                 const PhysicalParams& params) {
  params.validate();
  const std::size_t n = grid.size();
  if (u.size() != n) throw InvalidField("state size does not match grid");
  if (!all_finite(u)) throw InvalidField("state contains non-finite samples");

  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = std::norm(u[i]);
  const double norm = 4.0 * kPi * integrate(grid, a);

  const double kinetic = kinetic_energy(grid, u, params.mass, params.hbar);

  // Unnormalized source: the 1/norm belongs to the caller.
  const RealField phi = hartree_potential(grid, u, params, 1.0);
  std::vector<double> pe(n);
  for (std::size_t i = 0; i < n; ++i) pe[i] = a[i] * params.mass * phi[i];
  const double self_energy = 0.5 * 4.0 * kPi * integrate(grid, pe);

  return {norm, kinetic, self_energy};
}

double hamiltonian_functional(const RadialState& state, const PhysicalParams& params) {
  state.validate();
  const auto parts = functional_parts(state.grid, state.u, params);
  if (!(parts.norm > 0.0)) throw InvalidArgument("hamiltonian of a zero-norm state");
  return parts.kinetic + parts.self_energy / parts.norm;
}

// ---------------------------------------------------------------------------
// Rescaling

PhysicalProfile rescale_to_physical(const UniversalSolution& sol, const PhysicalParams& params) {
  params.validate();
  if (sol.node_count != sol.n || !(sol.gamma1 > 0.0) || !std::isfinite(sol.epsilon_star) ||
      !all_finite(sol.f_star.values) || !all_finite(sol.g_star.values)) {
    throw InvalidArgument("rescale requires a converged universal solution");
  }

  const double a_g = gravitational_bohr_radius(params);
  const double g1 = sol.gamma1;
  const double length = 0.5 * g1 * a_g;
  const RadialGrid grid = sol.grid.scaled(length);
  const std::size_t n = grid.size();

  const double amplitude = std::sqrt(2.0) / (std::sqrt(kPi) * g1 * g1 * std::pow(a_g, 1.5));
  std::vector<double> f(n), f2(n);
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = amplitude * sol.f_star[i];
    f2[i] = f[i] * f[i];
  }
  const double printed_norm = 4.0 * kPi * integrate_radial(grid, f2);
  const bool renormalized = std::abs(printed_norm - 1.0) > 1e-3;
  const double fix = 1.0 / std::sqrt(printed_norm);
  for (std::size_t i = 0; i < n; ++i) {
    f[i] *= fix;
    f2[i] = f[i] * f[i];
  }
  const double norm = 4.0 * kPi * integrate_radial(grid, f2);

  const double scale = potential_energy_scale(g1, params);
  const double per_mass = scale / params.mass;
  std::vector<double> phi(n);
  for (std::size_t i = 0; i < n; ++i) phi[i] = per_mass * (sol.g_star[i] + sol.epsilon_star);
  // Beyond the grid only the monopole survives: phi(R) = -G N m / R.
  const double r_edge = grid.rho_max();
  const double edge_target = -params.G * params.n_particles * params.mass * norm / r_edge;
  const double shift = phi.back() - edge_target;
  for (double& p : phi) p -= shift;

  return PhysicalProfile{RealField(grid, std::move(f)),
                         RealField(grid, std::move(phi)),
                         params,
                         a_g,
                         norm,
                         printed_norm,
                         renormalized,
                         shift,
                         scale * sol.epsilon_star,
                         sol.n};
}

EnergyBreakdown energy_breakdown(const PhysicalProfile& profile) {
  const RadialGrid& grid = profile.f.grid;
  const std::size_t n = grid.size();
  std::vector<std::complex<double>> u(n);
  for (std::size_t i = 1; i < n; ++i) u[i] = grid.node(i) * profile.f[i];
  const auto parts = functional_parts(grid, u, profile.params);
  if (std::abs(parts.norm - 1.0) > 1e-6) {
    throw InvalidArgument("energy breakdown requires a normalized profile, norm = " +
                          std::to_string(parts.norm));
  }
  EnergyBreakdown e{};
  e.e_kinetic = parts.kinetic;
  e.e_gravity = parts.self_energy;
  e.e_total = e.e_kinetic + e.e_gravity;
  e.epsilon = 1.5 * e.e_gravity;
  e.e_single = e.epsilon / 3.0;
  return e;
}

double half_max_radius(const RealField& f) {
  const double half = 0.5 * f[0];
  for (std::size_t i = 1; i < f.size(); ++i) {
    if (f[i] <= half) {
      const double r0 = f.grid.node(i - 1);
      const double r1 = f.grid.node(i);
      const double t = (f[i - 1] - half) / (f[i - 1] - f[i]);
      return r0 + t * (r1 - r0);
    }
  }
  return f.grid.rho_max();
}

double rms_radius(const RealField& f) {
  const std::size_t n = f.size();
  std::vector<double> f2(n), r2f2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = f.grid.node(i);
    f2[i] = f[i] * f[i];
    r2f2[i] = r * r * f2[i];
  }
  return std::sqrt(integrate_radial(f.grid, r2f2) / integrate_radial(f.grid, f2));
}

}  // namespace sng
