#include "sng/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace sng {

using cplx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

PhysicalParams gravity_params(const GravityNonlinearity& g, double hbar) {
  return PhysicalParams{g.mass, g.n_particles, hbar, g.G};
}

double discrete_norm(const RadialGrid& grid, std::span<const cplx> u) {
  std::vector<double> a(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) a[i] = std::norm(u[i]);
  return 4.0 * kPi * integrate(grid, a);
}

// Potential energy per particle on every node (boundary nodes unused).
std::vector<double> potential(const RadialGrid& grid, std::span<const cplx> u, double hbar,
                              const Nonlinearity& nl) {
  const std::size_t n = grid.size();
  std::vector<double> v(n, 0.0);
  if (const auto* c = std::get_if<CubicNonlinearity>(&nl)) {
    for (std::size_t i = 1; i < n; ++i) {
      v[i] = c->sign * c->kappa * std::norm(u[i] / grid.node(i));
    }
  } else if (const auto* g = std::get_if<GravityNonlinearity>(&nl)) {
    const double norm = discrete_norm(grid, u);
    const RealField phi = hartree_potential(grid, u, gravity_params(*g, hbar), norm);
    for (std::size_t i = 0; i < n; ++i) v[i] = g->mass * phi[i];
  }
  return v;
}

// Solves (1 + i dt H / 2 hbar) x = (1 - i dt H / 2 hbar) u on the interior
// nodes, H = -(hbar^2 / 2m) d^2/dr^2 + V, Dirichlet ends.
std::vector<cplx> crank_nicolson(const RadialGrid& grid, std::span<const cplx> u,
                                 std::span<const double> v, double dt, double mass, double hbar) {
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  const double t = hbar * hbar / (2.0 * mass * h * h);
  const cplx a(0.0, dt / (2.0 * hbar));

  const cplx off = a * (-t);
  std::vector<cplx> rhs(n, cplx{}), diag(n, cplx{});
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hd = 2.0 * t + v[i];
    rhs[i] = u[i] - a * (hd * u[i] - t * (u[i - 1] + u[i + 1]));
    diag[i] = 1.0 + a * hd;
  }

  // Thomas algorithm; the off-diagonal is constant.
  std::vector<cplx> c_prime(n, cplx{}), d_prime(n, cplx{});
  c_prime[1] = off / diag[1];
  d_prime[1] = rhs[1] / diag[1];
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const cplx denom = diag[i] - off * c_prime[i - 1];
    c_prime[i] = off / denom;
    d_prime[i] = (rhs[i] - off * d_prime[i - 1]) / denom;
  }
  std::vector<cplx> x(n, cplx{});
  x[n - 2] = d_prime[n - 2];
  for (std::size_t i = n - 2; i-- > 1;) x[i] = d_prime[i] - c_prime[i] * x[i + 1];
  return x;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

void validate(const Nonlinearity& nl) {
  if (const auto* c = std::get_if<CubicNonlinearity>(&nl)) {
    if (!(c->kappa >= 0.0) || !std::isfinite(c->kappa)) throw InvalidArgument("kappa must be >= 0");
    if (c->sign != 1 && c->sign != -1) throw InvalidArgument("cubic sign must be +1 or -1");
  } else if (const auto* g = std::get_if<GravityNonlinearity>(&nl)) {
    gravity_params(*g, 1.0).validate();
  }
}

RadialState step(const RadialState& state, double dt, const Nonlinearity& nl) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("time step must be positive");
  state.validate();
  validate(nl);
  const RadialGrid& grid = state.grid;
  const std::size_t n = grid.size();
  if (n < 4) throw InvalidArgument("evolution needs at least 4 grid points");

  const auto v0 = potential(grid, state.u, state.hbar, nl);
  const auto predicted = crank_nicolson(grid, state.u, v0, dt, state.mass, state.hbar);

  std::vector<cplx> mid(n);
  for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (state.u[i] + predicted[i]);
  const auto v1 = potential(grid, mid, state.hbar, nl);

  const double scale = max_abs(v0);
  if (scale > 0.0) {
    double change = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) change = std::max(change, std::abs(v1[i] - v0[i]));
    const double rel = change / scale;
    if (rel > 0.5) {
      const double suggested = dt * std::min(0.5, 0.25 / rel);
      throw StepRejected("corrector potential changed by " + std::to_string(100.0 * rel) +
                             "% within one step; try dt <= " + std::to_string(suggested),
                         suggested);
    }
  }

  RadialState next = state;
  next.u = crank_nicolson(grid, state.u, v1, dt, state.mass, state.hbar);
  next.time = state.time + dt;

  if (std::holds_alternative<GravityNonlinearity>(nl)) {
    // The Hamiltonian carries -E_gravity / norm with E_gravity itself scaled by
    // 1/norm; v1 already includes one factor.
    std::vector<double> pe(n);
    for (std::size_t i = 0; i < n; ++i) pe[i] = std::norm(mid[i]) * v1[i];
    const double norm = discrete_norm(grid, mid);
    const double offset = 0.5 * 4.0 * kPi * integrate(grid, pe) / norm;
    next.phase = state.phase + offset * dt / state.hbar;
  }
  return next;
}

double total_energy(const RadialState& state, const Nonlinearity& nl) {
  if (const auto* g = std::get_if<GravityNonlinearity>(&nl)) {
    return hamiltonian_functional(state, gravity_params(*g, state.hbar));
  }
  double e = kinetic_energy(state.grid, state.u, state.mass, state.hbar);
  if (const auto* c = std::get_if<CubicNonlinearity>(&nl)) {
    const std::size_t n = state.grid.size();
    std::vector<double> q(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
      const double r = state.grid.node(i);
      const double a = std::norm(state.u[i]);
      q[i] = a * a / (r * r);
    }
    e += 0.5 * c->sign * c->kappa * 4.0 * kPi * integrate(state.grid, q);
  }
  return e;
}

double rms_width(const RadialState& state) {
  const std::size_t n = state.grid.size();
  std::vector<double> a(n), ra(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = state.grid.node(i);
    a[i] = std::norm(state.u[i]);
    ra[i] = r * r * a[i];
  }
  return std::sqrt(integrate(state.grid, ra) / integrate(state.grid, a));
}

namespace {

RealField normalized_density(const RadialState& s) {
  auto rho = density_from_reduced(s.grid, s.u);
  const double norm = s.norm();
  for (double& x : rho) x /= norm;
  return RealField(s.grid, std::move(rho));
}

// Largest |psi| over the outer 1% of the grid relative to the peak.
double edge_amplitude(const RadialState& s) {
  const std::size_t n = s.grid.size();
  const auto rho = density_from_reduced(s.grid, s.u);
  const double peak = *std::max_element(rho.begin(), rho.end());
  const std::size_t start = n - std::max<std::size_t>(2, n / 100);
  double edge = 0.0;
  for (std::size_t i = start; i + 1 < n; ++i) edge = std::max(edge, rho[i]);
  return peak > 0.0 ? std::sqrt(edge / peak) : 0.0;
}

}  // namespace

ObservableSeries evolve(const RadialState& state, double t_final, double dt, const Nonlinearity& nl,
                        int observe_every, std::optional<int> snapshot_every) {
  state.validate();
  validate(nl);
  if (!(t_final > state.time)) throw InvalidArgument("t_final must exceed the state time");
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (observe_every < 1) throw InvalidArgument("observe_every must be >= 1");
  if (snapshot_every && *snapshot_every < 1) throw InvalidArgument("snapshot_every must be >= 1");

  const double span = t_final - state.time;
  auto steps = static_cast<long long>(std::ceil(span / dt - 1e-9));
  steps = std::max<long long>(steps, 1);
  const double h = span / static_cast<double>(steps);

  ObservableSeries out{{}, {}, {}, {}, {}, {}, state};
  bool warned = false;
  auto observe = [&](const RadialState& s) {
    out.times.push_back(s.time);
    out.norms.push_back(s.norm());
    out.energies.push_back(total_energy(s, nl));
    out.widths.push_back(rms_width(s));
    if (!warned && edge_amplitude(s) > 1e-8) {
      warned = true;
      out.warnings.push_back("|psi| near the outer boundary exceeds 1e-8 of its peak at t = " +
                             std::to_string(s.time) + "; enlarge the grid");
    }
  };

  RadialState current = state;
  observe(current);
  if (snapshot_every) out.snapshots.push_back({current.time, normalized_density(current)});
  for (long long k = 1; k <= steps; ++k) {
    current = step(current, h, nl);
    if (k == steps) current.time = t_final;
    if (k % observe_every == 0 || k == steps) observe(current);
    if (snapshot_every && (k % *snapshot_every == 0 || k == steps)) {
      out.snapshots.push_back({current.time, normalized_density(current)});
    }
  }
  out.final_state = std::move(current);
  return out;
}

double continuity_residual(const RadialState& before, const RadialState& after) {
  if (!(before.grid == after.grid)) throw InvalidArgument("continuity check needs matching grids");
  if (after.time < before.time) throw InvalidArgument("states are out of order in time");
  if (before.mass != after.mass || before.hbar != after.hbar) {
    throw InvalidArgument("states carry different mass or hbar");
  }
  const RadialGrid& grid = before.grid;
  const std::size_t n = grid.size();
  if (n < 5) throw InvalidArgument("continuity check needs at least 5 grid points");
  const double h = grid.spacing();
  const double dt = after.time - before.time;

  // With u = r psi:  r^2 (d|psi|^2/dt + div j) = d|u|^2/dt + d/dr [(hbar/m) Im(u* u')].
  std::vector<cplx> mid(n);
  for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (before.u[i] + after.u[i]);
  std::vector<double> flux(n, 0.0);
  const double coef = before.hbar / before.mass;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const cplx du = (mid[i + 1] - mid[i - 1]) / (2.0 * h);
    flux[i] = coef * std::imag(std::conj(mid[i]) * du);
  }
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double ddt = dt > 0.0 ? (std::norm(after.u[i]) - std::norm(before.u[i])) / dt : 0.0;
    const double div = (flux[i + 1] - flux[i - 1]) / (2.0 * h);
    worst = std::max(worst, 4.0 * kPi * std::abs(ddt + div));
  }
  return worst;
}

RadialState gaussian_state(const RadialGrid& grid, double sigma, double mass, double hbar) {
  if (!(sigma > 0.0)) throw InvalidArgument("gaussian width must be positive");
  const std::size_t n = grid.size();
  const double amp = std::pow(2.0 * kPi * sigma * sigma, -0.75);
  std::vector<double> psi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid.node(i);
    psi[i] = amp * std::exp(-r * r / (4.0 * sigma * sigma));
  }
  RadialState s = state_from_psi(grid, psi, mass, hbar);
  s.u.back() = 0.0;
  return s;
}

RadialState state_from_profile(const PhysicalProfile& profile) {
  RadialState s =
      state_from_psi(profile.f.grid, profile.f.values, profile.params.mass, profile.params.hbar);
  s.u.back() = 0.0;
  return s;
}

double dispersion_time(double sigma, double mass, double hbar) { return 2.0 * mass * sigma * sigma / hbar; }

double bound_period(double e_single, double hbar) { return 2.0 * kPi * hbar / std::abs(e_single); }

double free_gaussian_rms_width(double sigma, double mass, double hbar, double t) {
  const double x = t / dispersion_time(sigma, mass, hbar);
  return std::sqrt(3.0) * sigma * std::sqrt(1.0 + x * x);
}

}  // namespace sng
