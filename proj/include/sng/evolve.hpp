#pragma once

// Crank-Nicolson evolution of the one-body nonlinear Schrodinger equation in
// spherical symmetry, on the reduced wavefunction u = r psi with u = 0 at
// both ends of the grid.

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sng/physical.hpp"
#include "sng/radial.hpp"
#include "sng/state.hpp"

namespace sng {

struct FreeParticle {};

/// V = sign * kappa * |psi|^2.
struct CubicNonlinearity {
  double kappa = 0.0;  // J m^3
  int sign = 1;
};

/// Hartree self-gravity: V = m Phi with lap Phi = 4 pi G N m |psi|^2 / norm.
struct GravityNonlinearity {
  double G = 1.0;
  double mass = 1.0;
  double n_particles = 1.0;
};

using Nonlinearity = std::variant<FreeParticle, CubicNonlinearity, GravityNonlinearity>;

void validate(const Nonlinearity& nl);

/// One predictor-corrector Crank-Nicolson step. Throws StepRejected when the
/// corrector potential moves by more than half of the predictor potential.
RadialState step(const RadialState& state, double dt, const Nonlinearity& nl);

/// Conserved energy of the flow generated by `nl`.
double total_energy(const RadialState& state, const Nonlinearity& nl);

/// sqrt(<r^2>) of |psi|^2.
double rms_width(const RadialState& state);

struct Snapshot {
  double time;
  RealField density;  // |psi|^2 / norm
};

struct ObservableSeries {
  std::vector<double> times;
  std::vector<double> norms;
  std::vector<double> energies;
  std::vector<double> widths;
  std::vector<Snapshot> snapshots;
  std::vector<std::string> warnings;
  RadialState final_state;
};

/// Repeats `step` until t_final. If (t_final - t0) is not a multiple of dt the
/// step is shortened uniformly. Observations are taken at t0, every
/// `observe_every` steps and at the end.
ObservableSeries evolve(const RadialState& state, double t_final, double dt, const Nonlinearity& nl,
                        int observe_every = 1, std::optional<int> snapshot_every = std::nullopt);

/// L-infinity norm of 4 pi r^2 (d rho/dt + div j) over one step, with rho and j
/// evaluated at the time midpoint by centred differences.
double continuity_residual(const RadialState& before, const RadialState& after);

/// psi = exp(-r^2 / (4 sigma^2)) normalized; sigma is the per-axis standard
/// deviation of |psi|^2.
RadialState gaussian_state(const RadialGrid& grid, double sigma, double mass, double hbar);

RadialState state_from_profile(const PhysicalProfile& profile);

/// 2 m sigma^2 / hbar.
double dispersion_time(double sigma, double mass, double hbar);

/// 2 pi hbar / |E|.
double bound_period(double e_single, double hbar);

/// sqrt(3) sigma sqrt(1 + (t / t_d)^2) for the free packet of `gaussian_state`.
double free_gaussian_rms_width(double sigma, double mass, double hbar, double t);

}  // namespace sng
