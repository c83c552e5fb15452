#pragma once

// Rescaling of universal solutions to physical units and the one-particle
// energy functionals.

#include <complex>
#include <span>

#include "sng/radial.hpp"
#include "sng/state.hpp"
#include "sng/universal.hpp"

namespace sng {

namespace si {
inline constexpr double hbar = 1.054571817e-34;     // J s
inline constexpr double G = 6.67430e-11;            // m^3 kg^-1 s^-2
inline constexpr double proton_mass = 1.67262192369e-27;  // kg
}  // namespace si

struct PhysicalParams {
  double mass;         // kg per particle
  double n_particles;  // real-valued so that 1e23 is representable
  double hbar;
  double G;

  static PhysicalParams natural() { return {1.0, 1.0, 1.0, 1.0}; }
  static PhysicalParams nucleon(double n_particles) {
    return {si::proton_mass, n_particles, si::hbar, si::G};
  }

  /// Throws InvalidArgument unless every field is strictly positive and finite.
  void validate() const;
};

/// a_g = hbar^2 / (G N m^3).
double gravitational_bohr_radius(const PhysicalParams& params);

/// Prefactor c of the potential map  m*Phi - epsilon = c * g*(2r / (gamma1 a_g)),
/// in joules: c = (2 / gamma1^2) G^2 N^2 m^5 / hbar^2.
double potential_energy_scale(double gamma1, const PhysicalParams& params);

struct PhysicalProfile {
  RealField f;    // one-particle wavefunction, m^-3/2
  RealField phi;  // gravitational potential, J/kg
  PhysicalParams params;
  double bohr_radius;
  /// int 4 pi r^2 f^2 dr after any renormalization.
  double norm;
  /// Norm produced by the closed-form amplitude before renormalization.
  double printed_norm;
  /// True when the closed-form amplitude missed unit norm by more than 1e-3.
  bool renormalized;
  /// Constant subtracted from phi so that it matches -G N m / r at the edge.
  double phi_shift;
  /// Eigenparameter from the shooting run, m c epsilon* in joules.
  double epsilon_from_shooting;
  int n;
};

PhysicalProfile rescale_to_physical(const UniversalSolution& sol, const PhysicalParams& params);

struct EnergyBreakdown {
  double e_kinetic;
  double e_gravity;
  double e_total;
  double epsilon;
  double e_single;
};

EnergyBreakdown energy_breakdown(const PhysicalProfile& profile);

/// r at which f first drops to half of f(0) (linear interpolation).
double half_max_radius(const RealField& f);

/// sqrt(<r^2>) of the density f^2.
double rms_radius(const RealField& f);

/// (hbar^2 / 2m) int 4 pi |u'|^2 dr for u = r psi.
double kinetic_energy(const RadialGrid& grid, std::span<const std::complex<double>> u, double mass,
                      double hbar);

/// Pieces of the one-body energy for a reduced radial wavefunction u = r psi.
struct FunctionalParts {
  double norm;         // int 4 pi |u|^2 dr
  double kinetic;      // (hbar^2 / 2m) int 4 pi |u'|^2 dr
  double self_energy;  // (1/2) int 4 pi |u|^2 m Phi[u] dr, Phi sourced by N m |u/r|^2
};

FunctionalParts functional_parts(const RadialGrid& grid, std::span<const std::complex<double>> u,
                                 const PhysicalParams& params);

/// Gravitational potential sourced by N m |psi|^2 / norm, with psi = u / r.
RealField hartree_potential(const RadialGrid& grid, std::span<const std::complex<double>> u,
                            const PhysicalParams& params, double norm);

/// |psi|^2 on every node from u = r psi, with the origin value extrapolated
/// from the even expansion psi = a + b r^2.
std::vector<double> density_from_reduced(const RadialGrid& grid,
                                         std::span<const std::complex<double>> u);

/// H = E_kinetic + E_gravity / norm, well defined for unnormalized states.
/// The self-energy is computed through one Poisson solve.
double hamiltonian_functional(const RadialState& state, const PhysicalParams& params);

}  // namespace sng
