#pragma once

#include <complex>
#include <span>
#include <vector>

#include "sng/radial.hpp"

namespace sng {

/// Reduced radial wavefunction u(r) = r psi(r) at a given time.
struct RadialState {
  RadialGrid grid;
  std::vector<std::complex<double>> u;
  double mass;
  double hbar;
  double time = 0.0;
  /// Accumulated global phase of the constant self-energy offset; psi carries
  /// an extra factor exp(i * phase) on top of u / r.
  double phase = 0.0;

  /// Throws unless u(0) == 0, samples are finite and the norm is positive.
  void validate() const;

  /// int 4 pi |u|^2 dr.
  double norm() const;

  /// u with the phase ledger applied.
  std::vector<std::complex<double>> u_with_phase() const;
};

/// Builds u = r psi from samples of psi on the grid.
RadialState state_from_psi(const RadialGrid& grid, std::span<const std::complex<double>> psi,
                           double mass, double hbar, double time = 0.0);
RadialState state_from_psi(const RadialGrid& grid, std::span<const double> psi, double mass,
                           double hbar, double time = 0.0);

}  // namespace sng
