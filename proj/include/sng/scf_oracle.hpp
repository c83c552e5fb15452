#pragma once

// Self-consistent-field reference for the bound states, independent of the
// shooting integrator: repeated finite-difference eigensolves in a frozen
// potential alternated with Poisson updates, in natural units
// (hbar = m = G = N = 1).

#include <cstddef>

#include "sng/radial.hpp"

namespace sng {

struct ScfOptions {
  double mixing = 0.5;
  double tolerance = 1e-12;  // max change of psi between iterations
  int max_iterations = 500;
};

struct ScfResult {
  RealField psi;        // normalized, psi(0) > 0
  RealField potential;  // Phi, vanishing at infinity
  double epsilon;       // eigenvalue of the frozen-potential problem
  int iterations;
  double last_change;
  bool converged;

  /// psi(0) extrapolated from the even expansion about the origin.
  double psi_at_origin() const;
  /// Length L of r = L rho in the universal normalization f*(0) = 1.
  double universal_length() const;
  /// g*(0) = 2 L^2 (Phi(0) - epsilon).
  double gamma0() const;
};

/// `state` selects the eigenvalue index (0 = ground, 1 = first excited) of the
/// frozen-potential problem at every iteration.
ScfResult scf_oracle(const RadialGrid& grid, int state, const ScfOptions& options = {});

}  // namespace sng
