#pragma once

// Uniform radial grids, spherically symmetric quadrature and the radial
// Poisson solver shared by the shooting, rescaling and evolution code.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sng/error.hpp"

namespace sng {

/// Uniform discretization of [0, rho_max]. Node 0 is exactly 0 and the last
/// node is exactly rho_max.
class RadialGrid {
 public:
  RadialGrid(double rho_max, std::size_t n_points);

  double rho_max() const noexcept { return rho_max_; }
  std::size_t size() const noexcept { return n_points_; }
  double spacing() const noexcept { return spacing_; }

  double node(std::size_t i) const noexcept {
    return i + 1 == n_points_ ? rho_max_ : static_cast<double>(i) * spacing_;
  }
  std::vector<double> nodes() const;

  /// Grid made of the first `n` nodes (same spacing).
  RadialGrid prefix(std::size_t n) const;

  /// Same point count, every node multiplied by `factor` (> 0).
  RadialGrid scaled(double factor) const;

  bool operator==(const RadialGrid& other) const noexcept {
    return rho_max_ == other.rho_max_ && n_points_ == other.n_points_;
  }

 private:
  double rho_max_;
  std::size_t n_points_;
  double spacing_;
};

RadialGrid make_grid(double rho_max, long long n_points);

/// Samples of a real or complex function, one per grid node.
template <typename T>
struct RadialField {
  RadialGrid grid;
  std::vector<T> values;

  RadialField(RadialGrid g, std::vector<T> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid.size()) {
      throw InvalidField("field has " + std::to_string(values.size()) + " samples for a grid of " +
                         std::to_string(grid.size()) + " nodes");
    }
  }
  explicit RadialField(RadialGrid g) : grid(std::move(g)), values(grid.size(), T{}) {}

  std::size_t size() const noexcept { return values.size(); }
  const T& operator[](std::size_t i) const { return values[i]; }
  T& operator[](std::size_t i) { return values[i]; }
};

using RealField = RadialField<double>;
using ComplexField = RadialField<std::complex<double>>;

bool all_finite(std::span<const double> v) noexcept;
bool all_finite(std::span<const std::complex<double>> v) noexcept;

/// Composite quadrature weights w_i with sum_i w_i h(r_i) ~ int_0^R h(r) dr.
/// Simpson for an even interval count; otherwise Simpson followed by the 3/8
/// rule on the last three intervals.
std::vector<double> quadrature_weights(const RadialGrid& grid);

/// int_0^R h(r) dr (no r^2 factor).
double integrate(const RadialGrid& grid, std::span<const double> h);

/// int_0^R h(rho) rho^2 drho.
double integrate_radial(const RealField& h);
double integrate_radial(const RadialGrid& grid, std::span<const double> h);

/// Running integral C_i = int_0^{r_i} h(r) dr. Interval-additive, fourth order
/// on smooth data (trapezoid on grids with fewer than four nodes).
std::vector<double> cumulative_integral(const RadialGrid& grid, std::span<const double> h);

/// Solves lap(phi) = coupling * density in spherical symmetry with phi -> 0 at
/// infinity. The density is taken to vanish beyond the grid.
RealField solve_radial_poisson(const RealField& density, double coupling);

/// Three-point radial Laplacian f'' + (2/r) f'. Uses the regular limit 3 f''(0)
/// at the origin and a one-sided stencil at the outer node.
RealField radial_laplacian(const RealField& f);

/// Fourth-order first derivative (one-sided stencils near both ends).
std::vector<double> derivative(const RadialGrid& grid, std::span<const double> f);

}  // namespace sng
