#pragma once

// Shooting solver for the dimensionless universal system
//   lap f = g f,   lap g = f^2,
// with f(0) = 1, f'(0) = 0, g(0) = gamma0, g'(0) = 0.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "sng/radial.hpp"

namespace sng {

inline constexpr double kDefaultRhoMax = 40.0;
inline constexpr long long kDefaultPoints = 8001;
inline constexpr double kDefaultTol = 1e-10;
inline constexpr double kDefaultCap = 1e3;

enum class ShootClass { converged, diverged_up, diverged_down, max_radius_reached };

const char* to_string(ShootClass c) noexcept;

/// Result of one outward integration at fixed gamma0.
struct ShootOutcome {
  ShootClass classification;
  int node_count;
  /// Trajectory up to the stopping node; both fields share a prefix grid of
  /// the requested grid.
  RealField f_star;
  RealField g_star;
  std::vector<double> df_star;
  std::vector<double> dg_star;
  std::optional<double> blowup_radius;

  /// Node count plus one when f is still heading towards zero at the outer
  /// boundary. Orders outcomes monotonically in gamma0.
  int effective_nodes() const noexcept;
};

ShootOutcome integrate_universal(double gamma0, const RadialGrid& grid, double cap = kDefaultCap);

struct UniversalSolution {
  int n;
  double gamma0;
  double gamma1;
  double epsilon_star;
  RealField f_star;
  RealField g_star;
  int node_count;
  double bracket_width;
  /// Radius where the shot trajectory was clamped and replaced by its
  /// exponential tail.
  double clamp_radius;
  RadialGrid grid;
};

struct Bracket {
  double lo;
  double hi;
};

/// Bisection on gamma0 for the state with n nodes. `bracket` must straddle the
/// transition: hi has at most n effective nodes, lo has more.
UniversalSolution shoot_gamma0(int n, Bracket bracket, const RadialGrid& grid,
                               double tol = kDefaultTol, double cap = kDefaultCap);

struct LabeledBracket {
  int n;
  Bracket bracket;
  int nodes_hi;
  int nodes_lo;
};

/// Uniform gamma0 lattice from lo to hi; consecutive samples whose effective
/// node counts differ are returned, highest gamma0 first.
std::vector<LabeledBracket> scan_brackets(Bracket gamma0_range, int steps, const RadialGrid& grid,
                                          double cap = kDefaultCap, unsigned threads = 1);

/// First bracket (from the high-gamma0 end) that straddles state n.
std::optional<Bracket> find_bracket(const std::vector<LabeledBracket>& brackets, int n);

/// Sign changes of f over [0, last].
int count_nodes(std::span<const double> f, std::size_t last);

/// Scans the default gamma0 window and bisects state n.
UniversalSolution solve_state(int n, const RadialGrid& grid, double tol = kDefaultTol,
                              double cap = kDefaultCap, unsigned threads = 1);

}  // namespace sng
