#include "sng/universal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <thread>

namespace sng {

const char* to_string(ShootClass c) noexcept {
  switch (c) {
    case ShootClass::converged: return "converged";
    case ShootClass::diverged_up: return "diverged_up";
    case ShootClass::diverged_down: return "diverged_down";
    case ShootClass::max_radius_reached: return "max_radius_reached";
  }
  return "unknown";
}

int ShootOutcome::effective_nodes() const noexcept {
  if (classification != ShootClass::max_radius_reached) return node_count;
  const std::size_t last = f_star.size() - 1;
  return f_star[last] * df_star[last] < 0.0 ? node_count + 1 : node_count;
}

int count_nodes(std::span<const double> f, std::size_t last) {
  int nodes = 0;
  double sign = 0.0;
  for (std::size_t i = 0; i <= last && i < f.size(); ++i) {
    if (f[i] == 0.0) continue;
    const double s = f[i] > 0.0 ? 1.0 : -1.0;
    if (sign != 0.0 && s != sign) ++nodes;
    sign = s;
  }
  return nodes;
}

namespace {

using State = std::array<double, 4>;  // f, f', g, g'

State rhs(double r, const State& y) {
  return {y[1], y[2] * y[0] - 2.0 * y[1] / r, y[3], y[0] * y[0] - 2.0 * y[3] / r};
}

State axpy(const State& y, double a, const State& k) {
  return {y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2], y[3] + a * k[3]};
}

State rk4(double r, double h, const State& y) {
  const State k1 = rhs(r, y);
  const State k2 = rhs(r + 0.5 * h, axpy(y, 0.5 * h, k1));
  const State k3 = rhs(r + 0.5 * h, axpy(y, 0.5 * h, k2));
  const State k4 = rhs(r + h, axpy(y, h, k3));
  State out;
  for (std::size_t j = 0; j < 4; ++j) out[j] = y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  return out;
}

// Regular expansion about the origin:
//   f = 1 + gamma0 r^2/6 + (gamma0^2 + 1) r^4/120
//   g = gamma0 + r^2/6 + gamma0 r^4/60
State origin_series(double gamma0, double r) {
  const double r2 = r * r;
  const double b = (gamma0 * gamma0 + 1.0) / 120.0;
  const double d = gamma0 / 60.0;
  return {1.0 + gamma0 * r2 / 6.0 + b * r2 * r2, gamma0 * r / 3.0 + 4.0 * b * r2 * r,
          gamma0 + r2 / 6.0 + d * r2 * r2, r / 3.0 + 4.0 * d * r2 * r};
}

}  // namespace

ShootOutcome integrate_universal(double gamma0, const RadialGrid& grid, double cap) {
  if (!(cap > 1.0)) throw InvalidArgument("divergence cap must exceed 1");
  if (!std::isfinite(gamma0)) throw InvalidArgument("gamma0 must be finite");

  const std::size_t n = grid.size();
  const double h = grid.spacing();
  std::vector<double> f(n), fp(n), g(n), gp(n);
  f[0] = 1.0;
  fp[0] = 0.0;
  g[0] = gamma0;
  gp[0] = 0.0;
  State y = origin_series(gamma0, grid.node(1));
  f[1] = y[0];
  fp[1] = y[1];
  g[1] = y[2];
  gp[1] = y[3];

  std::size_t stop = n - 1;
  ShootClass cls = ShootClass::max_radius_reached;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    y = rk4(grid.node(i), h, y);
    f[i + 1] = y[0];
    fp[i + 1] = y[1];
    g[i + 1] = y[2];
    gp[i + 1] = y[3];
    if (i + 1 >= 2 && std::abs(y[0]) > cap) {
      stop = i + 1;
      cls = y[0] > 0.0 ? ShootClass::diverged_up : ShootClass::diverged_down;
      break;
    }
  }

  const std::size_t m = stop + 1;
  f.resize(m);
  fp.resize(m);
  g.resize(m);
  gp.resize(m);
  const RadialGrid traj_grid = grid.prefix(m);
  const int nodes = count_nodes(f, stop);
  std::optional<double> blowup;
  if (cls != ShootClass::max_radius_reached) blowup = grid.node(stop);
  return ShootOutcome{cls,
                      nodes,
                      RealField(traj_grid, std::move(f)),
                      RealField(traj_grid, std::move(g)),
                      std::move(fp),
                      std::move(gp),
                      blowup};
}

UniversalSolution shoot_gamma0(int n, Bracket bracket, const RadialGrid& grid, double tol, double cap) {
  if (n < 0) throw InvalidArgument("state index must be non-negative");
  if (!(tol > 0.0)) throw InvalidArgument("bisection tolerance must be positive");
  if (!(bracket.lo < bracket.hi)) throw InvalidBracket("bracket must satisfy lo < hi");

  const int nodes_hi = integrate_universal(bracket.hi, grid, cap).effective_nodes();
  const int nodes_lo = integrate_universal(bracket.lo, grid, cap).effective_nodes();
  if (!(nodes_hi <= n && nodes_lo > n)) {
    throw InvalidBracket("bracket [" + std::to_string(bracket.lo) + ", " + std::to_string(bracket.hi) +
                         "] does not straddle state " + std::to_string(n) + " (effective nodes " +
                         std::to_string(nodes_lo) + " and " + std::to_string(nodes_hi) + ")");
  }

  double lo = bracket.lo;
  double hi = bracket.hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (integrate_universal(mid, grid, cap).effective_nodes() <= n) {
      hi = mid;
    } else {
      lo = mid;
    }
  }

  const double gamma0 = 0.5 * (lo + hi);
  ShootOutcome shot = integrate_universal(gamma0, grid, cap);
  const auto& fs = shot.f_star.values;
  const auto& gs = shot.g_star.values;

  // Clamp at the local minimum of |f| that precedes the final runaway.
  std::size_t c = fs.size() - 1;
  while (c > 0 && std::abs(fs[c - 1]) < std::abs(fs[c])) --c;
  if (c > 0 && fs[c] * fs[c - 1] < 0.0) --c;
  if (c < 2) throw WrongState("shot trajectory has no decaying tail");

  const std::size_t npts = grid.size();
  std::vector<double> f(npts), g(npts);
  std::copy(fs.begin(), fs.begin() + static_cast<std::ptrdiff_t>(c) + 1, f.begin());
  std::copy(gs.begin(), gs.begin() + static_cast<std::ptrdiff_t>(c) + 1, g.begin());

  const double rc = grid.node(c);
  const double fc = fs[c];
  const double gc = gs[c];
  const double dgc = shot.dg_star[c];
  double kappa = gc > 0.0 ? std::sqrt(gc) : -(shot.df_star[c] / fc + 1.0 / rc);
  if (!(kappa > 0.0) || !std::isfinite(kappa)) kappa = 1.0 / rc;
  for (std::size_t i = c + 1; i < npts; ++i) {
    const double r = grid.node(i);
    f[i] = fc * (rc / r) * std::exp(-kappa * (r - rc));
    g[i] = gc + dgc * rc * rc * (1.0 / rc - 1.0 / r);
  }

  const int nodes = count_nodes(f, npts - 1);
  if (nodes != n) {
    throw WrongState("bisection for state " + std::to_string(n) + " converged to a profile with " +
                     std::to_string(nodes) + " nodes");
  }

  std::vector<double> f2(npts), f2g(npts);
  for (std::size_t i = 0; i < npts; ++i) {
    f2[i] = f[i] * f[i];
    f2g[i] = f2[i] * g[i];
  }
  const double gamma1 = integrate_radial(grid, f2);
  const double epsilon_star = 3.0 / gamma1 * integrate_radial(grid, f2g);

  return UniversalSolution{n,
                           gamma0,
                           gamma1,
                           epsilon_star,
                           RealField(grid, std::move(f)),
                           RealField(grid, std::move(g)),
                           nodes,
                           hi - lo,
                           rc,
                           grid};
}

std::vector<LabeledBracket> scan_brackets(Bracket gamma0_range, int steps, const RadialGrid& grid,
                                          double cap, unsigned threads) {
  if (!(gamma0_range.lo < gamma0_range.hi)) throw InvalidArgument("scan range must satisfy lo < hi");
  if (steps < 2) throw InvalidArgument("scan needs at least 2 samples");

  const auto count = static_cast<std::size_t>(steps);
  std::vector<double> gammas(count);
  for (std::size_t k = 0; k < count; ++k) {
    // Descending lattice, endpoints exact.
    gammas[k] = k + 1 == count ? gamma0_range.lo
                               : gamma0_range.hi - (gamma0_range.hi - gamma0_range.lo) *
                                                       static_cast<double>(k) /
                                                       static_cast<double>(count - 1);
  }

  std::vector<int> nodes(count);
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  auto work = [&](unsigned w) {
    for (std::size_t k = w; k < count; k += workers) {
      nodes[k] = integrate_universal(gammas[k], grid, cap).effective_nodes();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  std::vector<LabeledBracket> out;
  for (std::size_t k = 0; k + 1 < count; ++k) {
    if (nodes[k] != nodes[k + 1]) {
      out.push_back({std::min(nodes[k], nodes[k + 1]), Bracket{gammas[k + 1], gammas[k]}, nodes[k],
                     nodes[k + 1]});
    }
  }
  return out;
}

std::optional<Bracket> find_bracket(const std::vector<LabeledBracket>& brackets, int n) {
  for (const auto& b : brackets) {
    if (b.nodes_hi <= n && b.nodes_lo > n) return b.bracket;
  }
  return std::nullopt;
}

UniversalSolution solve_state(int n, const RadialGrid& grid, double tol, double cap, unsigned threads) {
  if (n < 0) throw InvalidArgument("state index must be non-negative");
  const auto brackets = scan_brackets({-2.0, 0.0}, 801, grid, cap, threads);
  const auto bracket = find_bracket(brackets, n);
  if (!bracket) {
    throw InvalidBracket("no gamma0 bracket found for state " + std::to_string(n));
  }
  return shoot_gamma0(n, *bracket, grid, tol, cap);
}

}  // namespace sng
