#include "sng/radial.hpp"

#include <cmath>
#include <string>

namespace sng {

RadialGrid::RadialGrid(double rho_max, std::size_t n_points)
    : rho_max_(rho_max), n_points_(n_points) {
  if (!(rho_max > 0.0) || !std::isfinite(rho_max)) {
    throw InvalidArgument("grid radius must be positive and finite, got " + std::to_string(rho_max));
  }
  if (n_points < 3) {
    throw InvalidArgument("grid needs at least 3 points, got " + std::to_string(n_points));
  }
  spacing_ = rho_max / static_cast<double>(n_points - 1);
}

std::vector<double> RadialGrid::nodes() const {
  std::vector<double> r(n_points_);
  for (std::size_t i = 0; i < n_points_; ++i) r[i] = node(i);
  return r;
}

RadialGrid RadialGrid::prefix(std::size_t n) const {
  if (n > n_points_) throw InvalidArgument("prefix longer than grid");
  return RadialGrid(static_cast<double>(n - 1) * spacing_, n);
}

RadialGrid RadialGrid::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("grid scale factor must be positive");
  return RadialGrid(rho_max_ * factor, n_points_);
}

RadialGrid make_grid(double rho_max, long long n_points) {
  if (n_points < 3) {
    throw InvalidArgument("grid needs at least 3 points, got " + std::to_string(n_points));
  }
  return RadialGrid(rho_max, static_cast<std::size_t>(n_points));
}

bool all_finite(std::span<const double> v) noexcept {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

bool all_finite(std::span<const std::complex<double>> v) noexcept {
  for (const auto& z : v) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

namespace {

void require_samples(const RadialGrid& grid, std::span<const double> h) {
  if (h.size() != grid.size()) {
    throw InvalidField("field has " + std::to_string(h.size()) + " samples for a grid of " +
                       std::to_string(grid.size()) + " nodes");
  }
  if (!all_finite(h)) throw InvalidField("field contains non-finite samples");
}

}  // namespace

std::vector<double> quadrature_weights(const RadialGrid& grid) {
  const std::size_t n = grid.size();
  const std::size_t intervals = n - 1;
  const double h = grid.spacing();
  std::vector<double> w(n, 0.0);

  // Simpson covers [0, simpson_end]; an odd remainder is closed by the 3/8 rule.
  const std::size_t simpson_end = intervals % 2 == 0 ? intervals : intervals - 3;
  for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  if (simpson_end != intervals) {
    const std::size_t i = simpson_end;
    w[i] += 3.0 * h / 8.0;
    w[i + 1] += 9.0 * h / 8.0;
    w[i + 2] += 9.0 * h / 8.0;
    w[i + 3] += 3.0 * h / 8.0;
  }
  return w;
}

double integrate(const RadialGrid& grid, std::span<const double> h) {
  require_samples(grid, h);
  const auto w = quadrature_weights(grid);
  double sum = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) sum += w[i] * h[i];
  return sum;
}

double integrate_radial(const RadialGrid& grid, std::span<const double> h) {
  require_samples(grid, h);
  const auto w = quadrature_weights(grid);
  double sum = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double r = grid.node(i);
    sum += w[i] * h[i] * r * r;
  }
  return sum;
}

double integrate_radial(const RealField& h) { return integrate_radial(h.grid, h.values); }

std::vector<double> cumulative_integral(const RadialGrid& grid, std::span<const double> h) {
  require_samples(grid, h);
  const std::size_t n = grid.size();
  const double dx = grid.spacing();
  std::vector<double> c(n, 0.0);
  if (n < 4) {
    for (std::size_t i = 1; i < n; ++i) c[i] = c[i - 1] + 0.5 * dx * (h[i - 1] + h[i]);
    return c;
  }
  // Cubic through four neighbouring samples, integrated over one interval.
  c[1] = dx * (9.0 * h[0] + 19.0 * h[1] - 5.0 * h[2] + h[3]) / 24.0;
  for (std::size_t i = 1; i + 2 < n; ++i) {
    c[i + 1] = c[i] + dx * (-h[i - 1] + 13.0 * h[i] + 13.0 * h[i + 1] - h[i + 2]) / 24.0;
  }
  c[n - 1] = c[n - 2] +
             dx * (h[n - 4] - 5.0 * h[n - 3] + 19.0 * h[n - 2] + 9.0 * h[n - 1]) / 24.0;
  return c;
}

RealField solve_radial_poisson(const RealField& density, double coupling) {
  const RadialGrid& grid = density.grid;
  if (!all_finite(density.values) || !std::isfinite(coupling)) {
    throw InvalidField("Poisson source contains non-finite samples");
  }
  const std::size_t n = grid.size();
  std::vector<double> inner(n), outer(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid.node(i);
    inner[i] = r * r * density[i];
    outer[i] = r * density[i];
  }
  const auto enclosed = cumulative_integral(grid, inner);
  const auto outer_cum = cumulative_integral(grid, outer);
  const double outer_total = outer_cum.back();

  RealField phi(grid);
  phi[0] = -coupling * outer_total;
  for (std::size_t i = 1; i < n; ++i) {
    const double r = grid.node(i);
    phi[i] = -coupling * (enclosed[i] / r + (outer_total - outer_cum[i]));
  }
  return phi;
}

RealField radial_laplacian(const RealField& f) {
  const RadialGrid& grid = f.grid;
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  RealField lap(grid);
  lap[0] = 6.0 * (f[1] - f[0]) / (h * h);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double r = grid.node(i);
    const double d2 = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
    const double d1 = (f[i + 1] - f[i - 1]) / (2.0 * h);
    lap[i] = d2 + 2.0 * d1 / r;
  }
  {
    const std::size_t i = n - 1;
    const double r = grid.node(i);
    const double d1 = (3.0 * f[i] - 4.0 * f[i - 1] + f[i - 2]) / (2.0 * h);
    const double d2 = n >= 4 ? (2.0 * f[i] - 5.0 * f[i - 1] + 4.0 * f[i - 2] - f[i - 3]) / (h * h)
                             : (f[i] - 2.0 * f[i - 1] + f[i - 2]) / (h * h);
    lap[i] = d2 + 2.0 * d1 / r;
  }
  return lap;
}

std::vector<double> derivative(const RadialGrid& grid, std::span<const double> f) {
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  std::vector<double> d(n, 0.0);
  if (n < 5) {
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
  }
  const double s = 12.0 * h;
  d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / s;
  d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / s;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / s;
  }
  const std::size_t m = n - 1;
  d[m - 1] = (3.0 * f[m] + 10.0 * f[m - 1] - 18.0 * f[m - 2] + 6.0 * f[m - 3] - f[m - 4]) / s;
  d[m] = (25.0 * f[m] - 48.0 * f[m - 1] + 36.0 * f[m - 2] - 16.0 * f[m - 3] + 3.0 * f[m - 4]) / s;
  return d;
}

}  // namespace sng
