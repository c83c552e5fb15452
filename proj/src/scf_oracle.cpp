#include "sng/scf_oracle.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace sng {

namespace {

constexpr double kPi = std::numbers::pi;

struct Eigenpair {
  double value;
  std::vector<double> vector;
};

// Eigenpair `index` of the symmetric tridiagonal matrix (diag, off).
Eigenpair tridiagonal_eigenpair(std::vector<double> diag, std::vector<double> off, int index) {
  const lapack_int n = static_cast<lapack_int>(diag.size());
  off.resize(diag.size());
  lapack_int found = 0;
  std::vector<double> w(diag.size());
  std::vector<double> z(diag.size());
  std::vector<lapack_int> support(2);
  const lapack_int il = index + 1;
  const int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, diag.data(), off.data(), 0.0, 0.0,
                                  il, il, 0.0, &found, w.data(), z.data(), n, support.data());
  if (info != 0 || found != 1) {
    throw Error("tridiagonal eigensolver failed (info " + std::to_string(info) + ")");
  }
  return {w[0], std::move(z)};
}

}  // namespace

double ScfResult::psi_at_origin() const {
  // psi = a + b r^2 through nodes 1 and 2.
  return (4.0 * psi[1] - psi[2]) / 3.0;
}

double ScfResult::universal_length() const {
  const double a = psi_at_origin();
  return std::pow(1.0 / (8.0 * kPi * a * a), 0.25);
}

double ScfResult::gamma0() const {
  const double length = universal_length();
  return 2.0 * length * length * (potential[0] - epsilon);
}

ScfResult scf_oracle(const RadialGrid& grid, int state, const ScfOptions& options) {
  if (state < 0) throw InvalidArgument("state index must be non-negative");
  const std::size_t n = grid.size();
  if (n < 8) throw InvalidArgument("oracle grid too small");
  const std::size_t m = n - 2;  // interior unknowns of u = r psi
  const double h = grid.spacing();
  const double kin = 1.0 / (h * h);  // -(1/2) u'' stencil: diag 1/h^2, off -1/(2h^2)

  auto normalize = [&](std::vector<double>& psi) {
    std::vector<double> r2p2(n);
    for (std::size_t i = 0; i < n; ++i) r2p2[i] = psi[i] * psi[i];
    const double norm = 4.0 * kPi * integrate_radial(grid, r2p2);
    const double s = 1.0 / std::sqrt(norm);
    for (double& x : psi) x *= s;
  };
  auto poisson = [&](const std::vector<double>& psi) {
    std::vector<double> rho(n);
    for (std::size_t i = 0; i < n; ++i) rho[i] = psi[i] * psi[i];
    return solve_radial_poisson(RealField(grid, std::move(rho)), 4.0 * kPi).values;
  };

  // Start from a Gaussian a tenth of the box wide.
  std::vector<double> psi(n);
  const double width = 0.1 * grid.rho_max();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid.node(i);
    psi[i] = std::exp(-r * r / (2.0 * width * width));
  }
  psi.back() = 0.0;
  normalize(psi);
  std::vector<double> v = poisson(psi);

  double epsilon = 0.0;
  double change = 0.0;
  bool converged = false;
  int it = 0;
  for (it = 1; it <= options.max_iterations; ++it) {
    std::vector<double> diag(m), off(m - 1, -0.5 * kin);
    for (std::size_t k = 0; k < m; ++k) diag[k] = kin + v[k + 1];
    auto pair = tridiagonal_eigenpair(std::move(diag), std::move(off), state);
    epsilon = pair.value;

    std::vector<double> next(n, 0.0);
    for (std::size_t k = 0; k < m; ++k) next[k + 1] = pair.vector[k] / grid.node(k + 1);
    next[0] = (4.0 * next[1] - next[2]) / 3.0;
    if (next[0] < 0.0) {
      for (double& x : next) x = -x;
    }
    normalize(next);

    change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(next[i] - psi[i]));
    psi = std::move(next);

    const auto fresh = poisson(psi);
    for (std::size_t i = 0; i < n; ++i) v[i] = (1.0 - options.mixing) * v[i] + options.mixing * fresh[i];
    if (change < options.tolerance) {
      converged = true;
      break;
    }
  }

  // Report the potential of the final density, not the mixed one.
  auto phi = poisson(psi);
  return ScfResult{RealField(grid, psi), RealField(grid, std::move(phi)), epsilon,
                   std::min(it, options.max_iterations), change, converged};
}

}  // namespace sng
