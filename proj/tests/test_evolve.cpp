#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "sng/evolve.hpp"

using namespace sng;

namespace {

using cplx = std::complex<double>;

double max_drift(const std::vector<double>& v) {
  double d = 0.0;
  for (double x : v) d = std::max(d, std::abs(x / v.front() - 1.0));
  return d;
}

double linf(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double peak(const std::vector<cplx>& a) {
  double p = 0.0;
  for (const auto& x : a) p = std::max(p, std::abs(x));
  return p;
}

RadialState packet(long long points = 3001) {
  return gaussian_state(make_grid(60.0, points), 1.0, 1.0, 1.0);
}

const PhysicalProfile& ground_profile() {
  static const PhysicalProfile p = rescale_to_physical(
      solve_state(0, make_grid(kDefaultRhoMax, kDefaultPoints)), PhysicalParams::natural());
  return p;
}

const GravityNonlinearity kGravity{1.0, 1.0, 1.0};

}  // namespace

TEST_CASE("gaussian state") {
  const auto s = packet();
  CHECK(s.u.front() == cplx{});
  CHECK(s.u.back() == cplx{});
  CHECK(std::abs(s.norm() - 1.0) < 1e-12);
  CHECK(rms_width(s) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));
  CHECK(dispersion_time(1.0, 1.0, 1.0) == 2.0);
  CHECK(free_gaussian_rms_width(1.0, 1.0, 1.0, 2.0) == doctest::Approx(std::sqrt(6.0)));
  CHECK(bound_period(-0.5, 1.0) == doctest::Approx(4.0 * std::numbers::pi));
}

TEST_CASE("state validation") {
  auto s = packet(101);
  s.u[0] = 1e-3;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s.u[0] = 0.0;
  s.u[5] = std::nan("");
  CHECK_THROWS_AS(s.validate(), InvalidField);
  CHECK_THROWS_AS(step(packet(101), 0.0, FreeParticle{}), InvalidArgument);
  CHECK_THROWS_AS(step(packet(101), 0.1, CubicNonlinearity{-1.0, 1}), InvalidArgument);
  CHECK_THROWS_AS(step(packet(101), 0.1, CubicNonlinearity{1.0, 0}), InvalidArgument);
  CHECK_THROWS_AS(step(packet(101), 0.1, GravityNonlinearity{0.0, 1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(evolve(packet(101), 0.0, 0.1, FreeParticle{}), InvalidArgument);
}

TEST_CASE("free packet follows the dispersion law over five dispersion times") {
  const auto s = gaussian_state(make_grid(60.0, 6001), 1.0, 1.0, 1.0);
  const double td = dispersion_time(1.0, 1.0, 1.0);
  const auto series = evolve(s, 5.0 * td, td / 200.0, FreeParticle{}, 20);
  double worst = 0.0;
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    worst = std::max(worst, std::abs(series.widths[k] / free_gaussian_rms_width(1.0, 1.0, 1.0, series.times[k]) - 1.0));
  }
  CHECK(worst <= 1e-3);
  CHECK(max_drift(series.norms) <= 1e-8);
  CHECK(max_drift(series.energies) <= 1e-5);
}

TEST_CASE("observable series layout") {
  const auto s = packet(601);
  const auto series = evolve(s, 1.0, 0.03, FreeParticle{}, 7, 10);
  const std::size_t n = series.times.size();
  CHECK(series.norms.size() == n);
  CHECK(series.energies.size() == n);
  CHECK(series.widths.size() == n);
  for (std::size_t k = 1; k < n; ++k) CHECK(series.times[k] > series.times[k - 1]);
  CHECK(series.times.front() == 0.0);
  CHECK(series.times.back() == 1.0);
  CHECK(series.final_state.time == 1.0);
  // 34 uniform steps of 1/34: observations at 0, 7, 14, 21, 28, 34.
  CHECK(n == 6);
  CHECK(series.snapshots.size() == 5);
  CHECK(series.snapshots.back().time == 1.0);
}

TEST_CASE("cubic with zero coupling is the free flow") {
  const auto s = packet();
  const auto a = evolve(s, 2.0, 0.01, FreeParticle{});
  const auto b = evolve(s, 2.0, 0.01, CubicNonlinearity{0.0, 1});
  CHECK(linf(a.final_state.u, b.final_state.u) <= 1e-14);
  for (std::size_t k = 0; k < a.widths.size(); ++k) CHECK(std::abs(a.widths[k] - b.widths[k]) <= 1e-14);
}

TEST_CASE("conservation for every nonlinearity over 1000 steps") {
  const auto s = gaussian_state(make_grid(60.0, 6001), 1.0, 1.0, 1.0);
  const double dt = dispersion_time(1.0, 1.0, 1.0) / 200.0;
  const std::vector<Nonlinearity> modes = {FreeParticle{}, CubicNonlinearity{1.0, 1},
                                           CubicNonlinearity{1.0, -1}};
  for (const auto& nl : modes) {
    const auto series = evolve(s, 1000 * dt, dt, nl, 25);
    CHECK(max_drift(series.norms) <= 1e-8);
    CHECK(max_drift(series.energies) <= 1e-5);
  }
}

TEST_CASE("gravity conserves norm and energy on the ground state at dt = T/200") {
  const auto& p = ground_profile();
  const auto e = energy_breakdown(p);
  const double period = bound_period(e.e_single, 1.0);
  const auto s = state_from_profile(p);
  const auto series = evolve(s, 1000 * period / 200.0, period / 200.0, kGravity, 50);
  CHECK(max_drift(series.norms) <= 1e-8);
  CHECK(max_drift(series.energies) <= 1e-5);
}

TEST_CASE("ground state is stationary over one period") {
  const auto& p = ground_profile();
  const double period = bound_period(energy_breakdown(p).e_single, 1.0);
  const auto series = evolve(state_from_profile(p), period, period / 200.0, kGravity, 200, 200);
  REQUIRE(series.snapshots.size() == 2);
  const auto& a = series.snapshots.front().density.values;
  const auto& b = series.snapshots.back().density.values;
  double diff = 0.0, top = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    top = std::max(top, a[i]);
  }
  CHECK(diff / top <= 1e-3);
  // The accumulated phase is the eigenvalue rotation of a stationary state.
  CHECK(series.final_state.phase != 0.0);
}

TEST_CASE("global phase covariance") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const auto s = packet(1201);
  const std::vector<Nonlinearity> modes = {FreeParticle{}, CubicNonlinearity{2.0, -1}, kGravity};
  for (const auto& nl : modes) {
    const double theta = angle(rng);
    auto rotated = s;
    for (auto& x : rotated.u) x *= std::polar(1.0, theta);
    const auto a = evolve(s, 1.0, 0.01, nl).final_state;
    const auto b = evolve(rotated, 1.0, 0.01, nl).final_state;
    std::vector<cplx> expect(a.u);
    for (auto& x : expect) x *= std::polar(1.0, theta);
    CHECK(linf(b.u, expect) <= 1e-10);
    CHECK(std::abs(a.phase - b.phase) <= 1e-10);
  }
}

TEST_CASE("gravity flow is covariant under amplitude scaling") {
  const auto s = packet(1201);
  for (double lambda : {0.1, 2.5, 10.0}) {
    auto scaled = s;
    for (auto& x : scaled.u) x *= lambda;
    const auto a = evolve(s, 1.0, 0.01, kGravity).final_state;
    const auto b = evolve(scaled, 1.0, 0.01, kGravity).final_state;
    std::vector<cplx> expect(a.u);
    for (auto& x : expect) x *= lambda;
    CHECK(linf(b.u, expect) <= 1e-8 * lambda * peak(a.u));
    CHECK(std::abs(a.phase - b.phase) <= 1e-8);
  }
}

TEST_CASE("weak-field gravity reproduces free evolution") {
  const auto s = packet();
  const double td = dispersion_time(1.0, 1.0, 1.0);
  const auto a = evolve(s, td, td / 200.0, FreeParticle{}).final_state;
  const auto b = evolve(s, td, td / 200.0, GravityNonlinearity{1e-6, 1.0, 1.0}).final_state;
  CHECK(linf(a.u, b.u_with_phase()) <= 1e-4 * peak(a.u));
}

TEST_CASE("oversized steps are rejected with a smaller suggestion") {
  const auto s = packet(1201);
  const double dt = 5.0;
  try {
    (void)step(s, dt, CubicNonlinearity{200.0, -1});
    FAIL("expected StepRejected");
  } catch (const StepRejected& e) {
    CHECK(e.suggested_dt() > 0.0);
    CHECK(e.suggested_dt() <= 0.5 * dt);
  }
  // Free evolution has no potential to change and is never rejected.
  CHECK_NOTHROW(step(s, dt, FreeParticle{}));
}

TEST_CASE("boundary warning when the packet reaches the edge") {
  const auto s = gaussian_state(make_grid(8.0, 801), 1.0, 1.0, 1.0);
  const auto series = evolve(s, 4.0, 0.02, FreeParticle{}, 10);
  CHECK_FALSE(series.warnings.empty());
  const auto quiet = evolve(packet(), 0.2, 0.02, FreeParticle{}, 10);
  CHECK(quiet.warnings.empty());
}

TEST_CASE("continuity: real stationary profiles") {
  const auto s = state_from_profile(ground_profile());
  CHECK(continuity_residual(s, s) <= 1e-6);
  const auto g = packet();
  CHECK(continuity_residual(g, g) <= 1e-6);
}

TEST_CASE("continuity: dispersing gaussian converges at second order") {
  std::vector<double> res;
  for (int k : {1, 2, 4}) {
    const auto s = gaussian_state(make_grid(60.0, 3000 * k + 1), 1.0, 1.0, 1.0);
    const double td = dispersion_time(1.0, 1.0, 1.0);
    const double dt = td / (100.0 * k);
    const auto mid = evolve(s, 0.5 * td, dt, FreeParticle{}, 1 << 30).final_state;
    res.push_back(continuity_residual(mid, step(mid, dt, FreeParticle{})));
  }
  // Measured 6.9e-5, 1.7e-5, 4.3e-6.
  CHECK(res[0] <= 1e-4);
  CHECK(std::log2(res[0] / res[1]) >= 1.8);
  CHECK(std::log2(res[1] / res[2]) >= 1.8);
}

TEST_CASE("continuity: mismatched states") {
  const auto a = packet(101);
  const auto b = packet(201);
  CHECK_THROWS_AS(continuity_residual(a, b), InvalidArgument);
  auto later = a;
  later.time = -1.0;
  CHECK_THROWS_AS(continuity_residual(a, later), InvalidArgument);
}

TEST_CASE("evolution is deterministic") {
  const auto s = packet(801);
  const auto a = evolve(s, 1.0, 0.01, CubicNonlinearity{1.0, 1});
  const auto b = evolve(s, 1.0, 0.01, CubicNonlinearity{1.0, 1});
  CHECK(a.final_state.u == b.final_state.u);
  CHECK(a.energies == b.energies);
}
