#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "flks/chain.hpp"
#include "flks/limiter.hpp"
#include "flks/response.hpp"
#include "flks/steady.hpp"
#include "flks/velocity_space.hpp"

using namespace flks;
using Catch::Approx;

namespace {
FluxLimiter disk_limiter() {
  static FluxLimiter lim = limiter_from_response(
      ResponseFunction::make_algebraic(), VelocitySpace::disk(1.0, 48, 64),
      1.0, 1.0);
  return lim;
}
}  // namespace

TEST_CASE("shooting with constant limiter reproduces the explicit solution") {
  // phi == 1 makes the radial ODE exactly solvable: v(r) = 4 lam r^2 /
  // (1 + lam r^2) with lam = a/8, so b = 4/phi(0) = 4 for every a.
  auto lim = FluxLimiter::constant(1.0);
  for (double a : {1e-4, 1e-2, 1.0, 1e2, 1e4}) {
    auto res = shoot(a, lim, 1e-11, true);
    REQUIRE(res.b == Approx(4.0).epsilon(1e-6));
    // spot-check the closed-form trajectory u(y) = 4 lam y / (1 - y + lam y)
    double lam = a / 8.0;
    for (std::size_t k = 0; k < res.y.size(); k += 97) {
      double y = res.y[k];
      double exact = 4.0 * lam * y / (1.0 - y + lam * y);
      REQUIRE(res.u[k] == Approx(exact).margin(1e-7 * std::max(1.0, exact)));
    }
  }
}

TEST_CASE("disk-limiter shots all clear the mass threshold 4/phi(0) = 16") {
  auto lim = disk_limiter();
  for (double a : {1e-3, 1e-1, 10.0, 1e3, 1e5}) {
    auto res = shoot(a, lim);
    REQUIRE(res.b > 16.0);
  }
}

TEST_CASE("shot trajectories are nonnegative and increasing") {
  auto lim = disk_limiter();
  auto res = shoot(1.0, lim, 1e-10, true);
  REQUIRE(res.u.size() == res.y.size());
  double prev = -1.0;
  for (std::size_t i = 0; i < res.u.size(); ++i) {
    REQUIRE(res.u[i] >= 0.0);
    REQUIRE(res.u[i] >= prev);
    prev = res.u[i];
    REQUIRE(res.up[i] >= 0.0);
  }
}

TEST_CASE("critical mass sweep for the disk example brackets 32*pi") {
  auto lim = disk_limiter();
  auto rep = critical_mass_sweep(lim, 1e-3, 1e5, 40);
  double mstar = 32.0 * M_PI;
  REQUIRE(rep.M_star == Approx(mstar).epsilon(1e-8));
  REQUIRE(rep.inf_mass >= mstar);
  REQUIRE(rep.inf_mass <= mstar * 1.03);
  REQUIRE(rep.a_values.size() == 40);
  for (std::size_t i = 0; i < rep.b_values.size(); ++i)
    REQUIRE(2.0 * M_PI * rep.b_values[i] > mstar);
}

TEST_CASE("mass solve: nonexistence below critical, solution above") {
  auto lim = disk_limiter();
  double mstar = 2.0 * M_PI * 4.0 / lim.phi0;
  auto below = solve_for_mass(0.9 * mstar, lim);
  REQUIRE_FALSE(below.exists);
  auto above = solve_for_mass(1.5 * mstar, lim);
  REQUIRE(above.exists);
  REQUIRE(std::abs(2.0 * M_PI * shoot(above.a, lim).b - 1.5 * mstar) < 1e-6);
}

TEST_CASE("d=3 probe: tail mass keeps growing and density obeys the lower bound") {
  auto lim = disk_limiter();
  auto rep = nonexistence_probe_d_gt_2(3, 1.0, lim, 50.0);
  REQUIRE(rep.growth_ratio > 1.5);
  REQUIRE(rep.min_rho_over_bound >= 1.0 - 1e-8);
}

TEST_CASE("steady 1d profile matches tanh(x/2) for the constant limiter") {
  Grid1D g{20.0, 1024};
  auto chain = build_scalar_chain(FluxLimiter::constant(1.0), 2.0);
  auto res = steady_1d(chain, g);
  double sup = 0.0;
  for (std::size_t i = 0; i <= g.n; ++i)
    sup = std::max(sup, std::abs(res.u[i] - std::tanh(0.5 * g.node(i))));
  REQUIRE(sup < 1e-5);
}
