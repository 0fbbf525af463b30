#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "flks/chain.hpp"
#include "flks/limiter.hpp"
#include "flks/response.hpp"
#include "flks/velocity_space.hpp"

using namespace flks;
using Catch::Approx;

TEST_CASE("constant-limiter chain has closed forms") {
  // phi == 1, M = 2: Phi(u) = u^2/2, A(u) = ln((1+u)/(1-u)),
  // A^{-1}(x) = tanh(x/2)
  auto chain = build_scalar_chain(FluxLimiter::constant(1.0), 2.0);
  for (double u : {0.0, 0.2, 0.55, 0.9, 0.99}) {
    REQUIRE(chain.Phi(u) == Approx(0.5 * u * u).margin(1e-11));
    REQUIRE(chain.A(u) ==
            Approx(std::log((1.0 + u) / (1.0 - u))).margin(1e-9));
  }
  for (double x : {-6.0, -1.3, 0.0, 0.4, 2.2, 7.0})
    REQUIRE(chain.A_inv(x) == Approx(std::tanh(0.5 * x)).margin(1e-10));
}

TEST_CASE("A_inv round trip at 1e-10") {
  auto chain = build_scalar_chain(FluxLimiter::constant(1.0), 2.0);
  for (double x : {-8.0, -2.0, -0.1, 0.0, 0.7, 3.0, 9.0})
    REQUIRE(std::abs(chain.A(chain.A_inv(x)) - x) < 1e-10);
}

TEST_CASE("Phi is even in the drift sense and increasing on [0, M/2)") {
  auto psi = ResponseFunction::make_algebraic();
  auto vel = VelocitySpace::interval(1.0, 32);
  auto lim = limiter_from_response(psi, vel, 1.0, 1.0);
  auto chain = build_scalar_chain(lim, 2.0);
  REQUIRE(chain.Phi(0.0) == 0.0);
  double prev = 0.0;
  for (double u = 0.1; u < 1.0; u += 0.1) {
    double v = chain.Phi(u);
    REQUIRE(v > prev);
    prev = v;
    REQUIRE(chain.Phi(-u) == Approx(v).margin(1e-13));
  }
}

TEST_CASE("gap(u) = Phi(M/2) - Phi(u) is positive below M/2 and cancellation-safe") {
  auto chain = build_scalar_chain(FluxLimiter::constant(1.0), 2.0);
  for (double u : {0.0, 0.9, 0.999, 1.0 - 1e-9}) {
    double g = chain.gap(u);
    REQUIRE(g > 0.0);
    REQUIRE(g == Approx(0.5 * (1.0 - u * u)).epsilon(1e-6));
  }
}

TEST_CASE("A is odd and strictly increasing") {
  auto psi = ResponseFunction::make_algebraic();
  auto vel = VelocitySpace::interval(1.0, 32);
  auto lim = limiter_from_response(psi, vel, 1.0, 1.0);
  auto chain = build_scalar_chain(lim, 2.0);
  double prev = chain.A(-0.95);
  for (double u = -0.9; u < 0.96; u += 0.05) {
    double v = chain.A(u);
    REQUIRE(v > prev);
    prev = v;
    REQUIRE(chain.A(-u) == Approx(-v).margin(1e-8));
  }
}

TEST_CASE("A_prime equals 1/gap") {
  auto chain = build_scalar_chain(FluxLimiter::constant(1.0), 2.0);
  for (double u : {0.0, 0.3, 0.8})
    REQUIRE(chain.A_prime(u) ==
            Approx(1.0 / (0.5 * (1.0 - u * u))).epsilon(1e-8));
}

TEST_CASE("A rejects arguments at or beyond M/2; Phi extends past it") {
  auto chain = build_scalar_chain(FluxLimiter::constant(1.0), 2.0);
  REQUIRE_THROWS_AS(chain.A(1.0), chain_domain_error);
  REQUIRE_THROWS_AS(chain.A(-1.0 - 1e-9), chain_domain_error);
  REQUIRE(chain.Phi(1.5) == Approx(0.5 * 1.5 * 1.5).margin(1e-10));
}

TEST_CASE("A_inv saturates toward +/- M/2 at large arguments") {
  auto chain = build_scalar_chain(FluxLimiter::constant(1.0), 2.0);
  REQUIRE(chain.A_inv(60.0) == Approx(1.0).margin(1e-9));
  REQUIRE(chain.A_inv(-60.0) == Approx(-1.0).margin(1e-9));
  REQUIRE(chain.A_inv(60.0) < 1.0);
}
