#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "flks/kinetic.hpp"
#include "flks/response.hpp"
#include "flks/velocity_space.hpp"

using namespace flks;
using Catch::Approx;

namespace {
KineticParams base_params(double eps) {
  KineticParams p;
  p.epsilon = eps;
  p.lambda0 = 1.0;
  p.chi = 1.0;
  p.alpha = 1.0;
  p.tau = 0.0;
  p.psi = ResponseFunction::make_algebraic();
  p.psi_zero = false;
  return p;
}

std::function<double(double)> cos_bump(double L, double mean, double amp) {
  return [L, mean, amp](double x) {
    return mean + amp * std::cos(2.0 * M_PI * x / L);
  };
}
}  // namespace

TEST_CASE("equilibrium state reproduces the density exactly") {
  auto vel = VelocitySpace::interval(1.0, 12);
  KineticSolver solver(2.0 * M_PI, 64, vel, base_params(0.3));
  auto rho0 = cos_bump(2.0 * M_PI, 1.0, 0.3);
  auto st = solver.make_equilibrium_state(rho0);
  auto rho = solver.density(st);
  for (std::size_t i = 0; i < rho.size(); ++i)
    REQUIRE(rho[i] ==
            Approx(rho0((double(i) + 0.5) * solver.dx())).epsilon(1e-13));
  // equilibrium is velocity-symmetric so the rescaled flux vanishes
  auto J = solver.flux(st);
  for (double j : J) REQUIRE(std::abs(j) < 1e-12);
}

TEST_CASE("step conserves mass to machine precision") {
  auto vel = VelocitySpace::interval(1.0, 12);
  auto p = base_params(0.25);
  KineticSolver solver(2.0 * M_PI, 64, vel, p);
  auto st = solver.make_equilibrium_state(cos_bump(2.0 * M_PI, 1.0, 0.4));
  double m0 = solver.mass(st);
  double dt = solver.dt_max();
  for (int s = 0; s < 500; ++s) solver.step(st, dt);
  REQUIRE(std::abs(solver.mass(st) - m0) < 1e-11 * m0);
}

TEST_CASE("distribution stays nonnegative") {
  auto vel = VelocitySpace::interval(1.0, 12);
  KineticSolver solver(2.0 * M_PI, 64, vel, base_params(0.2));
  auto st = solver.make_equilibrium_state(cos_bump(2.0 * M_PI, 1.0, 0.8));
  double dt = solver.dt_max();
  for (int s = 0; s < 300; ++s) solver.step(st, dt);
  for (double v : st.f) REQUIRE(v >= 0.0);
}

TEST_CASE("time step bound scales with epsilon") {
  auto vel = VelocitySpace::interval(1.0, 12);
  KineticSolver s1(2.0 * M_PI, 64, vel, base_params(0.4));
  KineticSolver s2(2.0 * M_PI, 64, vel, base_params(0.2));
  REQUIRE(s2.dt_max() < s1.dt_max());
  // relaxation-limited regime: dt ~ eps^2
  double dx = 2.0 * M_PI / 64.0;
  KineticSolver s3(2.0 * M_PI, 64, vel, base_params(0.05));
  REQUIRE(s3.dt_max() ==
          Approx(0.9 * std::min(0.05 * dx, 0.05 * 0.05 / 2.0)).epsilon(1e-12));
}

TEST_CASE("with the response off, density follows the heat equation") {
  // Psi == 0: macroscopic limit is rho_t = D rho_xx with D = 1/6 and Fourier
  // mode decay exp(-D k^2 t)
  auto vel = VelocitySpace::interval(1.0, 16);
  auto p = base_params(0.1);
  p.psi_zero = true;
  double L = 2.0 * M_PI;
  std::size_t nx = 128;
  KineticSolver solver(L, nx, vel, p);
  double amp = 0.3;
  auto st = solver.make_equilibrium_state(cos_bump(L, 1.0, amp));
  double dt = solver.dt_max();
  double T = 0.5;
  int steps = int(std::ceil(T / dt));
  dt = T / steps;
  for (int s = 0; s < steps; ++s) solver.step(st, dt);
  auto rho = solver.density(st);
  double D = 1.0 / 6.0;
  double expect_amp = amp * std::exp(-D * T);
  double dx = L / double(nx);
  // project onto the cosine mode
  double proj = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    double x = (double(i) + 0.5) * dx;
    proj += (rho[i] - 1.0) * std::cos(2.0 * M_PI * x / L) * dx;
  }
  proj /= M_PI;  // L2 normalization of cos on [0, 2pi)
  REQUIRE(proj == Approx(expect_amp).epsilon(0.05));
}

TEST_CASE("chemical solve matches the periodic elliptic relation") {
  auto vel = VelocitySpace::interval(1.0, 8);
  auto p = base_params(0.3);
  double L = 2.0 * M_PI;
  std::size_t nx = 256;
  KineticSolver solver(L, nx, vel, p);
  std::vector<double> rho(nx);
  double dx = L / double(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    double x = (double(i) + 0.5) * dx;
    rho[i] = 2.0 * std::cos(x);  // -S'' + S = rho -> S = cos(x)
  }
  auto S = solver.solve_chemical(rho, {}, 0.0);
  for (std::size_t i = 0; i < nx; i += 17) {
    double x = (double(i) + 0.5) * dx;
    REQUIRE(S[i] == Approx(std::cos(x)).margin(1e-3));
  }
}

TEST_CASE("rescaled flux of an equilibrium perturbation stays bounded as eps shrinks") {
  auto vel = VelocitySpace::interval(1.0, 12);
  double L = 2.0 * M_PI;
  std::size_t nx = 64;
  std::vector<double> Jmax;
  for (double eps : {0.4, 0.2, 0.1}) {
    KineticSolver solver(L, nx, vel, base_params(eps));
    auto st = solver.make_equilibrium_state(cos_bump(L, 1.0, 0.4));
    double dt = solver.dt_max();
    for (int s = 0; s < 50; ++s) solver.step(st, dt);
    auto J = solver.flux(st);
    double m = 0.0;
    for (double j : J) m = std::max(m, std::abs(j));
    Jmax.push_back(m);
  }
  for (double m : Jmax) {
    REQUIRE(std::isfinite(m));
    REQUIRE(m < 10.0);
  }
}
