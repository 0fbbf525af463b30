#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flks/chain.hpp"
#include "flks/limiter.hpp"
#include "flks/macro.hpp"
#include "flks/numerics.hpp"

namespace flks {

// ---------------------------------------------------------------------------
// d = 2 radial shooting in the compactified variable y = r^2/(r^2+1):
//   u'' = (2 u' / (1-y)) * (1 - (u / 4y) * phi(sqrt((1-y)/y) u)),
//   u(0) = 0, u'(0) = a/2.
// ---------------------------------------------------------------------------

struct ShootResult {
  double b = 0.0;             // u(1-delta), total mass / (2 pi)
  bool lower_bound_only = false;  // step underflow near y = 1
  std::vector<double> y, u, up;   // accepted trajectory samples
};

namespace detail {

inline ShootResult shoot_once(double a, const FluxLimiter& limiter, double tol,
                              double y0, double delta, bool keep_traj) {
  auto rhs = [&limiter](double y, const std::array<double, 2>& s,
                        std::array<double, 2>& ds) {
    double u = s[0], up = s[1];
    double arg = std::sqrt((1.0 - y) / y) * u;
    double fac = 1.0 - u / (4.0 * y) * limiter(arg);
    ds[0] = up;
    ds[1] = 2.0 * up / (1.0 - y) * fac;
  };
  // second-order series start: u'' -> a (1 - a phi(0)/8) as y -> 0
  const double c2 = 1.0 - a * limiter(0.0) / 8.0;
  std::array<double, 2> s{0.5 * a * y0 * (1.0 + c2 * y0),
                          0.5 * a * (1.0 + 2.0 * c2 * y0)};
  OdeOptions opt;
  opt.rel_tol = tol;
  opt.abs_tol = tol * std::max(1.0, a);
  opt.h_init = y0;
  ShootResult res;
  bool ok;
  if (keep_traj) {
    ok = rk45_integrate<2>(rhs, y0, 1.0 - delta, s, opt,
                           [&](double y, const std::array<double, 2>& st) {
                             res.y.push_back(y);
                             res.u.push_back(st[0]);
                             res.up.push_back(st[1]);
                           });
  } else {
    ok = rk45_integrate<2>(rhs, y0, 1.0 - delta, s, opt,
                           [](double, const std::array<double, 2>&) {});
  }
  // v(r) = b - C/r^2 + ... means u is asymptotically linear in 1-y, so the
  // remaining tail is delta * u' to leading order.
  res.b = s[0] + delta * s[1];
  res.lower_bound_only = !ok;
  return res;
}

}  // namespace detail

/// Integrates the compactified steady-state ODE from y0 = 1e-6 to 1 - delta
/// with an adaptive embedded RK pair, Richardson-checking the endpoint by
/// halving delta. Monotone trajectories are an invariant of the problem.
inline ShootResult shoot(double a, const FluxLimiter& limiter,
                         double tol = 1e-10, bool keep_trajectory = false) {
  if (a <= 0.0) throw std::invalid_argument("shoot: a must be > 0");
  // keep the series start inside its radius of validity: a phi(0) y0 << 1
  const double y0 = std::min(1e-6, 0.1 / (1.0 + a * limiter(0.0)));
  const double delta = 1e-8;
  ShootResult res = detail::shoot_once(a, limiter, tol, y0, delta, keep_trajectory);
  ShootResult half = detail::shoot_once(a, limiter, tol, y0, 0.5 * delta, false);
  // endpoint Richardson check; u' decays toward y=1, the gap is the tail
  if (std::abs(half.b - res.b) > 1e-6 * std::max(1.0, std::abs(res.b)))
    res.lower_bound_only = true;
  res.b = half.b;
  if (keep_trajectory) {
    for (std::size_t i = 1; i < res.u.size(); ++i)
      if (res.u[i] < res.u[i - 1] - 1e-12 * std::max(1.0, res.u[i - 1]))
        throw scheme_error("shoot: trajectory lost monotonicity at y = " +
                           std::to_string(res.y[i]));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Critical-mass machinery (d = 2):  M = 2 pi b, threshold M* = 8 pi / phi(0).
// ---------------------------------------------------------------------------

struct MassSolveResult {
  bool exists = false;
  double a = 0.0;        // shot parameter achieving the target, if it exists
  double b = 0.0;        // attained u(1)
  double critical_mass = 0.0;
};

/// Finds a with 2 pi b(a) = M by bracketing + bisection over log a, or
/// reports nonexistence when M is at or below the critical mass.
inline MassSolveResult solve_for_mass(double M, const FluxLimiter& limiter,
                                      double tol = 1e-8) {
  if (M <= 0.0) throw std::invalid_argument("solve_for_mass: M must be > 0");
  MassSolveResult out;
  out.critical_mass = 8.0 * M_PI / limiter.phi0;
  if (M <= out.critical_mass * (1.0 + tol)) return out;  // nonexistence

  const double target = M / (2.0 * M_PI);
  auto bfun = [&](double log_a) {
    return shoot(std::exp(log_a), limiter, 1e-10).b - target;
  };
  // bracket over log a in [-8, 8] decades (natural log bounds below)
  double lo = std::log(1e-8), hi = std::log(1e8);
  double flo = bfun(lo);
  if (flo > 0.0)
    throw numerics_error("solve_for_mass: no bracket, b(1e-8) already above target");
  double fhi = bfun(hi);
  if (fhi < 0.0)
    throw numerics_error("solve_for_mass: no bracket within a in [1e-8, 1e8]");
  double la = brent(bfun, lo, hi, 1e-12);
  out.exists = true;
  out.a = std::exp(la);
  out.b = shoot(out.a, limiter, 1e-10).b;
  return out;
}

struct CriticalMassReport {
  double phi0 = 0.0;
  double M_star = 0.0;      // 8 pi / phi(0)
  double inf_b = 0.0;       // infimum of b over the a-sweep
  double inf_mass = 0.0;    // 2 pi inf_b
  double margin = 0.0;      // inf_mass / M_star - 1
  std::vector<double> a_values, b_values;
};

/// Coarse log-spaced sweep of b(a) refined by golden-section over log a;
/// the acceptance criterion needs only the infimum.
inline CriticalMassReport critical_mass_sweep(const FluxLimiter& limiter,
                                              double a_min = 1e-3,
                                              double a_max = 1e5,
                                              int points = 40) {
  CriticalMassReport rep;
  rep.phi0 = limiter.phi0;
  rep.M_star = 8.0 * M_PI / limiter.phi0;
  double best = std::numeric_limits<double>::infinity(), best_la = 0.0;
  for (int i = 0; i < points; ++i) {
    double la = std::log(a_min) +
                (std::log(a_max) - std::log(a_min)) * i / (points - 1);
    double a = std::exp(la);
    double b = shoot(a, limiter, 1e-9).b;
    rep.a_values.push_back(a);
    rep.b_values.push_back(b);
    if (b < best) {
      best = b;
      best_la = la;
    }
  }
  auto [la, negb] = golden_max(
      [&](double l) { return -shoot(std::exp(l), limiter, 1e-9).b; },
      best_la - 1.5, best_la + 1.5, 1e-6);
  rep.inf_b = std::min(best, -negb);
  rep.inf_mass = 2.0 * M_PI * rep.inf_b;
  rep.margin = rep.inf_mass / rep.M_star - 1.0;
  return rep;
}

// ---------------------------------------------------------------------------
// d > 2 nonexistence probe: integrate (in r, no compactification)
//   v' = r^{d-1} rho,   rho' = -rho (v/r^{d-1}) phi(v/r^{d-1}),
// and report cumulative-mass growth plus the rho >= a e^{-A_inf r} bound.
// ---------------------------------------------------------------------------

struct GrowthReport {
  int d = 3;
  double a = 1.0;
  double r_max = 50.0;
  double v_at_rmax = 0.0;
  double v_at_2rmax = 0.0;
  double growth_ratio = 0.0;       // v(2 r_max) / v(r_max)
  double min_rho_over_bound = 0.0; // min of rho / (a e^{-A_inf r})
};

inline GrowthReport nonexistence_probe_d_gt_2(int d, double a,
                                              const FluxLimiter& limiter,
                                              double r_max = 50.0) {
  if (d < 3)
    throw std::invalid_argument("nonexistence_probe_d_gt_2: d must be >= 3");
  GrowthReport rep;
  rep.d = d;
  rep.a = a;
  rep.r_max = r_max;
  if (a == 0.0) return rep;  // identically zero trajectory

  const double a_inf = limiter.a_inf;
  auto rhs = [&](double r, const std::array<double, 2>& s,
                 std::array<double, 2>& ds) {
    double v = s[0], rho = s[1];
    double w = std::pow(r, d - 1);
    double x = v / w;
    ds[0] = w * rho;
    ds[1] = -rho * x * limiter(x);
  };
  const double r0 = 1e-6;
  std::array<double, 2> s{a * std::pow(r0, d) / d, a};
  OdeOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-14 * a;
  opt.h_init = r0;
  double min_ratio = std::numeric_limits<double>::infinity();
  rk45_integrate<2>(rhs, r0, r_max, s, opt,
                    [&](double r, const std::array<double, 2>& st) {
                      double bound = a * std::exp(-a_inf * r);
                      min_ratio = std::min(min_ratio, st[1] / bound);
                    });
  rep.v_at_rmax = s[0];
  rk45_integrate<2>(rhs, r_max, 2.0 * r_max, s, opt,
                    [&](double r, const std::array<double, 2>& st) {
                      double bound = a * std::exp(-a_inf * r);
                      min_ratio = std::min(min_ratio, st[1] / bound);
                    });
  rep.v_at_2rmax = s[0];
  rep.growth_ratio = rep.v_at_2rmax / rep.v_at_rmax;
  rep.min_rho_over_bound = min_ratio;
  return rep;
}

// ---------------------------------------------------------------------------
// 1D steady state: ubar' = Phi(M/2) - Phi(ubar), ubar(0) = 0, so that
// ubar(x) = A^{-1}(x) with the A(0) = 0 normalization.
// ---------------------------------------------------------------------------

struct Steady1DResult {
  std::vector<double> u;   // node values on the grid (n+1 nodes)
  bool tail_truncated = false;
};

inline Steady1DResult steady_1d(const ScalarChain& chain, const Grid1D& g) {
  Steady1DResult out;
  const int n = g.n;
  out.u.resize(n + 1);
  const double half = 0.5 * chain.mass();
  const double tiny = half * 1e-15;
  for (int i = 0; i <= n; ++i) {
    double x = -g.L + i * (2.0 * g.L / g.n);
    double u = chain.A_inv(x);
    if (std::abs(u) >= half - 2.0 * tiny) out.tail_truncated = true;
    out.u[i] = u;
  }
  return out;
}

}  // namespace flks
