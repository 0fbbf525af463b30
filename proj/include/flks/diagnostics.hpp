#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "flks/chain.hpp"
#include "flks/macro.hpp"
#include "flks/numerics.hpp"

namespace flks {

struct EntropyReport {
  double t = 0.0;
  double E = 0.0;
  double Ddiss = 0.0;
  double W2_cdf = 0.0;
  double W2_quantile = 0.0;
};

/// Lyapunov functional E = int int_{ubar}^{u} (A(v) - A(ubar)) dv dx on
/// matched node grids, evaluated per cell through the tabulated primitive of
/// A. Values are clamped to the open domain so pinned boundary nodes
/// (|u| = M/2 in floating point) contribute their vanishing sliver without a
/// domain trip.
inline double entropy(const std::vector<double>& u,
                      const std::vector<double>& ubar,
                      const ScalarChain& chain, double dx) {
  if (u.size() != ubar.size())
    throw std::invalid_argument("entropy: field sizes differ");
  const double half = 0.5 * chain.mass();
  const double edge = half * (1.0 - 1e-14);
  auto clamp = [edge](double v) { return std::clamp(v, -edge, edge); };
  double E = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double lo = clamp(ubar[i]), hi = clamp(u[i]);
    if (lo == hi) continue;
    // A odd makes its primitive even, so A_primitive(|.|) is the primitive
    double cell = chain.A_primitive(hi) - chain.A_primitive(lo) -
                  chain.A(lo) * (hi - lo);
    E += cell * dx;
  }
  if (E < 0.0 && E > -1e-12) E = 0.0;
  return E;
}

/// Dissipation integral int (Phi(M/2) - Phi(u)) |d/dx (A(u)-A(ubar))|^2 dx,
/// face-centered differences with the positive gap evaluated at faces.
inline double dissipation(const std::vector<double>& u,
                          const std::vector<double>& ubar,
                          const ScalarChain& chain, double dx) {
  if (u.size() != ubar.size())
    throw std::invalid_argument("dissipation: field sizes differ");
  const double half = 0.5 * chain.mass();
  const double edge = half * (1.0 - 1e-14);
  auto clamp = [edge](double v) { return std::clamp(v, -edge, edge); };
  double D = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    double a0 = chain.A(clamp(u[i])), a1 = chain.A(clamp(u[i + 1]));
    double b0 = chain.A(clamp(ubar[i])), b1 = chain.A(clamp(ubar[i + 1]));
    double diff = ((a1 - b1) - (a0 - b0)) / dx;
    double uf = 0.5 * (u[i] + u[i + 1]);
    D += chain.gap(uf) * diff * diff * dx;
  }
  return D;
}

// ---------------------------------------------------------------------------
// 1D Wasserstein-2 diagnostics, both formulas side by side: the cumulative
// (CDF) form ||u - ubar||_{L^2} and the standard quantile representation.
// ---------------------------------------------------------------------------

struct W2Pair {
  double cdf = 0.0;
  double quantile = 0.0;
};

namespace detail {

/// Generalized inverse of the piecewise-linear CDF built from cell densities.
inline double quantile_of(const std::vector<double>& cdf_nodes,
                          const std::vector<double>& x_nodes, double m) {
  // binary search on the nondecreasing cdf
  std::size_t lo = 0, hi = cdf_nodes.size() - 1;
  if (m <= cdf_nodes.front()) return x_nodes.front();
  if (m >= cdf_nodes.back()) return x_nodes.back();
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    (cdf_nodes[mid] <= m ? lo : hi) = mid;
  }
  double c0 = cdf_nodes[lo], c1 = cdf_nodes[hi];
  if (c1 == c0) return x_nodes[lo];
  double t = (m - c0) / (c1 - c0);
  return x_nodes[lo] + t * (x_nodes[hi] - x_nodes[lo]);
}

}  // namespace detail

/// rho and rhobar are cell densities on the same uniform grid with spacing
/// dx starting at x0 (cell centers). Masses must agree to 1e-8 relative;
/// small mismatches are renormalized.
inline W2Pair wasserstein_1d(std::vector<double> rho,
                             std::vector<double> rhobar, double dx,
                             double x0) {
  if (rho.size() != rhobar.size())
    throw std::invalid_argument("wasserstein_1d: field sizes differ");
  double m1 = 0.0, m2 = 0.0;
  for (double v : rho) m1 += v * dx;
  for (double v : rhobar) m2 += v * dx;
  if (m1 <= 0.0 || m2 <= 0.0)
    throw std::invalid_argument("wasserstein_1d: nonpositive mass");
  if (std::abs(m1 - m2) > 1e-8 * std::max(m1, m2))
    throw std::invalid_argument(
        "wasserstein_1d: mass mismatch beyond tolerance (" +
        std::to_string(m1) + " vs " + std::to_string(m2) + ")");
  double M = m1;
  for (double& v : rhobar) v *= m1 / m2;

  const std::size_t n = rho.size();
  // cumulative functions at cell faces
  std::vector<double> F1(n + 1, 0.0), F2(n + 1, 0.0), xf(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    F1[i + 1] = F1[i] + rho[i] * dx;
    F2[i + 1] = F2[i] + rhobar[i] * dx;
  }
  for (std::size_t i = 0; i <= n; ++i) xf[i] = x0 - 0.5 * dx + i * dx;

  W2Pair out;
  // CDF form: L2 norm of the difference of shifted cumulative functions
  double s = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    double d = F1[i] - F2[i];
    s += d * d * dx;
  }
  out.cdf = std::sqrt(s);

  // quantile form: L2(dm) norm of the difference of generalized inverses
  const int q = 20 * static_cast<int>(n);
  double sq = 0.0;
  for (int k = 0; k < q; ++k) {
    double m = M * (k + 0.5) / q;
    double d = detail::quantile_of(F1, xf, m) - detail::quantile_of(F2, xf, m);
    sq += d * d * (M / q);
  }
  out.quantile = std::sqrt(sq);
  return out;
}

// ---------------------------------------------------------------------------
// Norms and decay-rate fits
// ---------------------------------------------------------------------------

/// Grid-weighted L^p norm; p = infinity is the cell max. The p <= 1 range is
/// rejected here (mass has its own accessor).
inline double lp_norm(const std::vector<double>& rho, double p, double cell) {
  if (!(p > 1.0))
    throw std::invalid_argument("lp_norm: need p > 1 (or p = inf)");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : rho) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (double v : rho) s += std::pow(std::abs(v), p) * cell;
  return std::pow(s, 1.0 / p);
}

/// Radial L^p norm with d-dimensional cell measures.
inline double lp_norm_radial(const std::vector<double>& rho, double p,
                             const RadialGrid& g) {
  if (!(p > 1.0))
    throw std::invalid_argument("lp_norm_radial: need p > 1 (or p = inf)");
  double sphere = (g.d == 2) ? 2.0 * M_PI
                             : 4.0 * M_PI;  // |S^{d-1}|, d = 2 or 3
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : rho) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (int i = 0; i < g.n; ++i)
    s += std::pow(std::abs(rho[i]), p) * sphere * g.cell_measure(i);
  return std::pow(s, 1.0 / p);
}

/// Least-squares slope of log(norm) vs log(t) inside [t_lo, t_hi].
inline LineFit decay_fit(const std::vector<double>& t,
                         const std::vector<double>& norm, double t_lo,
                         double t_hi) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (!(norm[i] > 0.0))
      throw std::invalid_argument("decay_fit: nonpositive sample at t = " +
                                  std::to_string(t[i]));
    lx.push_back(std::log(t[i]));
    ly.push_back(std::log(norm[i]));
  }
  if (lx.size() < 8)
    throw std::invalid_argument("decay_fit: need >= 8 samples in the window");
  return fit_line(lx, ly);
}

}  // namespace flks
