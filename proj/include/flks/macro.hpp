#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "flks/chain.hpp"
#include "flks/limiter.hpp"
#include "flks/numerics.hpp"

namespace flks {

struct scheme_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

/// Uniform cell-centered grid on [-L, L].
struct Grid1D {
  double L = 20.0;
  int n = 512;
  double dx() const { return 2.0 * L / n; }
  double x(int i) const { return -L + (i + 0.5) * dx(); }
  double node(int i) const { return -L + i * dx(); }
};

/// Uniform cell-centered radial grid on [0, R]; faces at i*dr.
struct RadialGrid {
  double R = 20.0;
  int n = 400;
  int d = 2;  // spatial dimension (radial symmetry)
  double dr() const { return R / n; }
  double r(int i) const { return (i + 0.5) * dr(); }
  double face(int i) const { return i * dr(); }
  /// Cell volume factor: integral of r^{d-1} over the cell.
  double cell_measure(int i) const {
    double a = face(i), b = face(i + 1);
    return (std::pow(b, d) - std::pow(a, d)) / d;
  }
};

// ---------------------------------------------------------------------------
// Chemical field solvers:  tau dS/dt - Lap S + alpha S = rho
// ---------------------------------------------------------------------------

/// Elliptic solve (-S'' + alpha S = rho) on the 1D no-flux grid.
inline std::vector<double> chemical_elliptic_1d(const std::vector<double>& rho,
                                                double alpha, double dx) {
  if (alpha <= 0.0)
    throw std::invalid_argument(
        "chemical_elliptic_1d: tau=0, alpha=0 unsupported on a bounded 1D grid "
        "(compatibility condition fails); use the whole-line cumulative form");
  const std::size_t n = rho.size();
  std::vector<double> a(n, -1.0 / (dx * dx)), b(n, alpha + 2.0 / (dx * dx)),
      c(n, -1.0 / (dx * dx));
  b[0] = alpha + 1.0 / (dx * dx);
  b[n - 1] = alpha + 1.0 / (dx * dx);
  return tridiag_solve(a, b, c, rho);
}

/// Elliptic solve on a periodic grid (cyclic tridiagonal).
inline std::vector<double> chemical_elliptic_periodic(
    const std::vector<double>& rho, double alpha, double dx) {
  if (alpha <= 0.0)
    throw std::invalid_argument(
        "chemical_elliptic_periodic: tau=0 requires alpha > 0 on a periodic "
        "domain");
  const std::size_t n = rho.size();
  double k = 1.0 / (dx * dx);
  std::vector<double> a(n, -k), b(n, alpha + 2.0 * k), c(n, -k);
  return cyclic_tridiag_solve(a, b, c, -k, -k, rho);
}

/// One backward-Euler step of tau dS/dt - S'' + alpha S = rho (1D no-flux).
inline std::vector<double> chemical_parabolic_step_1d(
    const std::vector<double>& rho, const std::vector<double>& S_prev,
    double alpha, double dx, double dt) {
  const std::size_t n = rho.size();
  double k = 1.0 / (dx * dx), idt = 1.0 / dt;
  std::vector<double> a(n, -k), b(n, idt + alpha + 2.0 * k), c(n, -k), d(n);
  b[0] = idt + alpha + k;
  b[n - 1] = idt + alpha + k;
  for (std::size_t i = 0; i < n; ++i) d[i] = rho[i] + idt * S_prev[i];
  return tridiag_solve(a, b, c, d);
}

/// Radial elliptic solve with r^{d-1} weights and outer Dirichlet S(R)=0.
inline std::vector<double> chemical_elliptic_radial(
    const std::vector<double>& rho, double alpha, const RadialGrid& g) {
  const int n = g.n;
  const double dr = g.dr();
  std::vector<double> a(n), b(n), c(n), d(n);
  for (int i = 0; i < n; ++i) {
    double rw = std::pow(g.r(i), g.d - 1);
    double fm = std::pow(g.face(i), g.d - 1) / (dr * dr);
    double fp = std::pow(g.face(i + 1), g.d - 1) / (dr * dr);
    a[i] = -fm / rw;
    c[i] = -fp / rw;
    b[i] = alpha + (fm + fp) / rw;
    d[i] = rho[i];
  }
  // ghost symmetry at r=0 (fm = 0 there already); Dirichlet beyond R:
  b[n - 1] += std::pow(g.face(n), g.d - 1) / (dr * dr * std::pow(g.r(n - 1), g.d - 1));
  c[n - 1] = 0.0;
  return tridiag_solve(a, b, c, d);
}

/// Face values of S'(r) for alpha = 0, d = 2 by cumulative quadrature:
///   S'(r) = -(1/r) int_0^r s rho(s) ds  (faces 0..n, value 0 at r = 0).
inline std::vector<double> radial_gradient_alpha0(const std::vector<double>& rho,
                                                  const RadialGrid& g) {
  const int n = g.n;
  std::vector<double> grad(n + 1, 0.0);
  double cum = 0.0;
  for (int i = 1; i <= n; ++i) {
    cum += rho[i - 1] * g.cell_measure(i - 1);
    grad[i] = -cum / std::pow(g.face(i), g.d - 1);
  }
  return grad;
}

/// Face values of dS/dx on the 1D whole-line (alpha = 0) model:
///   dS/dx = -u,  u(x) = int_{-L}^x rho - M/2   (Green's function form).
inline std::vector<double> line_gradient_alpha0(const std::vector<double>& rho,
                                                const Grid1D& g) {
  const int n = g.n;
  const double dx = g.dx();
  double M = 0.0;
  for (double v : rho) M += v * dx;
  std::vector<double> grad(n + 1);
  double cum = 0.0;
  grad[0] = 0.5 * M;  // u(-L) = -M/2
  for (int i = 1; i <= n; ++i) {
    cum += rho[i - 1] * dx;
    grad[i] = -(cum - 0.5 * M);
  }
  return grad;
}

// ---------------------------------------------------------------------------
// FLKS density stepper
// ---------------------------------------------------------------------------

struct MacroState {
  std::vector<double> rho;
  std::vector<double> S;  // empty when the chemical field is face-gradient only
  double t = 0.0;
};

inline double total_mass(const std::vector<double>& rho, double cell) {
  double m = 0.0;
  for (double v : rho) m += v * cell;
  return m;
}

namespace detail {

/// Shared finite-volume kernel: implicit diffusion, explicit upwinded drift.
/// face_area[i] is the r^{d-1} weight of face i (1 in 1D), vol[i] the cell
/// measure. grad_faces holds the chemical gradient at faces. periodic wraps
/// both flux and diffusion.
inline void flks_fv_step(std::vector<double>& rho, const std::vector<double>& grad_faces,
                         const std::vector<double>& face_area,
                         const std::vector<double>& vol,
                         const FluxLimiter& limiter, double D, double h,
                         double dt, bool periodic) {
  const int n = static_cast<int>(rho.size());
  // drift CFL check against the limited face speed
  double vmax = 0.0;
  std::vector<double> speed(n + 1, 0.0);
  for (int i = 0; i <= n; ++i) {
    double gmag = std::abs(grad_faces[i]);
    double c = limiter(gmag) * grad_faces[i];
    speed[i] = c;
    vmax = std::max(vmax, std::abs(c));
  }
  if (vmax * dt > 0.9 * h)
    throw scheme_error("flks step: drift CFL violated (max face speed " +
                       std::to_string(vmax) + ", dt = " + std::to_string(dt) +
                       ", dx = " + std::to_string(h) + ")");

  // explicit drift: flux = rho_up * speed at faces
  std::vector<double> flux(n + 1, 0.0);
  for (int i = 0; i <= n; ++i) {
    int il = i - 1, ir = i;
    if (periodic) {
      il = (i - 1 + n) % n;
      ir = i % n;
    } else if (i == 0 || i == n) {
      continue;  // no-flux boundary
    }
    double up = (speed[i] >= 0.0) ? rho[il] : rho[ir];
    flux[i] = up * speed[i];
  }
  std::vector<double> rhs(n);
  for (int i = 0; i < n; ++i) {
    int ip = i + 1;
    rhs[i] = rho[i] -
             dt * (face_area[ip] * flux[ip] - face_area[i] * flux[i]) / vol[i];
  }

  // implicit diffusion: (I - dt D Lap) rho^{n+1} = rhs
  std::vector<double> a(n), b(n), c(n);
  double k = dt * D / (h * h);
  for (int i = 0; i < n; ++i) {
    double fm = (i > 0 || periodic) ? face_area[i] : 0.0;
    double fp = (i < n - 1 || periodic) ? face_area[i + 1] : 0.0;
    a[i] = -k * fm * h / vol[i];
    c[i] = -k * fp * h / vol[i];
    b[i] = 1.0 + k * (fm + fp) * h / vol[i];
  }
  if (periodic) {
    rho = cyclic_tridiag_solve(a, b, c, a[0], c[n - 1], rhs);
  } else {
    rho = tridiag_solve(a, b, c, rhs);
  }
  for (int i = 0; i < n; ++i) {
    if (rho[i] < -1e-12)
      throw scheme_error("flks step: negative density " +
                         std::to_string(rho[i]) + " in cell " +
                         std::to_string(i) + "; reduce dt");
    if (!std::isfinite(rho[i]))
      throw scheme_error("flks step: non-finite density; divergence");
    if (rho[i] < 0.0) rho[i] = 0.0;
  }
}

}  // namespace detail

/// One semi-implicit FLKS step on the 1D grid. grad_faces must hold dS/dx at
/// the n+1 faces (use chemical solvers above, differenced at faces, or the
/// alpha = 0 cumulative forms).
inline void step_flks_density_1d(MacroState& state,
                                 const std::vector<double>& grad_faces,
                                 const FluxLimiter& limiter, double D,
                                 const Grid1D& g, double dt,
                                 bool periodic = false) {
  std::vector<double> area(g.n + 1, 1.0), vol(g.n, g.dx());
  detail::flks_fv_step(state.rho, grad_faces, area, vol, limiter, D, g.dx(),
                       dt, periodic);
  state.t += dt;
}

/// One semi-implicit FLKS step on the radial grid.
inline void step_flks_density_radial(MacroState& state,
                                     const std::vector<double>& grad_faces,
                                     const FluxLimiter& limiter, double D,
                                     const RadialGrid& g, double dt) {
  std::vector<double> area(g.n + 1), vol(g.n);
  for (int i = 0; i <= g.n; ++i) area[i] = std::pow(g.face(i), g.d - 1);
  for (int i = 0; i < g.n; ++i) vol[i] = g.cell_measure(i);
  detail::flks_fv_step(state.rho, grad_faces, area, vol, limiter, D, g.dr(),
                       dt, false);
  state.t += dt;
}

/// Face gradient of a cell-centered chemical field (zero at no-flux ends).
inline std::vector<double> face_gradient(const std::vector<double>& S,
                                         double h) {
  const int n = static_cast<int>(S.size());
  std::vector<double> grad(n + 1, 0.0);
  for (int i = 1; i < n; ++i) grad[i] = (S[i] - S[i - 1]) / h;
  return grad;
}

inline std::vector<double> face_gradient_periodic(const std::vector<double>& S,
                                                  double h) {
  const int n = static_cast<int>(S.size());
  std::vector<double> grad(n + 1, 0.0);
  for (int i = 1; i < n; ++i) grad[i] = (S[i] - S[i - 1]) / h;
  grad[0] = grad[n] = (S[0] - S[n - 1]) / h;
  return grad;
}

// ---------------------------------------------------------------------------
// Mass-coordinate solver:  du/dt = u_xx + d/dx Phi(u),  u(+-L) = +-M/2
// ---------------------------------------------------------------------------

/// Node-based state on [-L, L]: n+1 nodes including the pinned endpoints.
struct MassCoordinateState {
  std::vector<double> u;
  double t = 0.0;
};

inline MassCoordinateState make_mass_coordinate_state(
    const Grid1D& g, const std::function<double(double)>& u0, double M) {
  MassCoordinateState st;
  st.u.resize(g.n + 1);
  for (int i = 0; i <= g.n; ++i) {
    double x = -g.L + i * (2.0 * g.L / g.n);
    st.u[i] = u0(x);
  }
  st.u.front() = -0.5 * M;
  st.u.back() = 0.5 * M;
  // saturating initial data (e.g. tanh far tails) rounds onto +-M/2 in
  // floating point; nudge interior nodes strictly inside the open interval
  const double inner = std::nextafter(0.5 * M, 0.0);
  for (int i = 1; i < g.n; ++i)
    if (std::abs(st.u[i]) >= 0.5 * M)
      st.u[i] = std::copysign(inner, st.u[i]);
  return st;
}

/// Semi-implicit step: implicit diffusion, explicit centered d/dx Phi(u).
/// Interior |u| must stay below M/2; monotonicity is checked after the step.
inline void step_mass_coordinate(MassCoordinateState& state,
                                 const ScalarChain& chain, const Grid1D& g,
                                 double dt, double mono_slack = 1e-12) {
  const int n = g.n;  // n+1 nodes
  const double h = 2.0 * g.L / n;
  const double half = 0.5 * chain.mass();
  std::vector<double>& u = state.u;
  // exact |u| = M/2 at an interior node is a rounding artifact of saturated
  // tails; pull it one ulp inside. Genuine overshoot is a scheme failure.
  for (int i = 1; i < n; ++i) {
    if (std::abs(u[i]) > half)
      throw scheme_error("mass-coordinate step: interior |u| > M/2 at node " +
                         std::to_string(i));
    if (std::abs(u[i]) == half)
      u[i] = std::copysign(std::nextafter(half, 0.0), u[i]);
  }

  std::vector<double> phi_u(n + 1);
  for (int i = 0; i <= n; ++i) phi_u[i] = chain.Phi(u[i]);

  const int m = n - 1;  // interior unknowns
  std::vector<double> a(m), b(m), c(m), d(m);
  double k = dt / (h * h);
  for (int i = 1; i < n; ++i) {
    a[i - 1] = -k;
    c[i - 1] = -k;
    b[i - 1] = 1.0 + 2.0 * k;
    d[i - 1] = u[i] + dt * (phi_u[i + 1] - phi_u[i - 1]) / (2.0 * h);
  }
  d[0] += k * u[0];
  d[m - 1] += k * u[n];
  std::vector<double> sol = tridiag_solve(a, b, c, d);
  const double ulp_guard = half * (1.0 + 8.0 * 2.2e-16);
  for (int i = 1; i < n; ++i) {
    double v = sol[i - 1];
    // the solve can land a saturated tail node an ulp past +-M/2; fold
    // roundoff-level excursions back inside and leave real overshoot alone
    if (std::abs(v) >= half && std::abs(v) <= ulp_guard)
      v = std::copysign(std::nextafter(half, 0.0), v);
    u[i] = v;
  }
  state.t += dt;

  for (int i = 0; i < n; ++i)
    if (u[i + 1] - u[i] < -mono_slack)
      throw scheme_error(
          "mass-coordinate step: monotonicity lost near node " +
          std::to_string(i) + "; reduce dt");
}

/// rho = du/dx by centered differences (one-sided at the pinned ends);
/// negative cells are clipped, total clipped mass is reported through
/// *clipped when non-null.
inline std::vector<double> density_from_u(const MassCoordinateState& state,
                                          const Grid1D& g,
                                          double* clipped = nullptr) {
  const int n = g.n;
  const double h = 2.0 * g.L / n;
  std::vector<double> rho(n + 1);
  rho[0] = (state.u[1] - state.u[0]) / h;
  rho[n] = (state.u[n] - state.u[n - 1]) / h;
  for (int i = 1; i < n; ++i) rho[i] = (state.u[i + 1] - state.u[i - 1]) / (2.0 * h);
  double clip = 0.0;
  for (double& v : rho) {
    if (v < 0.0) {
      clip += -v * h;
      v = 0.0;
    }
  }
  if (clipped) *clipped = clip;
  return rho;
}

}  // namespace flks
