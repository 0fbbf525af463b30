#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace flks {

struct numerics_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes and weights on [-1,1], Newton iteration on P_n.
// ---------------------------------------------------------------------------
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess for the i-th root.
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

// ---------------------------------------------------------------------------
// Tridiagonal (Thomas) solve: a=sub, b=diag, c=super. Overwrites nothing.
// ---------------------------------------------------------------------------
inline std::vector<double> tridiag_solve(std::span<const double> a,
                                         std::span<const double> b,
                                         std::span<const double> c,
                                         std::span<const double> d) {
  const std::size_t n = b.size();
  std::vector<double> cp(n), dp(n), x(n);
  cp[0] = c[0] / b[0];
  dp[0] = d[0] / b[0];
  for (std::size_t i = 1; i < n; ++i) {
    double m = b[i] - a[i] * cp[i - 1];
    cp[i] = (i + 1 < n) ? c[i] / m : 0.0;
    dp[i] = (d[i] - a[i] * dp[i - 1]) / m;
  }
  x[n - 1] = dp[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
  return x;
}

// Cyclic tridiagonal via Sherman-Morrison; alpha = corner (n-1,0), beta = (0,n-1).
inline std::vector<double> cyclic_tridiag_solve(std::span<const double> a,
                                                std::span<const double> b,
                                                std::span<const double> c,
                                                double alpha, double beta,
                                                std::span<const double> d) {
  const std::size_t n = b.size();
  if (n < 3) throw std::invalid_argument("cyclic_tridiag_solve: n must be >= 3");
  const double gamma = -b[0];
  std::vector<double> bb(b.begin(), b.end());
  bb[0] -= gamma;
  bb[n - 1] -= alpha * beta / gamma;
  std::vector<double> x = tridiag_solve(a, bb, c, d);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  std::vector<double> z = tridiag_solve(a, bb, c, u);
  double fact = (x[0] + beta * x[n - 1] / gamma) /
                (1.0 + z[0] + beta * z[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
  return x;
}

// ---------------------------------------------------------------------------
// Adaptive Simpson quadrature.
// ---------------------------------------------------------------------------
namespace detail {
inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

inline double integrate_adaptive(const std::function<double(double)>& f,
                                 double a, double b, double tol = 1e-11,
                                 int max_depth = 55) {
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// ---------------------------------------------------------------------------
// Brent root finding on a bracketing interval.
// ---------------------------------------------------------------------------
inline double brent(const std::function<double(double)>& f, double a, double b,
                    double tol = 1e-13, int max_iter = 200) {
  double fa = f(a), fb = f(b);
  if (fa * fb > 0.0) throw numerics_error("brent: root not bracketed");
  if (std::abs(fa) < std::abs(fb)) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  double c = a, fc = fa, s = b, fs = fb, d = 0.0;
  bool mflag = true;
  for (int it = 0; it < max_iter; ++it) {
    if (fb == 0.0 || std::abs(b - a) < tol) return b;
    if (fa != fc && fb != fc) {
      s = a * fb * fc / ((fa - fb) * (fa - fc)) +
          b * fa * fc / ((fb - fa) * (fb - fc)) +
          c * fa * fb / ((fc - fa) * (fc - fb));
    } else {
      s = b - fb * (b - a) / (fb - fa);
    }
    double lo = 0.25 * (3.0 * a + b), hi = b;
    if (lo > hi) std::swap(lo, hi);
    bool cond = (s < lo || s > hi) ||
                (mflag && std::abs(s - b) >= 0.5 * std::abs(b - c)) ||
                (!mflag && std::abs(s - b) >= 0.5 * std::abs(c - d)) ||
                (mflag && std::abs(b - c) < tol) ||
                (!mflag && std::abs(c - d) < tol);
    if (cond) {
      s = 0.5 * (a + b);
      mflag = true;
    } else {
      mflag = false;
    }
    fs = f(s);
    d = c;
    c = b;
    fc = fb;
    if (fa * fs < 0.0) {
      b = s;
      fb = fs;
    } else {
      a = s;
      fa = fs;
    }
    if (std::abs(fa) < std::abs(fb)) {
      std::swap(a, b);
      std::swap(fa, fb);
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// Golden-section maximization of f on [a,b].
// ---------------------------------------------------------------------------
inline std::pair<double, double> golden_max(
    const std::function<double(double)>& f, double a, double b,
    double tol = 1e-10, int max_iter = 300) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  double xm = 0.5 * (a + b);
  return {xm, f(xm)};
}

// ---------------------------------------------------------------------------
// Adaptive embedded Runge-Kutta (Cash-Karp 4(5)) for small ODE systems.
// ---------------------------------------------------------------------------
struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double h_init = 1e-6;
  double h_min = 1e-15;
  std::size_t max_steps = 5'000'000;
};

// Integrates y' = f(t, y) from t0 to t1. The observer (optional) is called
// after every accepted step. Returns false if the step size underflowed
// before reaching t1.
template <std::size_t N, typename F, typename Obs>
bool rk45_integrate(F&& f, double t0, double t1, std::array<double, N>& y,
                    const OdeOptions& opt, Obs&& observer) {
  static constexpr double a2 = 1.0 / 5, a3 = 3.0 / 10, a4 = 3.0 / 5, a5 = 1.0,
                          a6 = 7.0 / 8;
  static constexpr double b21 = 1.0 / 5;
  static constexpr double b31 = 3.0 / 40, b32 = 9.0 / 40;
  static constexpr double b41 = 3.0 / 10, b42 = -9.0 / 10, b43 = 6.0 / 5;
  static constexpr double b51 = -11.0 / 54, b52 = 5.0 / 2, b53 = -70.0 / 27,
                          b54 = 35.0 / 27;
  static constexpr double b61 = 1631.0 / 55296, b62 = 175.0 / 512,
                          b63 = 575.0 / 13824, b64 = 44275.0 / 110592,
                          b65 = 253.0 / 4096;
  static constexpr double c1 = 37.0 / 378, c3 = 250.0 / 621, c4 = 125.0 / 594,
                          c6 = 512.0 / 1771;
  static constexpr double d1 = c1 - 2825.0 / 27648, d3 = c3 - 18575.0 / 48384,
                          d4 = c4 - 13525.0 / 55296, d5 = -277.0 / 14336,
                          d6 = c6 - 1.0 / 4;

  double t = t0;
  double h = opt.h_init * ((t1 > t0) ? 1.0 : -1.0);
  std::array<double, N> k1, k2, k3, k4, k5, k6, ytmp, ynew;
  for (std::size_t step = 0; step < opt.max_steps; ++step) {
    if ((t1 - t) * ((t1 > t0) ? 1.0 : -1.0) <= 0.0) return true;
    if (std::abs(h) > std::abs(t1 - t)) h = t1 - t;
    f(t, y, k1);
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * b21 * k1[i];
    f(t + a2 * h, ytmp, k2);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (b31 * k1[i] + b32 * k2[i]);
    f(t + a3 * h, ytmp, k3);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (b41 * k1[i] + b42 * k2[i] + b43 * k3[i]);
    f(t + a4 * h, ytmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] =
          y[i] + h * (b51 * k1[i] + b52 * k2[i] + b53 * k3[i] + b54 * k4[i]);
    f(t + a5 * h, ytmp, k5);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (b61 * k1[i] + b62 * k2[i] + b63 * k3[i] +
                            b64 * k4[i] + b65 * k5[i]);
    f(t + a6 * h, ytmp, k6);
    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      ynew[i] =
          y[i] + h * (c1 * k1[i] + c3 * k3[i] + c4 * k4[i] + c6 * k6[i]);
      double e = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                      d6 * k6[i]);
      double sc = opt.abs_tol +
                  opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(e) / sc);
    }
    if (err <= 1.0) {
      t += h;
      y = ynew;
      observer(t, y);
      double fac = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
      h *= std::min(5.0, std::max(0.2, fac));
    } else {
      h *= std::max(0.1, 0.9 * std::pow(err, -0.25));
    }
    if (std::abs(h) < opt.h_min) return false;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Least-squares line fit: returns (slope, intercept, stderr of slope).
// ---------------------------------------------------------------------------
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n)
    throw std::invalid_argument("fit_line: need >= 2 matched samples");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  if (n > 2) {
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = y[i] - (out.intercept + out.slope * x[i]);
      ss += r * r;
    }
    out.slope_stderr = std::sqrt(ss / ((n - 2) * sxx));
  }
  return out;
}

}  // namespace flks
