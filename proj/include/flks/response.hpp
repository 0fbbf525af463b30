#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace flks {

/// Signal response (sensing) function Psi: bounded, C^1, strictly
/// decreasing. Two analytic built-ins plus a tabulated variant backed by
/// monotone cubic interpolation.
struct ResponseFunction {
  enum class Kind { tanh, algebraic, tabulated };

  Kind kind = Kind::algebraic;
  std::function<double(double)> eval;
  std::function<double(double)> deriv;

  static ResponseFunction make_tanh() {
    ResponseFunction r;
    r.kind = Kind::tanh;
    r.eval = [](double z) { return -std::tanh(z); };
    r.deriv = [](double z) {
      double c = std::cosh(z);
      return -1.0 / (c * c);
    };
    return r;
  }

  /// Psi(z) = -z / sqrt(1 + z^2).
  static ResponseFunction make_algebraic() {
    ResponseFunction r;
    r.kind = Kind::algebraic;
    r.eval = [](double z) { return -z / std::sqrt(1.0 + z * z); };
    r.deriv = [](double z) {
      double s = 1.0 + z * z;
      return -1.0 / (s * std::sqrt(s));
    };
    return r;
  }

  /// Tabulated response; values must be strictly decreasing. Interpolation
  /// is Fritsch-Carlson monotone cubic, constant extrapolation outside the
  /// table.
  static ResponseFunction make_tabulated(std::vector<double> z,
                                         std::vector<double> psi);

  /// Samples Psi' on [-span, span] and fails if monotone decrease or
  /// boundedness is violated.
  void validate(double span = 50.0, int samples = 512) const {
    for (int i = 0; i <= samples; ++i) {
      double z = -span + 2.0 * span * i / samples;
      if (!(deriv(z) < 0.0))
        throw std::invalid_argument(
            "ResponseFunction: Psi'(z) >= 0 at z = " + std::to_string(z));
      if (!std::isfinite(eval(z)))
        throw std::invalid_argument("ResponseFunction: Psi unbounded");
    }
  }
};

namespace detail {

struct MonotoneCubic {
  std::vector<double> x, y, m;  // m = node slopes

  double operator()(double xq) const {
    if (xq <= x.front()) return y.front();
    if (xq >= x.back()) return y.back();
    std::size_t i = segment(xq);
    double h = x[i + 1] - x[i];
    double t = (xq - x[i]) / h;
    double t2 = t * t, t3 = t2 * t;
    return y[i] * (2 * t3 - 3 * t2 + 1) + h * m[i] * (t3 - 2 * t2 + t) +
           y[i + 1] * (-2 * t3 + 3 * t2) + h * m[i + 1] * (t3 - t2);
  }

  double derivative(double xq) const {
    if (xq <= x.front()) xq = x.front();
    if (xq >= x.back()) xq = x.back();
    std::size_t i = segment(xq);
    double h = x[i + 1] - x[i];
    double t = (xq - x[i]) / h;
    double t2 = t * t;
    return (y[i] * (6 * t2 - 6 * t) + h * m[i] * (3 * t2 - 4 * t + 1) +
            y[i + 1] * (-6 * t2 + 6 * t) + h * m[i + 1] * (3 * t2 - 2 * t)) /
           h;
  }

  std::size_t segment(double xq) const {
    std::size_t lo = 0, hi = x.size() - 1;
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      (x[mid] <= xq ? lo : hi) = mid;
    }
    return lo;
  }
};

inline MonotoneCubic build_monotone_cubic(std::vector<double> x,
                                          std::vector<double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n)
    throw std::invalid_argument("tabulated response: need >= 2 matched rows");
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double h = x[i + 1] - x[i];
    if (h <= 0.0)
      throw std::invalid_argument("tabulated response: abscissae not increasing");
    d[i] = (y[i + 1] - y[i]) / h;
    if (d[i] >= 0.0)
      throw std::invalid_argument(
          "tabulated response: values not strictly decreasing near z = " +
          std::to_string(x[i]));
  }
  std::vector<double> m(n);
  m[0] = d[0];
  m[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) m[i] = 0.5 * (d[i - 1] + d[i]);
  // Fritsch-Carlson limiter keeps the interpolant monotone.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double a = m[i] / d[i], b = m[i + 1] / d[i];
    double s = a * a + b * b;
    if (s > 9.0) {
      double t = 3.0 / std::sqrt(s);
      m[i] = t * a * d[i];
      m[i + 1] = t * b * d[i];
    }
  }
  MonotoneCubic c;
  c.x = std::move(x);
  c.y = std::move(y);
  c.m = std::move(m);
  return c;
}

}  // namespace detail

inline ResponseFunction ResponseFunction::make_tabulated(
    std::vector<double> z, std::vector<double> psi) {
  auto interp = detail::build_monotone_cubic(std::move(z), std::move(psi));
  ResponseFunction r;
  r.kind = Kind::tabulated;
  r.eval = [interp](double zq) { return interp(zq); };
  r.deriv = [interp](double zq) { return interp.derivative(zq); };
  return r;
}

}  // namespace flks
