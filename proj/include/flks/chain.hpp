#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "flks/limiter.hpp"
#include "flks/numerics.hpp"

namespace flks {

struct chain_domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// The scalar chain of the 1D theory for a given limiter phi and mass M:
///   Phi(u)  = int_0^u x phi(|x|) dx          (even, Phi(0) = 0)
///   A(u)    = int_0^u dw / (Phi(M/2) - Phi(w))  on (-M/2, M/2), A(0) = 0
///   A^{-1}  by monotone bracketing root-find.
/// Phi is tabulated once on [0, M/2] by per-panel Gauss quadrature; the gap
/// Phi(M/2) - Phi(u) is stored as a suffix integral so it never suffers
/// cancellation near the endpoints.
class ScalarChain {
 public:
  ScalarChain(FluxLimiter limiter, double mass, int panels = 4096)
      : limiter_(std::move(limiter)), mass_(mass) {
    if (mass <= 0.0) throw std::invalid_argument("ScalarChain: M must be > 0");
    build_tables(panels);
  }

  double mass() const { return mass_; }
  double phi_half() const { return prefix_.back(); }  // Phi(M/2)

  double Phi(double u) const {
    double a = std::abs(u);
    if (a <= half_) return prefix_lookup(a);
    // beyond M/2: extend by direct quadrature from the table edge
    return phi_half() + integrate_adaptive(
                            [this](double x) { return x * limiter_(x); }, half_,
                            a, 1e-13);
  }

  /// Phi(M/2) - Phi(u), computed as a suffix integral (no cancellation).
  double gap(double u) const {
    double a = std::abs(u);
    if (a >= half_) return 0.0;
    return suffix_lookup(a);
  }

  double A(double u) const {
    check_domain(u);
    if (u == 0.0) return 0.0;
    double a = std::abs(u);
    int i = std::min(static_cast<int>(a / dx_), n_ - 1);
    double val = prefixA_[i] +
                 integrate_adaptive([this](double w) { return 1.0 / gap(w); },
                                    i * dx_, a,
                                    1e-13 * std::max(1.0, a / gap(a)));
    return (u > 0.0) ? val : -val;
  }

  /// Primitive int_0^u A(v) dv; even in u and finite up to |u| = M/2 (the
  /// log singularity of A is integrable). Backbone of the entropy integral.
  double A_primitive(double u) const {
    double a = std::min(std::abs(u), half_ * (1.0 - 1e-15));
    int i = std::min(static_cast<int>(a / dx_), n_ - 1);
    // fixed-node partial panel: deterministic, so the quadrature bias is a
    // smooth function of u and cancels in entropy differences
    double lo = i * dx_, s = 0.0;
    if (a > lo) {
      const int sub = 4;
      double hseg = (a - lo) / sub;
      for (int j = 0; j < sub; ++j) {
        double mid = lo + (j + 0.5) * hseg, h = 0.5 * hseg;
        for (std::size_t k = 0; k < gx_.size(); ++k)
          s += h * gw_[k] * A(mid + h * gx_[k]);
      }
    }
    return prefixB_[i] + s;
  }

  /// Derivative of A, i.e. 1/(Phi(M/2) - Phi(u)).
  double A_prime(double u) const {
    check_domain(u);
    return 1.0 / gap(u);
  }

  double A_inv(double x) const {
    if (x == 0.0) return 0.0;
    double tiny = half_ * 1e-15;
    double lo = 0.0, hi = half_ - tiny;
    double ax = std::abs(x);
    if (A(hi) <= ax) return (x > 0.0) ? half_ - tiny : -(half_ - tiny);
    double u = brent([this, ax](double v) { return A(v) - ax; }, lo, hi,
                     1e-14 * half_);
    return (x > 0.0) ? u : -u;
  }

  const FluxLimiter& limiter() const { return limiter_; }

 private:
  void check_domain(double u) const {
    if (std::abs(u) >= half_)
      throw chain_domain_error("ScalarChain: A evaluated at |u| >= M/2 (u = " +
                               std::to_string(u) + ", M/2 = " +
                               std::to_string(half_) + ")");
  }

  void build_tables(int panels) {
    half_ = 0.5 * mass_;
    n_ = panels;
    dx_ = half_ / panels;
    std::vector<double> x5, w5;
    gauss_legendre(7, x5, w5);
    gx_ = x5;
    gw_ = w5;
    std::vector<double> panel(panels);
    for (int i = 0; i < panels; ++i) {
      double a = i * dx_, b = (i + 1) * dx_;
      panel[i] = panel_integral(a, b);
    }
    prefix_.assign(panels + 1, 0.0);
    for (int i = 0; i < panels; ++i) prefix_[i + 1] = prefix_[i] + panel[i];
    suffix_.assign(panels + 1, 0.0);
    for (int i = panels; i-- > 0;) suffix_[i] = suffix_[i + 1] + panel[i];
    // prefix table for A = int 1/gap; stops one panel short of M/2, where
    // the integrand is log-singular and left to the per-call partial panel
    prefixA_.assign(panels, 0.0);
    for (int i = 0; i + 1 < panels; ++i)
      prefixA_[i + 1] =
          prefixA_[i] +
          integrate_adaptive([this](double w) { return 1.0 / gap(w); },
                             i * dx_, (i + 1) * dx_, 1e-14);
    // fixed-node panels for the primitive of A: adaptive refinement here
    // would chase the quadrature noise of A itself and never settle
    prefixB_.assign(panels, 0.0);
    for (int i = 0; i + 1 < panels; ++i) {
      double a = i * dx_, b = (i + 1) * dx_;
      double mid = 0.5 * (a + b), h = 0.5 * (b - a), s = 0.0;
      for (std::size_t k = 0; k < gx_.size(); ++k)
        s += gw_[k] * A(mid + h * gx_[k]);
      prefixB_[i + 1] = prefixB_[i] + h * s;
    }
  }

  double panel_integral(double a, double b) const {
    double mid = 0.5 * (a + b), h = 0.5 * (b - a), s = 0.0;
    for (std::size_t k = 0; k < gx_.size(); ++k) {
      double x = mid + h * gx_[k];
      s += gw_[k] * x * limiter_(x);
    }
    return h * s;
  }

  double prefix_lookup(double a) const {
    int i = std::min(static_cast<int>(a / dx_), n_ - 1);
    return prefix_[i] + panel_partial(i * dx_, a);
  }

  double suffix_lookup(double a) const {
    int i = std::min(static_cast<int>(a / dx_), n_ - 1);
    return suffix_[i] - panel_partial(i * dx_, a);
  }

  double panel_partial(double a, double b) const {
    if (b <= a) return 0.0;
    return panel_integral(a, b);
  }

  FluxLimiter limiter_;
  double mass_ = 0.0;
  double half_ = 0.0;
  double dx_ = 0.0;
  int n_ = 0;
  std::vector<double> prefix_, suffix_, prefixA_, prefixB_;
  std::vector<double> gx_, gw_;
};

/// build_scalar_chain mirrors the operation naming of the module surface.
inline ScalarChain build_scalar_chain(FluxLimiter limiter, double mass) {
  return ScalarChain(std::move(limiter), mass);
}

}  // namespace flks
