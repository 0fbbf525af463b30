#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "flks/limiter.hpp"
#include "flks/macro.hpp"
#include "flks/numerics.hpp"
#include "flks/response.hpp"
#include "flks/velocity_space.hpp"

namespace flks {

// ---------------------------------------------------------------------------
// Rescaled kinetic solver on a 1D periodic domain:
//   eps^2 df/dt + eps v df/dx
//     = lambda0 int (f' - f) dv' + chi eps int (Psi* f' - Psi f) dv'
// with Psi evaluated at eps dS/dt + v dS/dx (the time term drops for tau=0).
// Splitting: upwind transport at speed v/eps, exact integrating-factor
// relaxation toward the velocity average, explicit modulation.
// ---------------------------------------------------------------------------

struct KineticParams {
  double epsilon = 0.1;
  double lambda0 = 1.0;
  double chi = 1.0;
  double alpha = 1.0;
  int tau = 0;
  ResponseFunction psi = ResponseFunction::make_algebraic();
  bool psi_zero = false;  // Psi == 0 short-circuit (pure velocity jump)
};

struct KineticState {
  std::vector<double> f;  // nx * nv, x-major
  std::vector<double> S;
  double t = 0.0;
};

class KineticSolver {
 public:
  KineticSolver(double domain_length, int nx, VelocitySpace vel,
                KineticParams params)
      : Lx_(domain_length), nx_(nx), vel_(std::move(vel)), p_(params) {
    if (p_.epsilon <= 0.0 || p_.lambda0 <= 0.0 || p_.chi <= 0.0)
      throw std::invalid_argument("KineticSolver: eps, lambda0, chi must be > 0");
    vel_.check_symmetry();
    dx_ = Lx_ / nx_;
    nv_ = static_cast<int>(vel_.size());
    vmax_ = 0.0;
    for (auto& v : vel_.nodes) vmax_ = std::max(vmax_, std::abs(v[0]));
  }

  double dx() const { return dx_; }
  int nx() const { return nx_; }
  int nv() const { return nv_; }
  const VelocitySpace& velocity() const { return vel_; }

  /// dt ceiling of the stability contract.
  double dt_max() const {
    double transport = p_.epsilon * dx_ / vmax_;
    double modulation = p_.epsilon * p_.epsilon / (p_.lambda0 * vel_.measure);
    return 0.9 * std::min(transport, modulation);
  }

  KineticState make_equilibrium_state(
      const std::function<double(double)>& rho0) const {
    KineticState st;
    st.f.assign(static_cast<std::size_t>(nx_) * nv_, 0.0);
    for (int i = 0; i < nx_; ++i) {
      double r = rho0((i + 0.5) * dx_);
      for (int j = 0; j < nv_; ++j) st.f[i * nv_ + j] = r / vel_.measure;
    }
    if (p_.alpha > 0.0)
      st.S = chemical_elliptic_periodic(density(st), p_.alpha, dx_);
    else
      st.S.assign(nx_, 0.0);
    return st;
  }

  std::vector<double> density(const KineticState& st) const {
    std::vector<double> rho(nx_, 0.0);
    for (int i = 0; i < nx_; ++i) {
      double s = 0.0;
      for (int j = 0; j < nv_; ++j) s += vel_.weights[j] * st.f[i * nv_ + j];
      rho[i] = s;
    }
    return rho;
  }

  /// Rescaled first moment J_eps = (1/eps) int v f dv per cell.
  std::vector<double> flux(const KineticState& st) const {
    std::vector<double> J(nx_, 0.0);
    for (int i = 0; i < nx_; ++i) {
      double s = 0.0;
      for (int j = 0; j < nv_; ++j)
        s += vel_.weights[j] * vel_.nodes[j][0] * st.f[i * nv_ + j];
      J[i] = s / p_.epsilon;
    }
    return J;
  }

  double mass(const KineticState& st) const {
    double m = 0.0;
    for (int i = 0; i < nx_; ++i)
      for (int j = 0; j < nv_; ++j) m += vel_.weights[j] * st.f[i * nv_ + j];
    return m * dx_;
  }

  std::vector<double> solve_chemical(const std::vector<double>& rho,
                                     const std::vector<double>& S_prev,
                                     double dt) const {
    if (p_.tau == 0) return chemical_elliptic_periodic(rho, p_.alpha, dx_);
    // tau = 1: backward Euler on the periodic grid
    const int n = nx_;
    double k = 1.0 / (dx_ * dx_), idt = 1.0 / dt;
    std::vector<double> a(n, -k), b(n, idt + p_.alpha + 2.0 * k), c(n, -k),
        d(n);
    for (int i = 0; i < n; ++i) d[i] = rho[i] + idt * S_prev[i];
    return cyclic_tridiag_solve(a, b, c, -k, -k, d);
  }

  /// One split step. S_prev (for tau=1) supplies the backward difference of
  /// dS/dt entering the pathway derivative.
  void step(KineticState& st, double dt) {
    if (dt > dt_max() * (1.0 + 1e-12))
      throw scheme_error("kinetic step: dt " + std::to_string(dt) +
                         " above stability ceiling " + std::to_string(dt_max()));
    const double eps = p_.epsilon;

    // (i) upwind transport at speed v/eps, periodic
    buf_.assign(st.f.size(), 0.0);
    for (int j = 0; j < nv_; ++j) {
      double c = vel_.nodes[j][0] / eps;
      double cfl = c * dt / dx_;
      if (c >= 0.0) {
        for (int i = 0; i < nx_; ++i) {
          int im = (i - 1 + nx_) % nx_;
          buf_[i * nv_ + j] =
              st.f[i * nv_ + j] - cfl * (st.f[i * nv_ + j] - st.f[im * nv_ + j]);
        }
      } else {
        for (int i = 0; i < nx_; ++i) {
          int ip = (i + 1) % nx_;
          buf_[i * nv_ + j] =
              st.f[i * nv_ + j] - cfl * (st.f[ip * nv_ + j] - st.f[i * nv_ + j]);
        }
      }
    }
    st.f.swap(buf_);

    // chemical field update (and dS/dt for tau=1)
    std::vector<double> rho = density(st);
    std::vector<double> S_new = solve_chemical(rho, st.S, dt);
    std::vector<double> dSdt(nx_, 0.0);
    if (p_.tau == 1 && !st.S.empty())
      for (int i = 0; i < nx_; ++i) dSdt[i] = (S_new[i] - st.S[i]) / dt;
    st.S = std::move(S_new);

    // (ii) exact relaxation toward the velocity average at rate
    // lambda0 |V| / eps^2
    const double decay =
        std::exp(-p_.lambda0 * vel_.measure * dt / (eps * eps));
    for (int i = 0; i < nx_; ++i) {
      double avg = rho[i] / vel_.measure;
      for (int j = 0; j < nv_; ++j) {
        double& f = st.f[i * nv_ + j];
        f = avg + (f - avg) * decay;
      }
    }

    // (iii) explicit modulation source, chi/eps (m - |V| Psi f), where
    // m = int Psi(v' dS/dx) f' dv'; velocity average vanishes exactly.
    if (!p_.psi_zero) {
      std::vector<double> gradS(nx_);
      for (int i = 0; i < nx_; ++i) {
        int ip = (i + 1) % nx_, im = (i - 1 + nx_) % nx_;
        gradS[i] = (st.S[ip] - st.S[im]) / (2.0 * dx_);
      }
      psi_vals_.resize(nv_);
      const double fac = p_.chi * dt / eps;
      for (int i = 0; i < nx_; ++i) {
        double m = 0.0;
        for (int j = 0; j < nv_; ++j) {
          double arg = eps * dSdt[i] + vel_.nodes[j][0] * gradS[i];
          psi_vals_[j] = p_.psi.eval(arg);
          m += vel_.weights[j] * psi_vals_[j] * st.f[i * nv_ + j];
        }
        for (int j = 0; j < nv_; ++j)
          st.f[i * nv_ + j] +=
              fac * (m - vel_.measure * psi_vals_[j] * st.f[i * nv_ + j]);
      }
    }
    // validity checks
    for (double f : st.f) {
      if (!std::isfinite(f))
        throw scheme_error("kinetic step: NaN detected; divergence");
      if (f < -1e-12)
        throw scheme_error("kinetic step: negative f " + std::to_string(f) +
                           "; reduce dt");
    }
    st.t += dt;
  }

 private:
  double Lx_;
  int nx_;
  VelocitySpace vel_;
  KineticParams p_;
  double dx_ = 0.0;
  int nv_ = 0;
  double vmax_ = 0.0;
  std::vector<double> buf_, psi_vals_;
};

// ---------------------------------------------------------------------------
// Epsilon sweep harness
// ---------------------------------------------------------------------------

struct SweepRow {
  double epsilon = 0.0;
  double error = 0.0;   // L2 distance to the FLKS reference at T
  bool failed = false;
  std::string note;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::vector<double> ratios;  // e(k)/e(k+1)
};

}  // namespace flks
