#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "flks/numerics.hpp"

namespace flks {

/// Quadrature over a compact, rotationally symmetric velocity set V.
/// Supported geometries: the interval [-c,c] and the disk of radius c.
/// Nodes carry full 2D coordinates (second component zero on intervals);
/// v1 is the component colinear to the chemical gradient in moment
/// integrals.
struct VelocitySpace {
  enum class Geometry { interval, disk };

  Geometry geometry = Geometry::interval;
  double radius = 1.0;
  double measure = 2.0;  // |V|: length or area
  std::vector<std::array<double, 2>> nodes;
  std::vector<double> weights;

  static VelocitySpace interval(double c, int n_nodes = 16) {
    if (c <= 0.0) throw std::invalid_argument("VelocitySpace: radius must be > 0");
    std::vector<double> x, w;
    gauss_legendre(n_nodes, x, w);
    VelocitySpace vs;
    vs.geometry = Geometry::interval;
    vs.radius = c;
    vs.measure = 2.0 * c;
    vs.nodes.reserve(n_nodes);
    vs.weights.reserve(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
      vs.nodes.push_back({c * x[i], 0.0});
      vs.weights.push_back(c * w[i]);
    }
    return vs;
  }

  /// Tensorized polar rule: Gauss-Legendre in radius (Jacobian r folded
  /// into the weight), equispaced midpoint rule in angle (spectrally
  /// accurate for periodic integrands).
  static VelocitySpace disk(double c, int n_radial = 24, int n_angular = 32) {
    if (c <= 0.0) throw std::invalid_argument("VelocitySpace: radius must be > 0");
    if (n_angular % 2 != 0)
      throw std::invalid_argument("VelocitySpace: n_angular must be even");
    std::vector<double> x, w;
    gauss_legendre(n_radial, x, w);
    VelocitySpace vs;
    vs.geometry = Geometry::disk;
    vs.radius = c;
    vs.measure = M_PI * c * c;
    vs.nodes.reserve(static_cast<std::size_t>(n_radial) * n_angular);
    vs.weights.reserve(static_cast<std::size_t>(n_radial) * n_angular);
    const double dtheta = 2.0 * M_PI / n_angular;
    for (int i = 0; i < n_radial; ++i) {
      double r = 0.5 * c * (x[i] + 1.0);
      double wr = 0.5 * c * w[i] * r * dtheta;
      for (int j = 0; j < n_angular; ++j) {
        double theta = (j + 0.5) * dtheta;
        vs.nodes.push_back({r * std::cos(theta), r * std::sin(theta)});
        vs.weights.push_back(wr);
      }
    }
    return vs;
  }

  std::size_t size() const { return nodes.size(); }

  double weight_sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }

  /// First moment of the node set; must vanish for symmetric rules.
  std::array<double, 2> first_moment() const {
    std::array<double, 2> m{0.0, 0.0};
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      m[0] += weights[i] * nodes[i][0];
      m[1] += weights[i] * nodes[i][1];
    }
    return m;
  }

  /// Exact int_V |v1| dv for the supported geometries; the node quadrature
  /// cannot resolve the |v1| kink, and the large-gradient flux plateau needs
  /// this moment exactly.
  double first_abs_moment_v1() const {
    if (geometry == Geometry::interval) return radius * radius;
    return 4.0 * radius * radius * radius / 3.0;
  }

  double second_moment_v1() const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      s += weights[i] * nodes[i][0] * nodes[i][0];
    return s;
  }

  void check_symmetry(double tol = 1e-12) const {
    auto m = first_moment();
    double scale = measure * radius;
    if (std::abs(m[0]) > tol * scale || std::abs(m[1]) > tol * scale)
      throw std::invalid_argument(
          "VelocitySpace: node set breaks rotational symmetry (sum w_i v_i = " +
          std::to_string(m[0]) + ", " + std::to_string(m[1]) + ")");
  }
};

}  // namespace flks
