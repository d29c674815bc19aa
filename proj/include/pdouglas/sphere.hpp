#pragma once

// Surface quadrature on the unit sphere in R^3 in coordinates centred on a
// chosen pole, with polar panels graded toward the pole. Integrands that
// concentrate near one boundary point (Poisson kernel from a point close to
// the sphere, Feller kernel) are resolved by putting the pole there.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "pdouglas/kernels.hpp"
#include "pdouglas/numerics.hpp"

namespace pdouglas {

/// Orthonormal frame (e1, e2, pole).
struct Frame {
  Vec e1;
  Vec e2;
  Vec pole;
};

inline Frame frame_with_pole(const Vec& pole_in) {
  const double n = norm(pole_in);
  const Vec pole = n > 0.0 ? (1.0 / n) * pole_in : Vec{0.0, 0.0, 1.0};
  const Vec helper = std::abs(pole[2]) < 0.9 ? Vec{0.0, 0.0, 1.0} : Vec{1.0, 0.0, 0.0};
  Vec e1{helper[1] * pole[2] - helper[2] * pole[1], helper[2] * pole[0] - helper[0] * pole[2],
         helper[0] * pole[1] - helper[1] * pole[0]};
  e1 = (1.0 / norm(e1)) * e1;
  const Vec e2{pole[1] * e1[2] - pole[2] * e1[1], pole[2] * e1[0] - pole[0] * e1[2],
               pole[0] * e1[1] - pole[1] * e1[0]};
  return {e1, e2, pole};
}

/// Quadrature nodes/weights for the sphere around `pole`. The polar angle
/// alpha in (0, pi] uses Gauss-Legendre panels of 8 nodes; the first
/// `graded_panels` panels shrink geometrically from `finest` toward the pole.
struct SphereRule {
  std::vector<Vec> points;
  std::vector<double> weights;
};

inline SphereRule sphere_rule(const Vec& pole, double finest, int graded_panels, int uniform_panels,
                              int azimuth_nodes) {
  static const QuadratureRule base = gauss_legendre(8);
  const Frame f = frame_with_pole(pole);
  std::vector<std::pair<double, double>> spans;
  double lo = 0.0;
  double width = std::min(finest, kPi);
  for (int k = 0; k < graded_panels && lo < kPi; ++k) {
    const double hi = std::min(kPi, lo + width);
    spans.emplace_back(lo, hi);
    lo = hi;
    width *= 2.0;
  }
  if (lo < kPi) {
    const double step = (kPi - lo) / uniform_panels;
    for (int k = 0; k < uniform_panels; ++k) spans.emplace_back(lo + k * step, lo + (k + 1) * step);
  }
  SphereRule rule;
  for (const auto& [a, b] : spans) {
    const double half = 0.5 * (b - a);
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
      const double alpha = a + half * (base.nodes[i] + 1.0);
      const double wa = half * base.weights[i] * std::sin(alpha);
      const double ca = std::cos(alpha);
      const double sa = std::sin(alpha);
      for (int j = 0; j < azimuth_nodes; ++j) {
        const double beta = kTwoPi * j / azimuth_nodes;
        const double cb = std::cos(beta) * sa;
        const double sb = std::sin(beta) * sa;
        rule.points.push_back(cb * f.e1 + sb * f.e2 + ca * f.pole);
        rule.weights.push_back(wa * kTwoPi / azimuth_nodes);
      }
    }
  }
  return rule;
}

/// Rule adapted to the Poisson kernel seen from interior point x.
inline SphereRule sphere_rule_for_point(const Vec& x, int resolution = 2) {
  const double depth = std::max(1.0 - norm(x), 1e-12);
  const int graded = std::max(1, static_cast<int>(std::ceil(std::log2(kPi / (0.25 * depth)))));
  return sphere_rule(x, 0.25 * depth, graded, 2 * resolution, 16 * resolution);
}

inline double integrate_sphere(const SphereRule& rule, const std::function<double(const Vec&)>& f) {
  std::vector<double> terms(rule.points.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = rule.weights[i] * f(rule.points[i]);
  return pairwise_sum(terms);
}

}  // namespace pdouglas
