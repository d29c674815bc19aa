#pragma once

// Quadrature and summation primitives shared by the form engines.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pdouglas/errors.hpp"

namespace pdouglas {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Fixed-order pairwise summation. The result depends only on the order of
/// `values`, never on threading, so reports are bit-reproducible.
inline double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

/// Nodes and weights of a quadrature rule on a reference interval.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

/// Composite rule on [lo, hi]: `panels` equal panels, each with `base`.
inline QuadratureRule composite_rule(const QuadratureRule& base, double lo, double hi, int panels) {
  QuadratureRule out;
  const double width = (hi - lo) / panels;
  for (int k = 0; k < panels; ++k) {
    const double a = lo + k * width;
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
      out.nodes.push_back(a + 0.5 * width * (base.nodes[i] + 1.0));
      out.weights.push_back(0.5 * width * base.weights[i]);
    }
  }
  return out;
}

/// Rule on [0, length] with panels graded geometrically toward 0:
/// [0, L 2^{1-P}], [L 2^{1-P}, L 2^{2-P}], ..., [L/2, L].
inline QuadratureRule graded_rule(const QuadratureRule& base, double length, int panels) {
  QuadratureRule out;
  double hi = length;
  std::vector<std::pair<double, double>> spans;
  for (int k = 0; k < panels; ++k) {
    const double lo = (k == panels - 1) ? 0.0 : 0.5 * hi;
    spans.emplace_back(lo, hi);
    hi = lo;
  }
  for (auto it = spans.rbegin(); it != spans.rend(); ++it) {
    const double width = it->second - it->first;
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
      out.nodes.push_back(it->first + 0.5 * width * (base.nodes[i] + 1.0));
      out.weights.push_back(0.5 * width * base.weights[i]);
    }
  }
  return out;
}

/// Integral with an a-posteriori error estimate.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

/// Trapezoid rule for a 2π-periodic integrand with node doubling until two
/// successive levels agree to `tol * max(1, |I|)`.
inline Estimate periodic_integrate(const std::function<double(double)>& f, double tol = 1e-13,
                                   int initial_nodes = 64, int max_nodes = 1 << 20) {
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(initial_nodes));
  int m = initial_nodes;
  for (int j = 0; j < m; ++j) samples.push_back(f(kTwoPi * j / m));
  double previous = kTwoPi * pairwise_sum(samples) / m;
  while (true) {
    const int m2 = 2 * m;
    if (m2 > max_nodes) {
      throw AccuracyError("periodic quadrature did not converge",
                          {"nodes=" + std::to_string(m), "value=" + std::to_string(previous)});
    }
    std::vector<double> merged;
    merged.reserve(static_cast<std::size_t>(m2));
    for (int j = 0; j < m; ++j) {
      merged.push_back(samples[static_cast<std::size_t>(j)]);
      merged.push_back(f(kTwoPi * (2 * j + 1) / m2));
    }
    samples = std::move(merged);
    m = m2;
    const double current = kTwoPi * pairwise_sum(samples) / m;
    const double err = std::abs(current - previous);
    if (err <= tol * std::max(1.0, std::abs(current))) return {current, err, m};
    previous = current;
  }
}

/// Polynomial extrapolation of samples f(h_k) to h = 0 (Neville's scheme).
/// The error indicator is the change caused by adding the coarsest sample.
inline Estimate extrapolate_to_zero(std::span<const double> h, std::span<const double> f) {
  if (h.size() != f.size() || h.empty()) {
    throw InvalidArgument("extrapolate_to_zero: mismatched or empty samples");
  }
  std::vector<double> t(f.begin(), f.end());
  const std::size_t n = h.size();
  double previous = t[n - 1];
  for (std::size_t level = 1; level < n; ++level) {
    previous = t[n - 1];
    // Descending sweep: t[i-1] still holds the lower-level extrapolant.
    for (std::size_t i = n - 1; i >= level; --i) {
      const double h_far = h[i - level];
      const double h_near = h[i];
      t[i] = (h_far * t[i] - h_near * t[i - 1]) / (h_far - h_near);
      if (i == level) break;
    }
  }
  const double value = t[n - 1];
  return {value, std::abs(value - previous), static_cast<int>(n)};
}

}  // namespace pdouglas
