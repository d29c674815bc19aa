#pragma once

// Poisson extension u = P_D[g] on the unit disk as a truncated Fourier
// series, with exact gradients and radial traces.

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "pdouglas/boundary.hpp"
#include "pdouglas/errors.hpp"
#include "pdouglas/kernels.hpp"
#include "pdouglas/numerics.hpp"
#include "pdouglas/sphere.hpp"

namespace pdouglas {

/// u(r, theta) = a0 + sum_{n=1..N} r^n (a_n cos n theta + b_n sin n theta).
///
/// Internally u = Re f(z) with f(z) = a0 + sum c_n z^n, c_n = a_n - i b_n, so
/// |grad u|^2 = |f'(z)|^2 holds for every truncation.
class HarmonicDiskFunction {
 public:
  explicit HarmonicDiskFunction(FourierTable coefficients) : table_(std::move(coefficients)) {
    if (table_.a.size() != table_.b.size()) throw InvalidArgument("coefficient arrays differ in length");
    c_.reserve(table_.a.size());
    for (std::size_t n = 0; n < table_.a.size(); ++n) c_.emplace_back(table_.a[n], -table_.b[n]);
  }

  int order() const noexcept { return table_.order(); }
  const FourierTable& coefficients() const noexcept { return table_; }
  double mean() const noexcept { return table_.a0; }

  /// f(z) and f'(z) by Horner's scheme; valid for any complex z.
  std::pair<std::complex<double>, std::complex<double>> analytic(std::complex<double> z) const {
    std::complex<double> f = 0.0;
    std::complex<double> df = 0.0;
    for (std::size_t k = c_.size(); k-- > 0;) {
      df = df * z + f;
      f = f * z + c_[k];
    }
    // f now holds sum c_n z^{n-1}; df holds its derivative.
    return {table_.a0 + f * z, f + df * z};
  }

  double value_xy(double x, double y) const {
    require_interior(x * x + y * y);
    return analytic({x, y}).first.real();
  }

  /// (du/dx, du/dy) = (Re f', -Im f').
  std::array<double, 2> gradient_xy(double x, double y) const {
    require_interior(x * x + y * y);
    const auto df = analytic({x, y}).second;
    return {df.real(), -df.imag()};
  }

  /// Series evaluated on the unit circle (band-limited boundary values).
  double boundary_value(double theta) const { return analytic(std::polar(1.0, theta)).first.real(); }

 private:
  static void require_interior(double r2) {
    if (!(r2 < 1.0)) throw DomainError("harmonic function evaluated at r >= 1; use radial_trace");
  }

  FourierTable table_;
  std::vector<std::complex<double>> c_;
};

/// Default truncation order of Poisson extensions.
inline constexpr int kDefaultOrder = 16;

/// Projects g onto trigonometric polynomials of degree <= order.
///
/// Coefficient tables are truncated; sampled data uses its own grid (which
/// must have M >= 2 order + 2 samples); analytic data is sampled on a
/// power-of-two grid of at least 8 * order points.
inline HarmonicDiskFunction fourier_project(const BoundaryFunction& g, int order = kDefaultOrder) {
  if (order < 1) throw InvalidArgument("fourier_project: order must be >= 1");
  if (const auto* s = g.samples()) {
    if (static_cast<int>(s->size()) < 2 * order + 2) {
      throw AliasingError("fourier_project: " + std::to_string(s->size()) + " samples cannot resolve order " +
                          std::to_string(order) + " (need >= " + std::to_string(2 * order + 2) + ")");
    }
    return HarmonicDiskFunction(g.table()->resized(order));
  }
  if (const auto* t = g.table()) return HarmonicDiskFunction(t->resized(order));
  const int m = static_cast<int>(std::bit_ceil(static_cast<unsigned>(std::max(64, 8 * order))));
  std::vector<double> samples(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) samples[static_cast<std::size_t>(j)] = g(kTwoPi * j / m);
  FourierTable t = BoundaryFunction::interpolating_table(samples).resized(order);
  return HarmonicDiskFunction(std::move(t));
}

inline double eval_u(const HarmonicDiskFunction& h, double r, double theta) {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("eval_u: radius must lie in [0, 1)");
  return h.value_xy(r * std::cos(theta), r * std::sin(theta));
}

/// |grad u|^2 = (d_r u)^2 + (r^{-1} d_theta u)^2; at r = 0 this is a_1^2 + b_1^2.
inline double eval_grad_sq(const HarmonicDiskFunction& h, double r, double theta) {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("eval_grad_sq: radius must lie in [0, 1)");
  const auto g = h.gradient_xy(r * std::cos(theta), r * std::sin(theta));
  return g[0] * g[0] + g[1] * g[1];
}

/// Direct quadrature of the Poisson integral of g at an interior point x of the disk.
inline double poisson_extend_pointwise(const KernelSet& ks, const BoundaryFunction& g, const Vec& x,
                                       double tol = 1e-13) {
  if (!ks.domain().is_disk()) throw InvalidArgument("circle boundary data requires the disk domain");
  if (!ks.domain().is_interior(x)) throw DomainError("poisson_extend_pointwise: x is not interior");
  // The trapezoid rule converges like |x|^m; start finer near the boundary.
  const double depth = 1.0 - norm(x);
  const int start = static_cast<int>(std::bit_ceil(static_cast<unsigned>(
      std::clamp(8.0 / std::max(depth, 1e-6), 64.0, 65536.0))));
  const Estimate e = periodic_integrate([&](double t) { return g(t) * ks.poisson_disk(x, t); }, tol, start);
  return e.value;
}

/// Poisson integral of sphere data at an interior point of the ball.
inline double poisson_extend_pointwise(const KernelSet& ks, const SphereFunction& g, const Vec& x,
                                       int resolution = 2) {
  if (!ks.domain().is_ball()) throw InvalidArgument("sphere boundary data requires the ball domain");
  if (!ks.domain().is_interior(x)) throw DomainError("poisson_extend_pointwise: x is not interior");
  const SphereRule rule = sphere_rule_for_point(x, resolution);
  return integrate_sphere(rule, [&](const Vec& z) { return g(z) * ks.poisson(x, z); });
}

/// Gradient of the ball Poisson integral, differentiating the kernel in x.
inline Vec poisson_extend_gradient(const KernelSet& ks, const SphereFunction& g, const Vec& x,
                                   int resolution = 2) {
  if (!ks.domain().is_ball()) throw InvalidArgument("sphere boundary data requires the ball domain");
  const SphereRule rule = sphere_rule_for_point(x, resolution);
  const double one_minus = 1.0 - dot(x, x);
  Vec grad{0.0, 0.0, 0.0};
  for (int c = 0; c < 3; ++c) {
    grad[static_cast<std::size_t>(c)] = integrate_sphere(rule, [&](const Vec& z) {
      const Vec d = x - z;
      const double r2 = dot(d, d);
      const double r = std::sqrt(r2);
      const double r3 = r2 * r;
      const auto i = static_cast<std::size_t>(c);
      const double dp = (-2.0 * x[i] / r3 - 3.0 * one_minus * d[i] / (r3 * r2)) / (4.0 * kPi);
      return g(z) * dp;
    });
  }
  return grad;
}

/// Default radii 1 - 2^{-k}, k = 3..12, for radial traces.
inline std::vector<double> default_trace_radii() {
  std::vector<double> r;
  for (int k = 3; k <= 12; ++k) r.push_back(1.0 - std::ldexp(1.0, -k));
  return r;
}

/// Limit of u(r, theta) as r -> 1 by polynomial extrapolation in h = 1 - r.
inline double radial_trace(const HarmonicDiskFunction& h, double theta, std::span<const double> radii,
                           double tol = 1e-9) {
  if (radii.size() < 2) throw InvalidArgument("radial_trace: need at least two radii");
  std::vector<double> hs;
  std::vector<double> vals;
  double prev = -1.0;
  for (double r : radii) {
    if (!(r > prev) || !(r < 1.0) || r < 0.0) {
      throw InvalidArgument("radial_trace: radii must increase strictly inside [0, 1)");
    }
    prev = r;
    hs.push_back(1.0 - r);
    vals.push_back(eval_u(h, r, theta));
  }
  const Estimate e = extrapolate_to_zero(hs, vals);
  if (!(e.error <= tol * std::max(1.0, std::abs(e.value)))) {
    throw TraceFailure("radial_trace: extrapolation did not settle at theta = " + std::to_string(theta) +
                       " (change " + std::to_string(e.error) + ")");
  }
  return e.value;
}

inline double radial_trace(const HarmonicDiskFunction& h, double theta) {
  const auto radii = default_trace_radii();
  return radial_trace(h, theta, radii);
}

}  // namespace pdouglas
