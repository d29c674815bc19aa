#pragma once

// Signed powers, Bregman forms and the Poisson, Green and Feller kernels of
// the model domains (interval, unit disk, unit ball in R^3).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <variant>

#include "pdouglas/errors.hpp"
#include "pdouglas/numerics.hpp"

namespace pdouglas {

/// Integrability exponent p in (1, inf).
class Exponent {
 public:
  explicit Exponent(double p) : p_(p) {
    if (!std::isfinite(p) || !(p > 1.0)) {
      throw InvalidArgument("exponent p must be finite and > 1, got " + std::to_string(p));
    }
  }
  double value() const noexcept { return p_; }

 private:
  double p_;
};

/// a^<kappa> = |a|^kappa sgn(a). Zero maps to zero for every kappa > 0.
inline double signed_power(double a, double kappa) {
  if (!std::isfinite(a) || !std::isfinite(kappa) || !(kappa > 0.0)) {
    throw InvalidArgument("signed_power: need finite a and kappa > 0");
  }
  if (a == 0.0) return 0.0;
  const double m = std::pow(std::abs(a), kappa);
  return a > 0.0 ? m : -m;
}

/// a^<kappa> - b^<kappa>, evaluated without cancellation when a ~ b.
inline double signed_power_difference(double a, double b, double kappa) {
  if (a == b) return 0.0;
  if (a != 0.0 && b != 0.0 && std::signbit(a) == std::signbit(b)) {
    const double s = a > 0.0 ? 1.0 : -1.0;
    const double abs_a = std::abs(a);
    const double x = (std::abs(b) - abs_a) / abs_a;
    if (std::abs(x) <= 1.0) {
      return -s * std::pow(abs_a, kappa) * std::expm1(kappa * std::log1p(x));
    }
  }
  return signed_power(a, kappa) - signed_power(b, kappa);
}

namespace detail {

// (1+x)^p - 1 - p x for |x| <= 1/4 by the binomial series.
inline double binomial_remainder(double p, double x) {
  double coeff = p * (p - 1.0) / 2.0;
  double xk = x * x;
  double sum = coeff * xk;
  for (int k = 3; k < 120; ++k) {
    coeff *= (p - k + 1.0) / k;
    xk *= x;
    const double term = coeff * xk;
    sum += term;
    if (term == 0.0 || std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace detail

/// F_p(a,b) = |b|^p - |a|^p - p a^<p-1> (b - a), the second-order Taylor
/// remainder of |.|^p at a. Nonnegative; computed stably near the diagonal.
inline double bregman_fp(Exponent exponent, double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidArgument("bregman_fp: non-finite input");
  const double p = exponent.value();
  if (a == b) return 0.0;
  if (a == 0.0) return std::pow(std::abs(b), p);
  // F_p(-a,-b) = F_p(a,b): reduce to a > 0.
  if (a < 0.0) {
    a = -a;
    b = -b;
  }
  if (b > 0.0) {
    const double x = (b - a) / a;
    const double scale = std::pow(a, p);
    if (std::abs(x) <= 0.25) return scale * detail::binomial_remainder(p, x);
    return std::max(0.0, scale * (std::expm1(p * std::log1p(x)) - p * x));
  }
  // b <= 0 < a: every term is nonnegative.
  const double nb = -b;
  return std::pow(nb, p) + (p - 1.0) * std::pow(a, p) + p * std::pow(a, p - 1.0) * nb;
}

/// H_p(a,b) = (p/2)(a^<p-1> - b^<p-1>)(a - b) = (F_p(a,b) + F_p(b,a)) / 2.
inline double symmetrized_hp(Exponent exponent, double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidArgument("symmetrized_hp: non-finite input");
  }
  const double p = exponent.value();
  return 0.5 * p * signed_power_difference(a, b, p - 1.0) * (a - b);
}

/// (a - b)^2 (|a| v |b|)^{p-2}, the third member of the comparability chain.
inline double quadratic_weight_form(Exponent exponent, double a, double b) {
  const double m = std::max(std::abs(a), std::abs(b));
  if (m == 0.0) return 0.0;
  return (a - b) * (a - b) * std::pow(m, exponent.value() - 2.0);
}

/// (a^<p/2> - b^<p/2>)^2, the fourth member of the comparability chain.
inline double half_power_form(Exponent exponent, double a, double b) {
  const double d = signed_power_difference(a, b, 0.5 * exponent.value());
  return d * d;
}

/// Points are stored in R^3; unused trailing coordinates are zero.
using Vec = std::array<double, 3>;

inline double dot(const Vec& u, const Vec& v) { return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]; }
inline double norm(const Vec& v) { return std::sqrt(dot(v, v)); }
inline Vec operator-(const Vec& u, const Vec& v) { return {u[0] - v[0], u[1] - v[1], u[2] - v[2]}; }
inline Vec operator+(const Vec& u, const Vec& v) { return {u[0] + v[0], u[1] + v[1], u[2] + v[2]}; }
inline Vec operator*(double s, const Vec& v) { return {s * v[0], s * v[1], s * v[2]}; }

inline Vec disk_point(double r, double theta) { return {r * std::cos(theta), r * std::sin(theta), 0.0}; }

struct Interval {
  double a = 0.0;
  double b = 1.0;
};
struct Disk {};
struct Ball {
  int d = 3;
};

/// One of the model domains. Immutable after construction.
class DomainSpec {
 public:
  enum class Kind { Interval, Disk, Ball };

  static DomainSpec interval(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
      throw InvalidArgument("interval domain requires finite a < b");
    }
    return DomainSpec(Interval{a, b});
  }
  static DomainSpec disk() { return DomainSpec(Disk{}); }
  static DomainSpec ball(int d = 3) {
    if (d != 3) throw InvalidArgument("only the unit ball in R^3 is supported");
    return DomainSpec(Ball{d});
  }

  Kind kind() const noexcept { return static_cast<Kind>(v_.index()); }
  bool is_interval() const noexcept { return kind() == Kind::Interval; }
  bool is_disk() const noexcept { return kind() == Kind::Disk; }
  bool is_ball() const noexcept { return kind() == Kind::Ball; }
  const Interval& as_interval() const { return std::get<Interval>(v_); }

  int dimension() const noexcept {
    switch (kind()) {
      case Kind::Interval: return 1;
      case Kind::Disk: return 2;
      case Kind::Ball: return 3;
    }
    return 0;
  }

  std::string name() const {
    switch (kind()) {
      case Kind::Interval: return "interval";
      case Kind::Disk: return "disk";
      case Kind::Ball: return "ball";
    }
    return "?";
  }

  /// C^{1,1} scale; diagnostics only.
  double r0() const {
    if (is_interval()) return 0.5 * (as_interval().b - as_interval().a);
    return 1.0;
  }

  /// Distance to the boundary, defined on all of R^d.
  double distance_to_boundary(const Vec& x) const {
    if (is_interval()) {
      const auto& iv = as_interval();
      return std::min(std::abs(x[0] - iv.a), std::abs(x[0] - iv.b));
    }
    return std::abs(1.0 - norm(x));
  }

  bool is_interior(const Vec& x) const {
    if (is_interval()) return x[0] > as_interval().a && x[0] < as_interval().b;
    return norm(x) < 1.0;
  }

  bool is_boundary(const Vec& z, double tol = 1e-9) const {
    if (is_interval()) {
      return std::abs(z[0] - as_interval().a) <= tol || std::abs(z[0] - as_interval().b) <= tol;
    }
    return std::abs(norm(z) - 1.0) <= tol;
  }

  /// Unit inward normal at a boundary point.
  Vec inward_normal(const Vec& z) const {
    if (!is_boundary(z)) throw DomainError("inward_normal: point is not on the boundary");
    if (is_interval()) {
      return {std::abs(z[0] - as_interval().a) <= 1e-9 ? 1.0 : -1.0, 0.0, 0.0};
    }
    return (-1.0 / norm(z)) * z;
  }

 private:
  explicit DomainSpec(std::variant<Interval, Disk, Ball> v) : v_(v) {}
  std::variant<Interval, Disk, Ball> v_;
};

/// Poisson, Green and Feller kernels of one model domain.
///
/// Interval: P(x, a) = (b-x)/(b-a), P(x, b) = (x-a)/(b-a) are weights for
/// counting measure on {a, b}; G is the two-branch formula for -u'' = delta;
/// gamma(a, b) = gamma(b, a) = 1/(b-a).
/// Disk: P = (1-|x|^2)/(2 pi |x-z|^2), G = (1/4pi) ln((|x|^2|y|^2 - 2x.y + 1)/|x-y|^2),
/// gamma = 1/(pi |z-w|^2) = 1/(4 pi sin^2((xi-eta)/2)).
/// Ball: P = (1-|x|^2)/(4 pi |x-z|^3), G = (1/4pi)(1/|x-y| - 1/sqrt(|x|^2|y|^2 - 2x.y + 1)),
/// gamma = 2/(4 pi |z-w|^3).
class KernelSet {
 public:
  explicit KernelSet(DomainSpec domain) : domain_(domain) {}

  const DomainSpec& domain() const noexcept { return domain_; }

  double poisson(const Vec& x, const Vec& z) const {
    require_interior(x, "poisson_kernel");
    require_boundary(z, "poisson_kernel");
    switch (domain_.kind()) {
      case DomainSpec::Kind::Interval: {
        const auto& iv = domain_.as_interval();
        const bool at_a = std::abs(z[0] - iv.a) <= 1e-9;
        return at_a ? (iv.b - x[0]) / (iv.b - iv.a) : (x[0] - iv.a) / (iv.b - iv.a);
      }
      case DomainSpec::Kind::Disk: {
        const Vec d = x - z;
        return (1.0 - dot(x, x)) / (kTwoPi * dot(d, d));
      }
      case DomainSpec::Kind::Ball: {
        const double dist = norm(x - z);
        return (1.0 - dot(x, x)) / (4.0 * kPi * dist * dist * dist);
      }
    }
    return 0.0;
  }

  /// Disk Poisson kernel with the boundary point given by its angle.
  double poisson_disk(const Vec& x, double eta) const { return poisson(x, disk_point(1.0, eta)); }

  double green(const Vec& x, const Vec& y) const {
    require_interior(x, "green_function");
    require_interior(y, "green_function");
    const Vec d = x - y;
    const double dist2 = dot(d, d);
    if (dist2 == 0.0) throw SingularityError("green_function: x = y");
    switch (domain_.kind()) {
      case DomainSpec::Kind::Interval: {
        const auto& iv = domain_.as_interval();
        const double lo = std::min(x[0], y[0]);
        const double hi = std::max(x[0], y[0]);
        return (lo - iv.a) * (iv.b - hi) / (iv.b - iv.a);
      }
      case DomainSpec::Kind::Disk: {
        const double reflected = dot(x, x) * dot(y, y) - 2.0 * dot(x, y) + 1.0;
        return std::log(reflected / dist2) / (4.0 * kPi);
      }
      case DomainSpec::Kind::Ball: {
        const double reflected = dot(x, x) * dot(y, y) - 2.0 * dot(x, y) + 1.0;
        return (1.0 / std::sqrt(dist2) - 1.0 / std::sqrt(reflected)) / (4.0 * kPi);
      }
    }
    return 0.0;
  }

  double feller(const Vec& z, const Vec& w) const {
    require_boundary(z, "feller_kernel");
    require_boundary(w, "feller_kernel");
    const double dist = norm(z - w);
    if (dist <= 1e-14) throw SingularityError("feller_kernel: z = w");
    switch (domain_.kind()) {
      case DomainSpec::Kind::Interval: {
        const auto& iv = domain_.as_interval();
        return 1.0 / (iv.b - iv.a);
      }
      case DomainSpec::Kind::Disk: return 1.0 / (kPi * dist * dist);
      case DomainSpec::Kind::Ball: return 2.0 / (4.0 * kPi * dist * dist * dist);
    }
    return 0.0;
  }

  /// Disk Feller kernel in angles: 1/(4 pi sin^2((xi - eta)/2)).
  static double feller_disk(double xi, double eta) {
    const double s = std::sin(0.5 * (xi - eta));
    if (s == 0.0) throw SingularityError("feller_kernel: xi = eta");
    return 1.0 / (4.0 * kPi * s * s);
  }

 private:
  void require_interior(const Vec& x, const char* who) const {
    if (!domain_.is_interior(x)) throw DomainError(std::string(who) + ": point is not interior");
  }
  void require_boundary(const Vec& z, const char* who) const {
    if (!domain_.is_boundary(z)) throw DomainError(std::string(who) + ": point is not on the boundary");
  }

  DomainSpec domain_;
};

/// Observed range of kernel / comparison-function over random samples.
struct RatioEnvelope {
  double min = std::numeric_limits<double>::infinity();
  double max = 0.0;
  int samples = 0;

  void add(double ratio) {
    min = std::min(min, ratio);
    max = std::max(max, ratio);
    ++samples;
  }
  bool finite_positive() const { return samples > 0 && min > 0.0 && std::isfinite(max); }
};

/// Empirical constants of the two-sided kernel estimates (disk and ball):
/// G ~ ln(1 + d(x)d(y)/|x-y|^2) (d = 2) or (1 ^ d(x)d(y)/|x-y|^2)|x-y|^{2-d} (d = 3),
/// P ~ d(x)/|z-x|^d, gamma ~ |z-w|^{-d}.
struct KernelBounds {
  RatioEnvelope green;
  RatioEnvelope poisson;
  RatioEnvelope feller;
};

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline Vec random_unit_vector(int dim, std::mt19937_64& rng) {
  if (dim == 2) {
    const double t = kTwoPi * uniform01(rng);
    return {std::cos(t), std::sin(t), 0.0};
  }
  const double z = 2.0 * uniform01(rng) - 1.0;
  const double phi = kTwoPi * uniform01(rng);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s * std::cos(phi), s * std::sin(phi), z};
}

// Radius spread so that points approach the boundary at many scales.
inline Vec random_interior_point(int dim, std::mt19937_64& rng) {
  const double depth = std::pow(10.0, -4.0 * uniform01(rng));
  return (1.0 - depth) * random_unit_vector(dim, rng);
}

}  // namespace detail

inline KernelBounds estimate_kernel_bounds(const KernelSet& ks, int samples, std::uint64_t seed) {
  const DomainSpec& dom = ks.domain();
  if (dom.is_interval()) throw InvalidArgument("kernel bounds are reported for disk and ball only");
  const int d = dom.dimension();
  std::mt19937_64 rng(seed);
  KernelBounds out;
  for (int i = 0; i < samples; ++i) {
    const Vec x = detail::random_interior_point(d, rng);
    const Vec y = detail::random_interior_point(d, rng);
    const Vec z = detail::random_unit_vector(d, rng);
    const Vec w = detail::random_unit_vector(d, rng);
    const double dx = dom.distance_to_boundary(x);
    const double dy = dom.distance_to_boundary(y);
    const double dist_xy = norm(x - y);
    if (dist_xy > 0.0) {
      const double q = dx * dy / (dist_xy * dist_xy);
      const double cmp = d == 2 ? std::log1p(q) : std::min(1.0, q) / dist_xy;
      out.green.add(ks.green(x, y) / cmp);
    }
    out.poisson.add(ks.poisson(x, z) / (dx / std::pow(norm(z - x), d)));
    const double dist_zw = norm(z - w);
    if (dist_zw > 1e-12) out.feller.add(ks.feller(z, w) * std::pow(dist_zw, d));
  }
  return out;
}

}  // namespace pdouglas
