#pragma once

// Monte Carlo sampling of Brownian exit points. The disk sampler is exact
// (Moebius pushforward of the uniform law); the ball uses walk-on-spheres;
// the interval exits at an endpoint with the Poisson weights.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <functional>
#include <random>
#include <thread>
#include <vector>

#include "pdouglas/boundary.hpp"
#include "pdouglas/errors.hpp"
#include "pdouglas/kernels.hpp"

namespace pdouglas {

struct McConfig {
  long long n = 1000000;
  std::uint64_t seed = 20240601;
  Vec x{0.0, 0.0, 0.0};
  DomainSpec domain = DomainSpec::disk();
  double wos_eps = 1e-3;
  int streams = 16;  // fixed partition of the sample; determines the result
  int workers = 1;   // threads; never changes the result

  void validate() const {
    if (n < 1) throw InvalidArgument("McConfig: n must be >= 1");
    if (!(wos_eps > 0.0 && wos_eps < 0.1)) throw InvalidArgument("McConfig: wos epsilon must lie in (0, 0.1)");
    if (streams < 1) throw InvalidArgument("McConfig: streams must be >= 1");
    if (workers < 1) throw InvalidArgument("McConfig: workers must be >= 1");
    if (!domain.is_interior(x)) throw DomainError("McConfig: start point must be interior");
  }
};

struct McEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  long long n = 0;
  std::uint64_t seed = 0;
};

/// SplitMix64 finalizer; derives independent stream seeds from (seed, stream).
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 1)));
}

/// Exit angle of Brownian motion from x in the unit disk.
inline double sample_exit_disk(const Vec& x, std::mt19937_64& rng) {
  if (!(x[0] * x[0] + x[1] * x[1] < 1.0)) throw DomainError("sample_exit_disk: x must be interior");
  const double psi = kTwoPi * detail::uniform01(rng);
  const std::complex<double> a{x[0], x[1]};
  const std::complex<double> z = std::polar(1.0, psi);
  const std::complex<double> w = (z + a) / (1.0 + std::conj(a) * z);
  const double t = std::arg(w);
  return t < 0.0 ? t + kTwoPi : t;
}

inline constexpr int kWosStepCap = 10000;

/// Walk-on-spheres in the unit ball; stops within eps of the sphere and
/// projects radially.
inline Vec walk_on_spheres(const DomainSpec& domain, const Vec& x, std::mt19937_64& rng, double eps) {
  if (!domain.is_ball()) throw InvalidArgument("walk_on_spheres: ball domain required");
  if (!domain.is_interior(x)) throw DomainError("walk_on_spheres: x must be interior");
  Vec y = x;
  for (int step = 0; step < kWosStepCap; ++step) {
    const double radius = 1.0 - norm(y);
    if (radius <= eps) return (1.0 / norm(y)) * y;
    y = y + radius * detail::random_unit_vector(3, rng);
  }
  throw NonTermination("walk_on_spheres: no exit after 10000 steps");
}

/// Exit point of Brownian motion from x, as a point of the boundary.
inline Vec sample_exit_point(const McConfig& cfg, std::mt19937_64& rng) {
  switch (cfg.domain.kind()) {
    case DomainSpec::Kind::Disk: return disk_point(1.0, sample_exit_disk(cfg.x, rng));
    case DomainSpec::Kind::Ball: return walk_on_spheres(cfg.domain, cfg.x, rng, cfg.wos_eps);
    case DomainSpec::Kind::Interval: {
      const auto& iv = cfg.domain.as_interval();
      const double prob_b = (cfg.x[0] - iv.a) / (iv.b - iv.a);
      return {detail::uniform01(rng) < prob_b ? iv.b : iv.a, 0.0, 0.0};
    }
  }
  throw InvalidArgument("unsupported domain");
}

namespace detail {

struct Moments {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n + o.n);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.n) / total;
    m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }
};

}  // namespace detail

/// Mean of f(X_tau) over cfg.n exit points. Streams are summed in fixed order,
/// so the result depends on (seed, n, streams) only.
inline McEstimate mc_estimate(const McConfig& cfg, const std::function<double(const Vec&)>& f) {
  cfg.validate();
  const auto streams = static_cast<std::size_t>(cfg.streams);
  std::vector<detail::Moments> parts(streams);
  const auto run_stream = [&](std::size_t s) {
    const long long share = cfg.n / cfg.streams + (static_cast<long long>(s) < cfg.n % cfg.streams ? 1 : 0);
    std::mt19937_64 rng = stream_rng(cfg.seed, s);
    detail::Moments m;
    for (long long i = 0; i < share; ++i) m.add(f(sample_exit_point(cfg, rng)));
    parts[s] = m;
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), streams);
  if (workers <= 1) {
    for (std::size_t s = 0; s < streams; ++s) run_stream(s);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t s = w; s < streams; s += workers) run_stream(s);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  detail::Moments total;
  for (const auto& m : parts) total.merge(m);
  McEstimate est;
  est.mean = total.mean;
  est.n = total.n;
  est.seed = cfg.seed;
  est.standard_error =
      total.n > 1 ? std::sqrt(total.m2 / static_cast<double>(total.n - 1)) / std::sqrt(static_cast<double>(total.n))
                  : 0.0;
  return est;
}

/// E^x g(X_tau) for circle data.
inline McEstimate mc_mean(const McConfig& cfg, const BoundaryFunction& g) {
  if (!cfg.domain.is_disk()) throw InvalidArgument("circle boundary data requires the disk domain");
  return mc_estimate(cfg, [&](const Vec& z) { return g(std::atan2(z[1], z[0])); });
}

/// E^x |g(X_tau)|^p, disk.
inline McEstimate mc_expectation(const McConfig& cfg, const BoundaryFunction& g, Exponent exponent) {
  if (!cfg.domain.is_disk()) throw InvalidArgument("circle boundary data requires the disk domain");
  const double p = exponent.value();
  return mc_estimate(cfg, [&](const Vec& z) { return std::pow(std::abs(g(std::atan2(z[1], z[0]))), p); });
}

/// E^x |g(X_tau)|^p, ball.
inline McEstimate mc_expectation(const McConfig& cfg, const SphereFunction& g, Exponent exponent) {
  if (!cfg.domain.is_ball()) throw InvalidArgument("sphere boundary data requires the ball domain");
  const double p = exponent.value();
  return mc_estimate(cfg, [&](const Vec& z) { return std::pow(std::abs(g(z)), p); });
}

/// E^x |u(X_tau)|^p, interval.
inline McEstimate mc_expectation(const McConfig& cfg, const IntervalHarmonic& u, Exponent exponent) {
  if (!cfg.domain.is_interval()) throw InvalidArgument("interval data requires the interval domain");
  const double p = exponent.value();
  return mc_estimate(cfg, [&](const Vec& z) { return std::pow(std::abs(u(z[0])), p); });
}

}  // namespace pdouglas
