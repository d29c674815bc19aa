#pragma once

// Quadrature engines for the interior p-energy forms, the boundary p-form
// with its diagonal singularity, Green-weighted interior integrals and
// Poisson expectations.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "pdouglas/boundary.hpp"
#include "pdouglas/errors.hpp"
#include "pdouglas/harmonic.hpp"
#include "pdouglas/kernels.hpp"
#include "pdouglas/numerics.hpp"
#include "pdouglas/sphere.hpp"

namespace pdouglas {

/// Resolution of the disk quadratures.
///
/// Interior: composite 8-point Gauss-Legendre in r (n_r nodes) against the
/// trapezoid rule in theta (n_theta nodes). Boundary: m uniform nodes per
/// angle; difference nodes with |s| < s0 take the diagonal limit value.
/// `s0 = 0` means the default 2 pi / m.
struct QuadratureGrid {
  int n_r = 128;
  int n_theta = 256;
  int m = 256;
  double s0 = 0.0;
  int level = 3;

  static QuadratureGrid at_level(int level) {
    if (level < 0 || level > 8) throw InvalidArgument("grid level must lie in [0, 8]");
    const int scale = 1 << level;
    return {16 * scale, 32 * scale, 32 * scale, 0.0, level};
  }

  double diagonal_band() const { return s0 > 0.0 ? s0 : kTwoPi / m; }

  /// Half resolution in every direction; used for one-step error estimates.
  QuadratureGrid coarsened() const {
    QuadratureGrid g = *this;
    g.n_r = std::max(8, n_r / 2);
    g.n_theta = std::max(8, n_theta / 2);
    g.m = std::max(8, m / 2);
    g.s0 = s0 > 0.0 ? std::max(s0, kTwoPi / g.m) : 0.0;
    g.level = level - 1;
    return g;
  }

  void validate() const {
    if (n_r < 8 || n_theta < 8 || m < 8) throw InvalidArgument("quadrature grid: n_r, n_theta, m must be >= 8");
    const double band = diagonal_band();
    if (!(band > 0.0 && band < kPi / 8.0)) {
      throw InvalidArgument("quadrature grid: diagonal band s0 must lie in (0, pi/8)");
    }
  }

  std::string describe() const {
    std::ostringstream os;
    os << "level=" << level << " n_r=" << n_r << " n_theta=" << n_theta << " m=" << m
       << " s0=" << diagonal_band();
    return os.str();
  }
};

struct AdaptiveOptions {
  double tolerance = 1e-6;  // relative, on the whole integral
  int cell_budget = 40000;
  bool throw_on_budget = true;
};

struct AdaptiveDiagnostics {
  bool used = false;
  int cells = 0;
  int budget = 0;
  bool budget_exhausted = false;
  double error = 0.0;
  std::vector<std::string> offending_cells;
};

/// Value of a form with a one-refinement-step error estimate.
struct FormValue {
  double value = 0.0;
  double error_estimate = 0.0;
  QuadratureGrid grid;
  AdaptiveDiagnostics adaptive;
};

using PlaneFunction = std::function<double(double, double)>;

namespace detail {

inline const QuadratureRule& gl8() {
  static const QuadratureRule rule = gauss_legendre(8);
  return rule;
}
inline const QuadratureRule& gl4() {
  static const QuadratureRule rule = gauss_legendre(4);
  return rule;
}

/// |u|^{p-2} |grad u|^2 with the conventions at u = 0: zero if the gradient
/// vanishes there, +inf for p < 2 otherwise.
inline double energy_density(double u, double grad_sq, double p) {
  if (grad_sq == 0.0) return 0.0;
  if (p == 2.0) return grad_sq;
  if (u == 0.0) return p < 2.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return std::pow(std::abs(u), p - 2.0) * grad_sq;
}

/// Tensor polar quadrature of f(x, y) over the unit disk (area element r dr dtheta).
inline double polar_integrate(const QuadratureGrid& grid, const std::function<double(double, double)>& f) {
  const int panels = std::max(1, grid.n_r / 8);
  const QuadratureRule radial = composite_rule(gl8(), 0.0, 1.0, panels);
  const int nt = grid.n_theta;
  std::vector<double> cos_t(static_cast<std::size_t>(nt));
  std::vector<double> sin_t(static_cast<std::size_t>(nt));
  for (int j = 0; j < nt; ++j) {
    cos_t[static_cast<std::size_t>(j)] = std::cos(kTwoPi * j / nt);
    sin_t[static_cast<std::size_t>(j)] = std::sin(kTwoPi * j / nt);
  }
  std::vector<double> rings(radial.nodes.size());
  std::vector<double> ring(static_cast<std::size_t>(nt));
  for (std::size_t i = 0; i < radial.nodes.size(); ++i) {
    const double r = radial.nodes[i];
    for (int j = 0; j < nt; ++j) {
      const auto k = static_cast<std::size_t>(j);
      ring[k] = f(r * cos_t[k], r * sin_t[k]);
    }
    rings[i] = radial.weights[i] * r * pairwise_sum(ring) * (kTwoPi / nt);
  }
  return pairwise_sum(rings);
}

struct PolarCell {
  double r0, r1, t0, t1;
  double value, error;
  long id;
};

inline std::pair<double, double> cell_rules(const std::function<double(double, double)>& f, double r0,
                                            double r1, double t0, double t1) {
  const auto apply = [&](const QuadratureRule& q) {
    const double hr = 0.5 * (r1 - r0);
    const double ht = 0.5 * (t1 - t0);
    double s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      const double r = r0 + hr * (q.nodes[i] + 1.0);
      double row = 0.0;
      for (std::size_t j = 0; j < q.nodes.size(); ++j) {
        const double t = t0 + ht * (q.nodes[j] + 1.0);
        row += q.weights[j] * f(r * std::cos(t), r * std::sin(t));
      }
      s += q.weights[i] * r * row;
    }
    return s * hr * ht;
  };
  return {apply(gl8()), apply(gl4())};
}

/// Globally adaptive quadrature over the disk in polar cells: the cell with
/// the largest |Q8 - Q4| is split into four until the summed indicator falls
/// below tolerance * |I| or the cell budget runs out.
inline std::pair<double, AdaptiveDiagnostics> adaptive_polar(
    const std::function<double(double, double)>& f, const QuadratureGrid& grid, const AdaptiveOptions& opt) {
  const int nr = std::max(1, grid.n_r / 8);
  const int nt = std::max(1, grid.n_theta / 8);
  const auto worse = [](const PolarCell& a, const PolarCell& b) {
    return a.error != b.error ? a.error < b.error : a.id > b.id;
  };
  std::priority_queue<PolarCell, std::vector<PolarCell>, decltype(worse)> heap(worse);
  long next_id = 0;
  const auto make = [&](double r0, double r1, double t0, double t1) {
    const auto [q8, q4] = cell_rules(f, r0, r1, t0, t1);
    return PolarCell{r0, r1, t0, t1, q8, std::abs(q8 - q4), next_id++};
  };
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < nt; ++j) {
      heap.push(make(static_cast<double>(i) / nr, static_cast<double>(i + 1) / nr, kTwoPi * j / nt,
                     kTwoPi * (j + 1) / nt));
    }
  }
  const auto totals = [&]() {
    auto copy = heap;
    double v = 0.0;
    double e = 0.0;
    while (!copy.empty()) {
      v += copy.top().value;
      e += copy.top().error;
      copy.pop();
    }
    return std::pair{v, e};
  };
  auto [value, error] = totals();
  int since_resum = 0;
  while (error > opt.tolerance * std::abs(value) && std::isfinite(error) &&
         static_cast<int>(heap.size()) + 3 <= opt.cell_budget) {
    const PolarCell c = heap.top();
    heap.pop();
    const double rm = 0.5 * (c.r0 + c.r1);
    const double tm = 0.5 * (c.t0 + c.t1);
    const PolarCell kids[4] = {make(c.r0, rm, c.t0, tm), make(rm, c.r1, c.t0, tm), make(c.r0, rm, tm, c.t1),
                               make(rm, c.r1, tm, c.t1)};
    value -= c.value;
    error -= c.error;
    for (const auto& k : kids) {
      value += k.value;
      error += k.error;
      heap.push(k);
    }
    if (++since_resum == 256) {
      std::tie(value, error) = totals();
      since_resum = 0;
    }
  }
  // Deterministic final sum: leaves ordered by id.
  std::vector<PolarCell> leaves;
  leaves.reserve(heap.size());
  while (!heap.empty()) {
    leaves.push_back(heap.top());
    heap.pop();
  }
  std::vector<PolarCell> worst(leaves.begin(), leaves.begin() + std::min<std::size_t>(5, leaves.size()));
  std::sort(leaves.begin(), leaves.end(), [](const PolarCell& a, const PolarCell& b) { return a.id < b.id; });
  std::vector<double> vals;
  std::vector<double> errs;
  for (const auto& c : leaves) {
    vals.push_back(c.value);
    errs.push_back(c.error);
  }
  AdaptiveDiagnostics diag;
  diag.used = true;
  diag.cells = static_cast<int>(leaves.size());
  diag.budget = opt.cell_budget;
  const double total = pairwise_sum(vals);
  diag.error = pairwise_sum(errs);
  diag.budget_exhausted = !(diag.error <= opt.tolerance * std::abs(total));
  if (diag.budget_exhausted) {
    for (const auto& c : worst) {
      std::ostringstream os;
      os << "r=[" << c.r0 << "," << c.r1 << "] theta=[" << c.t0 << "," << c.t1 << "] indicator=" << c.error;
      diag.offending_cells.push_back(os.str());
    }
  }
  return {total, diag};
}

inline FormValue finish_adaptive(double scale, std::pair<double, AdaptiveDiagnostics> result,
                                 const QuadratureGrid& grid, const AdaptiveOptions& opt, const char* who) {
  auto& [value, diag] = result;
  if (diag.budget_exhausted && opt.throw_on_budget) {
    throw AccuracyError(std::string(who) + ": adaptive cell budget exhausted", diag.offending_cells);
  }
  FormValue fv;
  fv.value = scale * value;
  fv.error_estimate = scale * diag.error;
  fv.grid = grid;
  fv.adaptive = diag;
  return fv;
}

}  // namespace detail

/// E_D^p[u] = p(p-1) int_D |u|^{p-2} |grad u|^2 dx for u = P_D[g] on the disk.
/// p >= 2 uses the tensor grid; p < 2 switches to adaptive cells because the
/// weight is unbounded on the zero set of u.
inline FormValue interior_energy_edp(const HarmonicDiskFunction& h, Exponent exponent,
                                     const QuadratureGrid& grid, const AdaptiveOptions& adaptive = {}) {
  const double p = exponent.value();
  const auto density = [&](double x, double y) {
    const auto [f, df] = h.analytic({x, y});
    return detail::energy_density(f.real(), std::norm(df), p);
  };
  const double scale = p * (p - 1.0);
  if (p < 2.0) {
    return detail::finish_adaptive(scale, detail::adaptive_polar(density, grid, adaptive), grid, adaptive,
                                   "interior_energy_edp");
  }
  const double fine = detail::polar_integrate(grid, density);
  const double coarse = detail::polar_integrate(grid.coarsened(), density);
  return {scale * fine, scale * std::abs(fine - coarse), grid, {}};
}

/// Same form for a general smooth u given with its gradient.
inline FormValue interior_energy_edp(const PlaneFunction& u,
                                     const std::function<std::array<double, 2>(double, double)>& grad,
                                     Exponent exponent, const QuadratureGrid& grid,
                                     const AdaptiveOptions& adaptive = {}) {
  const double p = exponent.value();
  const auto density = [&](double x, double y) {
    const auto g = grad(x, y);
    return detail::energy_density(u(x, y), g[0] * g[0] + g[1] * g[1], p);
  };
  const double scale = p * (p - 1.0);
  if (p < 2.0) {
    return detail::finish_adaptive(scale, detail::adaptive_polar(density, grid, adaptive), grid, adaptive,
                                   "interior_energy_edp");
  }
  const double fine = detail::polar_integrate(grid, density);
  const double coarse = detail::polar_integrate(grid.coarsened(), density);
  return {scale * fine, scale * std::abs(fine - coarse), grid, {}};
}

struct FiniteDifferenceOptions {
  double step = 1e-5;
};

/// Central-difference gradient of w at (x, y) inside the unit disk; switches
/// to second-order one-sided differences where a stencil point would leave it.
inline std::array<double, 2> fd_gradient(const PlaneFunction& w, double x, double y, double h) {
  const auto inside = [](double a, double b) { return a * a + b * b < 1.0; };
  const double w0 = w(x, y);
  const auto partial = [&](double dx, double dy) {
    const bool fwd = inside(x + dx, y + dy);
    const bool bwd = inside(x - dx, y - dy);
    if (fwd && bwd) return (w(x + dx, y + dy) - w(x - dx, y - dy)) / (2.0 * h);
    if (bwd) return (3.0 * w0 - 4.0 * w(x - dx, y - dy) + w(x - 2 * dx, y - 2 * dy)) / (2.0 * h);
    return (-3.0 * w0 + 4.0 * w(x + dx, y + dy) - w(x + 2 * dx, y + 2 * dy)) / (2.0 * h);
  };
  return {partial(h, 0.0), partial(0.0, h)};
}

/// E~_D^p[u] = (4(p-1)/p) int_D |grad u^<p/2>|^2 dx, with the gradient of the
/// signed-power composite taken by finite differences.
inline FormValue interior_energy_tilde(const PlaneFunction& u_eval, Exponent exponent, const QuadratureGrid& grid,
                                       const FiniteDifferenceOptions& fd = {},
                                       const AdaptiveOptions& adaptive = {}) {
  const double p = exponent.value();
  const double half = 0.5 * p;
  const PlaneFunction w = [&](double x, double y) { return signed_power(u_eval(x, y), half); };
  const auto density = [&](double x, double y) {
    const auto g = fd_gradient(w, x, y, fd.step);
    return g[0] * g[0] + g[1] * g[1];
  };
  const double scale = 4.0 * (p - 1.0) / p;
  if (p < 2.0) {
    return detail::finish_adaptive(scale, detail::adaptive_polar(density, grid, adaptive), grid, adaptive,
                                   "interior_energy_tilde");
  }
  const double fine = detail::polar_integrate(grid, density);
  const double coarse = detail::polar_integrate(grid.coarsened(), density);
  return {scale * fine, scale * std::abs(fine - coarse), grid, {}};
}

/// lim_{s->0} F_p(g(xi), g(xi+s)) gamma(xi, xi+s) = p(p-1)/(2 pi) |g(xi)|^{p-2} g'(xi)^2.
/// `infinite` flags p < 2 with g(xi) = 0 != g'(xi).
struct DiagonalLimit {
  double value = 0.0;
  bool infinite = false;
};

inline DiagonalLimit diagonal_limit(const BoundaryFunction& g, Exponent exponent, double xi) {
  const double p = exponent.value();
  const double gv = g(xi);
  const double dg = g.derivative(xi);
  const double coeff = p * (p - 1.0) / kTwoPi;
  if (dg == 0.0) return {0.0, false};
  if (gv == 0.0) {
    if (p < 2.0) return {std::numeric_limits<double>::infinity(), true};
    return {p == 2.0 ? coeff * dg * dg : 0.0, false};
  }
  return {coeff * std::pow(std::abs(gv), p - 2.0) * dg * dg, false};
}

/// Which kernel fills the boundary double integral: the Bregman divergence
/// F_p or its symmetrization H_p. Both give the same form.
enum class BregmanVariant { Taylor, Symmetrized };

namespace detail {

inline double boundary_form_disk(const BoundaryFunction& g, Exponent exponent, const QuadratureGrid& grid,
                                 BregmanVariant variant) {
  const double p = exponent.value();
  const int m = grid.m;
  const double h = kTwoPi / m;
  const double band = grid.diagonal_band();
  int band_nodes = 0;  // difference nodes k >= 1 with k h < s0
  while ((band_nodes + 1) * h < band * (1.0 - 1e-12)) ++band_nodes;

  std::vector<double> gv(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) gv[static_cast<std::size_t>(i)] = g(i * h);
  std::vector<double> inv_kernel(static_cast<std::size_t>(m), 0.0);
  for (int k = 1; k < m; ++k) {
    const double s = std::sin(0.5 * k * h);
    inv_kernel[static_cast<std::size_t>(k)] = 1.0 / (4.0 * kPi * s * s);
  }
  const auto form = [&](double a, double b) {
    return variant == BregmanVariant::Taylor ? bregman_fp(exponent, a, b) : symmetrized_hp(exponent, a, b);
  };
  const QuadratureRule one_sided = gl8();

  std::vector<double> rows(static_cast<std::size_t>(m));
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    terms.clear();
    const double xi = i * h;
    const double a = gv[static_cast<std::size_t>(i)];
    const DiagonalLimit diag = diagonal_limit(g, exponent, xi);
    for (int k = -(m / 2 - 1); k <= m / 2; ++k) {
      const int ak = std::abs(k);
      if (ak <= band_nodes) {
        if (!diag.infinite) terms.push_back(diag.value);
        continue;
      }
      const int j = ((i + k) % m + m) % m;
      terms.push_back(form(a, gv[static_cast<std::size_t>(j)]) * inv_kernel[static_cast<std::size_t>(ak)]);
    }
    double row = pairwise_sum(terms) * h;
    if (diag.infinite) {
      // Integrable |s|^{p-2} singularity: geometric panels toward s = 0 on
      // both sides of the band, plus the analytic tail of the last panel.
      const double reach = (band_nodes + 0.5) * h;
      const QuadratureRule graded = graded_rule(one_sided, reach, 48);
      const double eps = graded.nodes.empty() ? 0.0 : reach * std::ldexp(1.0, -47);
      double band_sum = 0.0;
      for (const double side : {1.0, -1.0}) {
        const auto f = [&](double s) {
          return form(a, g(xi + side * s)) / (4.0 * kPi * std::pow(std::sin(0.5 * s), 2));
        };
        for (std::size_t q = 0; q < graded.nodes.size(); ++q) band_sum += graded.weights[q] * f(graded.nodes[q]);
        band_sum += f(eps) * eps / (p - 1.0);
      }
      row += band_sum;
    }
    rows[static_cast<std::size_t>(i)] = row;
  }
  return pairwise_sum(rows) * h;
}

}  // namespace detail

/// H_D^p[g] = int int F_p(g(z), g(w)) gamma_D(z, w) dz dw on the unit circle.
///
/// Difference coordinates s = eta - xi; trapezoid in both variables, with
/// the nodes |s| < s0 replaced by the diagonal limit (the integrand extends
/// continuously to s = 0 for Lipschitz g).
inline FormValue boundary_form_hdp(const BoundaryFunction& g, Exponent exponent, const QuadratureGrid& grid,
                                   BregmanVariant variant = BregmanVariant::Taylor) {
  grid.validate();
  if (g.regularity() == Regularity::NonLipschitz) {
    throw UnsupportedInput("boundary_form_hdp: boundary data '" + g.name() + "' is not Lipschitz");
  }
  if (!g.has_derivative()) {
    throw ConfigError("boundary_form_hdp: boundary data '" + g.name() + "' has no derivative for the diagonal");
  }
  const double fine = detail::boundary_form_disk(g, exponent, grid, variant);
  const double coarse = detail::boundary_form_disk(g, exponent, grid.coarsened(), variant);
  return {fine, std::abs(fine - coarse), grid, {}};
}

/// Interval: two-point form 2 F-symmetrized sum with gamma(a, b) = 1/(b - a).
inline FormValue boundary_form_hdp(const IntervalHarmonic& u, Exponent exponent,
                                   BregmanVariant variant = BregmanVariant::Taylor) {
  const double ga = u.at_a();
  const double gb = u.at_b();
  const double gamma = 1.0 / (u.domain.b - u.domain.a);
  double v = 0.0;
  if (variant == BregmanVariant::Taylor) {
    v = (bregman_fp(exponent, ga, gb) + bregman_fp(exponent, gb, ga)) * gamma;
  } else {
    v = 2.0 * symmetrized_hp(exponent, ga, gb) * gamma;
  }
  FormValue fv;
  fv.value = v;
  fv.grid.level = 0;
  return fv;
}

/// Resolution of the ball quadratures derived from a grid level.
struct BallResolution {
  int polar = 16;
  int azimuth = 32;
  int panels = 4;

  static BallResolution at_level(int level) {
    const int n = 8 + 4 * std::max(0, level);
    return {n, 2 * n, 2 + std::max(0, level)};
  }
};

namespace detail {

inline double boundary_form_ball(const SphereFunction& g, Exponent exponent, const BallResolution& res,
                                 BregmanVariant variant) {
  const QuadratureRule polar = gauss_legendre(res.polar);  // in cos(phi)
  const KernelSet ks(DomainSpec::ball());
  std::vector<double> outer;
  for (std::size_t i = 0; i < polar.nodes.size(); ++i) {
    const double ct = polar.nodes[i];
    const double st = std::sqrt(1.0 - ct * ct);
    for (int j = 0; j < res.azimuth; ++j) {
      const double psi = kTwoPi * j / res.azimuth;
      const Vec z{st * std::cos(psi), st * std::sin(psi), ct};
      const double gz = g(z);
      const SphereRule inner = sphere_rule(z, kPi, 0, res.panels, res.azimuth);
      std::vector<double> terms(inner.points.size());
      for (std::size_t q = 0; q < inner.points.size(); ++q) {
        const Vec& w = inner.points[q];
        const double gw = g(w);
        const double f = variant == BregmanVariant::Taylor ? bregman_fp(exponent, gz, gw)
                                                           : symmetrized_hp(exponent, gz, gw);
        const double d = norm(z - w);
        terms[q] = f == 0.0 ? 0.0 : inner.weights[q] * f * 2.0 / (4.0 * kPi * d * d * d);
      }
      outer.push_back(polar.weights[i] * (kTwoPi / res.azimuth) * pairwise_sum(terms));
    }
  }
  return pairwise_sum(outer);
}

}  // namespace detail

/// Ball in R^3: double surface integral against gamma = 2/(4 pi |z-w|^3),
/// inner integral in coordinates centred on the outer point.
inline FormValue boundary_form_hdp(const SphereFunction& g, Exponent exponent, int level,
                                   BregmanVariant variant = BregmanVariant::Taylor) {
  const double fine = detail::boundary_form_ball(g, exponent, BallResolution::at_level(level), variant);
  const double coarse = detail::boundary_form_ball(g, exponent, BallResolution::at_level(level - 1), variant);
  FormValue fv;
  fv.value = fine;
  fv.error_estimate = std::abs(fine - coarse);
  fv.grid.level = level;
  return fv;
}

namespace detail {

inline double interior_energy_ball_raw(const SphereFunction& g, double p, const BallResolution& res) {
  const KernelSet ks(DomainSpec::ball());
  const QuadratureRule radial = composite_rule(gl8(), 0.0, 1.0, res.panels);
  const QuadratureRule polar = gauss_legendre(res.polar);
  std::vector<double> terms;
  for (std::size_t a = 0; a < radial.nodes.size(); ++a) {
    const double r = radial.nodes[a];
    for (std::size_t b = 0; b < polar.nodes.size(); ++b) {
      const double ct = polar.nodes[b];
      const double st = std::sqrt(1.0 - ct * ct);
      for (int c = 0; c < res.azimuth; ++c) {
        const double psi = kTwoPi * c / res.azimuth;
        const Vec x{r * st * std::cos(psi), r * st * std::sin(psi), r * ct};
        // u and grad u from one pass over the boundary.
        const SphereRule rule = sphere_rule_for_point(x, 2);
        const double one_minus = 1.0 - dot(x, x);
        double u = 0.0;
        Vec grad{0.0, 0.0, 0.0};
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
          const Vec d = x - rule.points[q];
          const double r2 = dot(d, d);
          const double r1 = std::sqrt(r2);
          const double r3 = r2 * r1;
          const double wg = rule.weights[q] * g(rule.points[q]) / (4.0 * kPi);
          u += wg * one_minus / r3;
          for (std::size_t i = 0; i < 3; ++i) grad[i] += wg * (-2.0 * x[i] / r3 - 3.0 * one_minus * d[i] / (r3 * r2));
        }
        const double weight = radial.weights[a] * r * r * polar.weights[b] * (kTwoPi / res.azimuth);
        terms.push_back(weight * energy_density(u, dot(grad, grad), p));
      }
    }
  }
  return pairwise_sum(terms);
}

}  // namespace detail

/// E_D^p[P_D[g]] on the ball, with u and grad u from direct kernel quadrature.
inline FormValue interior_energy_edp(const SphereFunction& g, Exponent exponent, int level) {
  const double p = exponent.value();
  const double scale = p * (p - 1.0);
  const double fine = detail::interior_energy_ball_raw(g, p, BallResolution::at_level(level));
  const double coarse = detail::interior_energy_ball_raw(g, p, BallResolution::at_level(level - 1));
  FormValue fv;
  fv.value = scale * fine;
  fv.error_estimate = scale * std::abs(fine - coarse);
  fv.grid.level = level;
  return fv;
}

/// Interval: E = p(p-1) int_a^b c^2 |c x + d|^{p-2} dx. The interval is split
/// at the zero of u; on a piece where |u| vanishes at one end the substitution
/// t = L s^{1/(p-1)} removes the endpoint singularity before Gauss-Legendre.
inline FormValue interior_energy_edp(const IntervalHarmonic& u, Exponent exponent) {
  const double p = exponent.value();
  const double c = u.slope;
  FormValue fv;
  fv.grid.level = 0;
  if (c == 0.0) return fv;
  const double a = u.domain.a;
  const double b = u.domain.b;
  const double zero = -u.intercept / c;
  std::vector<std::pair<double, double>> pieces;
  if (zero > a && zero < b) {
    pieces = {{zero, a}, {zero, b}};  // (root, far end)
  } else if (zero == a || zero == b) {
    pieces = {{zero, zero == a ? b : a}};
  }
  const QuadratureRule rule = gauss_legendre(32);
  std::vector<double> terms;
  if (pieces.empty()) {
    const double half = 0.5 * (b - a);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double x = a + half * (rule.nodes[i] + 1.0);
      terms.push_back(half * rule.weights[i] * c * c * std::pow(std::abs(u(x)), p - 2.0));
    }
  } else {
    const double k = 1.0 / (p - 1.0);
    for (const auto& [root, far] : pieces) {
      const double len = std::abs(far - root);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double s = 0.5 * (rule.nodes[i] + 1.0);
        const double t = len * std::pow(s, k);
        const double jac = len * k * std::pow(s, k - 1.0);
        terms.push_back(0.5 * rule.weights[i] * jac * c * c * std::pow(std::abs(c) * t, p - 2.0));
      }
    }
  }
  fv.value = p * (p - 1.0) * pairwise_sum(terms);
  return fv;
}

namespace detail {

inline double green_weighted_raw(const HarmonicDiskFunction& h, double p, const Vec& x, const QuadratureGrid& grid) {
  const KernelSet ks(DomainSpec::disk());
  const int panels = std::max(2, grid.n_r / 8 + 2);
  const int nt = grid.n_theta;
  const double x2 = dot(x, x);
  std::vector<double> rays(static_cast<std::size_t>(nt));
  std::vector<double> terms;
  for (int j = 0; j < nt; ++j) {
    const double phi = kTwoPi * j / nt;
    const Vec e{std::cos(phi), std::sin(phi), 0.0};
    const double xe = dot(x, e);
    const double reach = -xe + std::sqrt(xe * xe + 1.0 - x2);
    const QuadratureRule t_rule = graded_rule(gl8(), reach, panels);
    terms.clear();
    for (std::size_t q = 0; q < t_rule.nodes.size(); ++q) {
      const double t = t_rule.nodes[q];
      const Vec y = x + t * e;
      const auto [f, df] = h.analytic({y[0], y[1]});
      const double dens = energy_density(f.real(), std::norm(df), p);
      terms.push_back(dens == 0.0 ? 0.0 : t_rule.weights[q] * t * ks.green(x, y) * dens);
    }
    rays[static_cast<std::size_t>(j)] = pairwise_sum(terms);
  }
  return pairwise_sum(rays) * (kTwoPi / nt);
}

}  // namespace detail

/// int_D G_D(x, y) |u(y)|^{p-2} |grad u(y)|^2 dy in polar coordinates centred
/// at x (rays to the circle, panels graded toward the log singularity at y = x).
inline FormValue green_weighted_energy(const HarmonicDiskFunction& h, Exponent exponent, const Vec& x,
                                       const QuadratureGrid& grid) {
  if (!(norm(x) < 1.0)) throw DomainError("green_weighted_energy: x must be interior");
  const double fine = detail::green_weighted_raw(h, exponent.value(), x, grid);
  const double coarse = detail::green_weighted_raw(h, exponent.value(), x, grid.coarsened());
  return {fine, std::abs(fine - coarse), grid, {}};
}

/// E^x |g(X_tau)|^p = int |g(z)|^p P_D(x, z) dz on the disk.
inline double poisson_expectation(const KernelSet& ks, const BoundaryFunction& g, Exponent exponent, const Vec& x,
                                  double tol = 1e-13) {
  const double p = exponent.value();
  const BoundaryFunction powered = BoundaryFunction::analytic(
      g.name() + "^p", [&](double t) { return std::pow(std::abs(g(t)), p); });
  return poisson_extend_pointwise(ks, powered, x, tol);
}

/// Ball version, sphere quadrature centred on x.
inline double poisson_expectation(const KernelSet& ks, const SphereFunction& g, Exponent exponent, const Vec& x,
                                  int resolution = 2) {
  const double p = exponent.value();
  const SphereFunction powered{g.name + "^p", [&](const Vec& z) { return std::pow(std::abs(g(z)), p); }};
  return poisson_extend_pointwise(ks, powered, x, resolution);
}

/// Interval version: two endpoint weights.
inline double poisson_expectation(const KernelSet& ks, const IntervalHarmonic& u, Exponent exponent, double x) {
  const double p = exponent.value();
  const auto& iv = ks.domain().as_interval();
  const Vec xv{x, 0.0, 0.0};
  return std::pow(std::abs(u.at_a()), p) * ks.poisson(xv, {iv.a, 0.0, 0.0}) +
         std::pow(std::abs(u.at_b()), p) * ks.poisson(xv, {iv.b, 0.0, 0.0});
}

}  // namespace pdouglas
