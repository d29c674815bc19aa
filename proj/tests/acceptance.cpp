// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pdouglas/identities.hpp"

using namespace pdouglas;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, double budget_seconds, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_seconds > 0.0) o.require(seconds < budget_seconds, "runtime budget " + std::to_string(budget_seconds) + " s");
  if (!o.pass) ++failures;
  std::printf("%s %2d %s (%.2f s)%s\n", o.pass ? "PASS" : "FAIL", id, title, seconds, o.detail.str().c_str());
  std::fflush(stdout);
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

CheckOptions at_level(int level) {
  CheckOptions o;
  o.level = level;
  return o;
}

}  // namespace

int main() {
  criterion(1, "interval exactness, u = x on (0,1), p in {1.5, 2, 3}", 1.0, [](Outcome& o) {
    const IntervalHarmonic u{1.0, 0.0, {0.0, 1.0}};
    const double ps[] = {1.5, 2.0, 3.0};
    const double form[] = {1.5, 2.0, 3.0};     // p(p-1) int |x|^{p-2}
    const double display[] = {2.0, 1.0, 0.5};  // int |x|^{p-2} and its two-point counterpart
    for (int i = 0; i < 3; ++i) {
      const auto r = check_douglas(u, Exponent(ps[i]));
      const double dl = r.params["display_lhs"].get<double>();
      const double dr = r.params["display_rhs"].get<double>();
      o.detail << " p=" << ps[i] << ": E=H=" << r.lhs << ", display " << dl << "=" << dr << ";";
      o.require(r.pass && r.rel_diff <= 1e-12, "form sides differ");
      o.require(rel(r.lhs, form[i]) <= 1e-12 && rel(r.rhs, form[i]) <= 1e-12, "form value");
      o.require(rel(dl, display[i]) <= 1e-12 && rel(dr, display[i]) <= 1e-12, "display value");
    }
  });

  criterion(2, "classical Douglas, disk, p = 2, g = cos", 10.0, [](Outcome& o) {
    const auto g = parse_boundary_preset("cos");
    const auto r = check_douglas(g, Exponent(2), at_level(3));
    o.detail << " L3: E=" << r.lhs << " H=" << r.rhs << ";";
    o.require(rel(r.lhs, kTwoPi) <= 1e-6 && rel(r.rhs, kTwoPi) <= 1e-6, "values at level 3");
    // Order >= 1 means each refinement at least halves the error; errors at
    // the roundoff floor satisfy every such bound.
    const double floor = 1e-12 * kTwoPi;
    const auto h = fourier_project(g);
    for (const char* side : {"E", "H"}) {
      double prev = -1.0;
      o.detail << " " << side << " errors:";
      for (int level = 0; level <= 3; ++level) {
        const auto grid = QuadratureGrid::at_level(level);
        const double v = side[0] == 'E' ? interior_energy_edp(h, Exponent(2), grid).value
                                        : boundary_form_hdp(g, Exponent(2), grid).value;
        const double err = std::abs(v - kTwoPi);
        o.detail << " " << err;
        if (prev >= 0.0) {
          const bool at_floor = err <= floor;
          o.require(at_floor || err <= 0.5 * prev, std::string("order < 1 for ") + side);
          if (!at_floor && prev > floor) o.detail << " (order " << std::log2(prev / err) << ")";
        }
        prev = err;
      }
      o.detail << ";";
    }
  });

  criterion(3, "p-Douglas, disk, p = 3, g = 0.5 + cos", 60.0, [](Outcome& o) {
    const auto g = parse_boundary_preset("shifted-cos:0.5");
    const auto h = fourier_project(g);
    double prev = std::numeric_limits<double>::infinity();
    for (int level = 1; level <= 3; ++level) {
      const auto grid = QuadratureGrid::at_level(level);
      const double e = interior_energy_edp(h, Exponent(3), grid).value;
      const double hb = boundary_form_hdp(g, Exponent(3), grid).value;
      const double d = rel(e, hb);
      o.detail << " L" << level << " rel=" << d << ";";
      o.require(d < prev, "no improvement under refinement");
      prev = d;
    }
    const auto r = check_douglas(g, Exponent(3), at_level(3));
    o.detail << " E=" << r.lhs << " H=" << r.rhs;
    o.require(r.pass && r.rel_diff <= 1e-3, "level-3 agreement");
  });

  criterion(4, "Hardy-Stein, disk, p = 2, g = cos", 30.0, [](Outcome& o) {
    const auto g = parse_boundary_preset("cos");
    const auto a = check_hardy_stein(g, Exponent(2), {0, 0, 0}, at_level(3));
    o.detail << " origin: " << a.lhs << " vs " << a.rhs << ";";
    o.require(std::abs(a.lhs - 0.5) <= 1e-6 && std::abs(a.rhs - 0.5) <= 1e-6, "origin values");
    const auto b = check_hardy_stein(g, Exponent(2), {0.3, 0, 0}, at_level(3));
    o.detail << " (0.3,0): " << b.lhs << " vs " << b.rhs << " rel=" << b.rel_diff;
    o.require(b.rel_diff <= 1e-4, "off-centre agreement");
  });

  criterion(5, "p-variance, 10 random configurations, both displays", 0.0, [](Outcome& o) {
    std::mt19937_64 rng(20240601);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const Vec x = detail::random_interior_point(2, rng);
      const double p = 1.1 + 3.9 * detail::uniform01(rng);
      std::ostringstream spec;
      spec.precision(17);
      spec << "trig:" << 2.0 * detail::uniform01(rng) - 1.0;
      for (int k = 0; k < 6; ++k) spec << ',' << 2.0 * detail::uniform01(rng) - 1.0;
      const auto r = check_p_variance(parse_boundary_preset(spec.str()), Exponent(p), x,
                                      kTwoPi * detail::uniform01(rng), at_level(3));
      worst = std::max({worst, r.rel_diff, r.params["shifted_rel_diff"].get<double>()});
    }
    o.detail << " worst rel=" << worst;
    o.require(worst <= 1e-5, "rel diff above 1e-5");
  });

  criterion(6, "remainder identity, u = x1^2, p in {2, 3}", 0.0, [](Outcome& o) {
    const auto u = parse_smooth_preset("x1sq");
    for (double p : {2.0, 3.0}) {
      const auto r = check_remainder(u, Exponent(p), at_level(3));
      o.detail << " p=" << p << ": " << r.lhs << " vs " << r.rhs << " rel=" << r.rel_diff << ";";
      o.require(r.rel_diff <= 1e-3, "four-term identity");
    }
    // Harmonic input: both corrections vanish and the numbers of criterion 3 return.
    const auto g = parse_boundary_preset("shifted-cos:0.5");
    const auto harm = check_remainder(smooth_from_harmonic(fourier_project(g), "harmonic"), Exponent(3), at_level(3));
    const auto doug = check_douglas(g, Exponent(3), at_level(3));
    o.detail << " harmonic: " << harm.lhs << " vs " << harm.rhs << ";";
    o.require(harm.params["interior_term"].get<double>() == 0.0 && harm.params["poisson_term"].get<double>() == 0.0,
              "corrections vanish");
    o.require(rel(harm.lhs, doug.lhs) <= 1e-12 && rel(harm.rhs, doug.rhs) <= 1e-10, "reproduces criterion 3");
  });

  criterion(7, "vanishing boundary, v = 1 - r^2, p = 2", 0.0, [](Outcome& o) {
    const auto r = check_vanishing(parse_smooth_preset("one-minus-r2"), Exponent(2), at_level(3));
    o.detail << " " << r.lhs << " vs " << r.rhs;
    o.require(rel(r.lhs, kTwoPi) <= 1e-6 && rel(r.rhs, kTwoPi) <= 1e-6, "both sides 2 pi");
  });

  criterion(8, "Bregman chain envelopes, 1e4 pairs", 0.0, [](Outcome& o) {
    for (double p : {1.2, 1.5, 2.0, 3.0, 4.0}) {
      const auto r = check_fpequiv(Exponent(p), 10000, 20240601);
      o.detail << " p=" << p << ": [" << r.lhs << ", " << r.rhs << "];";
      o.require(r.pass && r.lhs > 0.0 && std::isfinite(r.rhs), "envelope not finite positive");
      if (p == 2.0) o.require(r.params["max_abs_ratio_minus_one"].get<double>() <= 1e-12, "p = 2 ratios");
    }
  });

  criterion(9, "minimizer, g = 1.5 + cos", 0.0, [](Outcome& o) {
    const auto g = parse_boundary_preset("shifted-cos:1.5");
    const auto r = check_minimizer(g, Exponent(3), at_level(3));
    const double gap = r.params["gap"].get<double>();
    const double err = r.params["combined_error_estimate"].get<double>();
    o.detail << " p=3: " << r.lhs << " < " << r.rhs << " gap=" << gap << " err=" << err << ";";
    o.require(r.lhs < r.rhs && gap > 3.0 * err, "strict gap");
    const auto two = check_minimizer(g, Exponent(2), at_level(3));
    o.detail << " p=2 rel=" << two.rel_diff;
    o.require(two.rel_diff <= 1e-10, "p = 2 equality");
  });

  criterion(10, "quasiminimizer probe, rho in {0.5, 0.7, 0.9}", 0.0, [](Outcome& o) {
    const auto g = parse_boundary_preset("shifted-cos:1.5");
    for (double rho : {0.5, 0.7, 0.9}) {
      const auto r = check_quasimin(g, Exponent(3), rho, at_level(3));
      o.detail << " K(" << rho << ")=" << r.lhs << ";";
      o.require(std::isfinite(r.lhs) && r.lhs >= 1.0 - 1e-9, "K_obs bound");
      const auto two = check_quasimin(g, Exponent(2), rho, at_level(3));
      o.require(std::abs(two.lhs - 1.0) <= 1e-6, "p = 2 gives K = 1");
    }
  });

  criterion(11, "Monte Carlo, x = (0.3,0), p = 2, g = cos", 60.0, [](Outcome& o) {
    const auto g = parse_boundary_preset("cos");
    McConfig cfg;
    cfg.n = 1000000;
    cfg.seed = 20240601;
    cfg.x = {0.3, 0.0, 0.0};
    const auto r = check_monte_carlo(g, Exponent(2), cfg);
    o.detail << " mc=" << r.lhs << " quad=" << r.rhs << " z=" << r.params["z_score"].get<double>() << ";";
    o.require(r.pass, "outside 4 sigma");
    const double oracle = r.rhs;
    int inside = 0;
    for (std::uint64_t s = 1; s <= 50; ++s) {
      cfg.seed = s;
      cfg.n = 200000;
      const auto e = mc_expectation(cfg, g, Exponent(2));
      if (std::abs(e.mean - oracle) <= 4.0 * e.standard_error) ++inside;
    }
    o.detail << " envelope " << inside << "/50";
    o.require(inside >= 46, "Chebyshev envelope");
  });

  criterion(12, "trace round trip, g = 0.5 + cos + 0.25 sin 3t", 0.0, [](Outcome& o) {
    const auto g = parse_boundary_preset("trig:0.5,1,0,0,0,0,0.25");
    const auto h = fourier_project(g);
    double worst = 0.0;
    for (int j = 0; j < 64; ++j) {
      const double t = kTwoPi * j / 64;
      worst = std::max(worst, std::abs(radial_trace(h, t) - g(t)));
    }
    o.detail << " max trace error " << worst << ";";
    o.require(worst <= 1e-8, "trace error");
    const auto trace = recovered_trace(h, 64);
    for (double p : {2.0, 3.0}) {
      const auto a = check_douglas(g, Exponent(p), at_level(3));
      const auto b = check_douglas(trace, Exponent(p), at_level(3));
      const double tol = a.tolerance + b.tolerance;
      o.detail << " p=" << p << ": " << a.lhs << "/" << b.lhs << ", " << a.rhs << "/" << b.rhs << ";";
      o.require(a.pass && b.pass, "douglas check");
      o.require(rel(a.lhs, b.lhs) <= tol && rel(a.rhs, b.rhs) <= tol, "recovered trace values");
    }
  });

  std::printf("%s: %d of 12 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
