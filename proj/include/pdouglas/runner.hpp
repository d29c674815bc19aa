#pragma once

// Run configuration, subcommand dispatch and report output for the CLI.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pdouglas/boundary.hpp"
#include "pdouglas/errors.hpp"
#include "pdouglas/identities.hpp"
#include "pdouglas/montecarlo.hpp"
#include "pdouglas/report.hpp"

namespace pdouglas {

inline const std::vector<std::string>& known_subcommands() {
  static const std::vector<std::string> names{
      "check-douglas",   "check-hardy-stein", "check-pvariance", "check-remainder",
      "check-vanishing", "check-minimizer",   "check-quasimin",  "check-fpequiv",
      "mc-validate",     "convergence",       "suite"};
  return names;
}

struct RunConfig {
  std::string subcommand = "suite";
  std::string domain = "disk";
  double a = 0.0;
  double b = 1.0;
  std::string g = "cos";
  std::string u;  // interval: "linear:c,d"; remainder: smooth preset
  std::string v = "one-minus-r2";
  std::string fourier_csv;
  std::vector<double> p{2.0};
  std::vector<int> levels{3};
  std::optional<double> tol;
  std::uint64_t seed = 20240601;
  long long n = 1000000;
  std::vector<double> x{0.0, 0.0};
  double w = 0.0;
  std::vector<double> rho{0.5, 0.7, 0.9};
  int order = kDefaultOrder;
  int samples = 10000;
  double eps = 1e-3;
  std::string target = "douglas";
  std::string output;
  std::string format = "json";

  void validate() const {
    const auto& subs = known_subcommands();
    if (std::find(subs.begin(), subs.end(), subcommand) == subs.end()) {
      throw ConfigError("unknown subcommand '" + subcommand + "'");
    }
    if (domain != "disk" && domain != "interval" && domain != "ball") {
      throw ConfigError("domain must be one of interval, disk, ball");
    }
    if (domain == "interval" && !(a < b)) throw ConfigError("interval requires a < b");
    if (p.empty()) throw ConfigError("at least one exponent p is required");
    for (double q : p) {
      if (!(q > 1.0) || !std::isfinite(q)) throw ConfigError("every p must be finite and > 1");
    }
    if (levels.empty()) throw ConfigError("at least one grid level is required");
    for (int l : levels) {
      if (l < 0 || l > 6) throw ConfigError("grid levels must lie in [0, 6]");
    }
    if (tol && !(*tol > 0.0)) throw ConfigError("tolerance must be positive");
    if (n < 1) throw ConfigError("n must be >= 1");
    if (samples < 1) throw ConfigError("samples must be >= 1");
    if (order < 1) throw ConfigError("order must be >= 1");
    if (!(eps > 0.0 && eps < 0.1)) throw ConfigError("eps must lie in (0, 0.1)");
    if (format != "json" && format != "csv") throw ConfigError("format must be json or csv");
    if (x.size() < 1 || x.size() > 3) throw ConfigError("x takes 1 to 3 coordinates");
    for (double r : rho) {
      if (!(r > 0.0 && r < 1.0)) throw ConfigError("every rho must lie in (0, 1)");
    }
  }

  Vec point() const {
    Vec out{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < x.size() && i < 3; ++i) out[i] = x[i];
    return out;
  }
};

inline Json to_json(const RunConfig& c) {
  return Json{{"subcommand", c.subcommand},
              {"domain", c.domain},
              {"a", c.a},
              {"b", c.b},
              {"g", c.g},
              {"u", c.u},
              {"v", c.v},
              {"fourier_csv", c.fourier_csv},
              {"p", c.p},
              {"levels", c.levels},
              {"tol", c.tol ? Json(*c.tol) : Json(nullptr)},
              {"seed", c.seed},
              {"n", c.n},
              {"x", c.x},
              {"w", c.w},
              {"rho", c.rho},
              {"order", c.order},
              {"samples", c.samples},
              {"eps", c.eps},
              {"target", c.target},
              {"output", c.output},
              {"format", c.format}};
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline RunConfig run_config_from_json(const Json& j) {
  RunConfig c;
  const Json reference = to_json(c);
  for (const auto& [key, _] : j.items()) {
    if (!reference.contains(key)) throw ConfigError("unknown configuration key '" + key + "'");
  }
  try {
    const auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("subcommand", c.subcommand);
    get("domain", c.domain);
    get("a", c.a);
    get("b", c.b);
    get("g", c.g);
    get("u", c.u);
    get("v", c.v);
    get("fourier_csv", c.fourier_csv);
    get("p", c.p);
    get("levels", c.levels);
    if (j.contains("tol") && !j.at("tol").is_null()) c.tol = j.at("tol").get<double>();
    get("seed", c.seed);
    get("n", c.n);
    get("x", c.x);
    get("w", c.w);
    get("rho", c.rho);
    get("order", c.order);
    get("samples", c.samples);
    get("eps", c.eps);
    get("target", c.target);
    get("output", c.output);
    get("format", c.format);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  return c;
}

struct ConvergenceRow {
  std::string quantity;
  int level = 0;
  double value = 0.0;
  double reference = 0.0;
  double abs_error = 0.0;
  std::optional<double> observed_order;
};

struct RunResult {
  std::vector<IdentityReport> reports;
  std::vector<ConvergenceRow> convergence;
  std::vector<std::string> skipped;
  bool convergence_monotone = true;

  bool all_pass() const {
    for (const auto& r : reports) {
      if (!r.pass && !r.informational()) return false;
    }
    return convergence_monotone;
  }
  int exit_status() const { return all_pass() ? 0 : 1; }
};

namespace detail {

inline BoundaryFunction circle_data(const RunConfig& c) {
  if (!c.fourier_csv.empty()) return BoundaryFunction::fourier("csv:" + c.fourier_csv, load_fourier_csv(c.fourier_csv));
  return parse_boundary_preset(c.g);
}

inline IntervalHarmonic interval_data(const RunConfig& c) {
  return parse_interval_preset(c.u.empty() ? "linear:1,0" : c.u, Interval{c.a, c.b});
}

inline SphereFunction sphere_data(const RunConfig& c) {
  return parse_sphere_preset(c.g == "cos" ? "linear:0,0,1" : c.g);
}

inline SmoothDiskFunction smooth_data(const std::string& spec, const RunConfig& c) {
  if (spec == "harmonic") return smooth_from_harmonic(fourier_project(circle_data(c), c.order), "harmonic:" + c.g);
  return parse_smooth_preset(spec);
}

inline CheckOptions options(const RunConfig& c, int level) {
  CheckOptions o;
  o.level = level;
  o.order = c.order;
  o.tolerance = c.tol;
  return o;
}

inline McConfig mc_config(const RunConfig& c, const DomainSpec& domain, const Vec& x) {
  McConfig m;
  m.n = c.n;
  m.seed = c.seed;
  m.x = x;
  m.domain = domain;
  m.wos_eps = c.eps;
  return m;
}

inline void require_disk(const RunConfig& c) {
  if (c.domain != "disk") throw ConfigError(c.subcommand + " is defined on the disk only");
}

/// Closed-form references for the convergence study, or nullopt.
inline std::optional<double> douglas_reference(const RunConfig& c, double p) {
  if (c.domain == "interval") {
    const IntervalHarmonic u = interval_data(c);
    return p * u.slope * (signed_power(u.at_b(), p - 1.0) - signed_power(u.at_a(), p - 1.0));
  }
  if (c.domain != "disk" || !c.fourier_csv.empty()) return std::nullopt;
  const BoundaryFunction g = parse_boundary_preset(c.g);
  if (is_constant(g)) return 0.0;
  if (c.g == "cos" && p == 2.0) return kTwoPi;
  if (c.g == "cos" && p == 4.0) return 3.0 * kPi;
  if (p == 2.0 && g.table() && g.table()->a0 == 0.0) {
    // 2 int |grad u|^2 = 2 pi sum n (a_n^2 + b_n^2) for band-limited data.
    const FourierTable& t = *g.table();
    double s = 0.0;
    for (std::size_t k = 0; k < t.a.size(); ++k) s += static_cast<double>(k + 1) * (t.a[k] * t.a[k] + t.b[k] * t.b[k]);
    return kTwoPi * s;
  }
  return std::nullopt;
}

inline std::optional<double> hardy_stein_reference(const RunConfig& c, double p) {
  if (c.domain != "disk" || c.g != "cos" || !c.fourier_csv.empty()) return std::nullopt;
  const Vec x = c.point();
  const double r2 = x[0] * x[0] + x[1] * x[1];
  if (p == 2.0) return 0.5 * (1.0 - r2);
  if (p == 4.0 && r2 == 0.0) return 0.375;
  return std::nullopt;
}

inline void append_rows(RunResult& out, const std::string& quantity, const std::vector<int>& levels,
                        const std::vector<double>& values, double reference) {
  const double floor = 1e-12 * std::max(1.0, std::abs(reference));
  std::optional<double> prev_err;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    ConvergenceRow row;
    row.quantity = quantity;
    row.level = levels[i];
    row.value = values[i];
    row.reference = reference;
    row.abs_error = std::abs(values[i] - reference);
    if (prev_err && *prev_err > floor && row.abs_error > floor) {
      row.observed_order = std::log2(*prev_err / row.abs_error);
    }
    if (prev_err && row.abs_error > floor && row.abs_error > *prev_err) out.convergence_monotone = false;
    prev_err = row.abs_error;
    out.convergence.push_back(row);
  }
}

}  // namespace detail

/// Errors against a closed-form reference across grid levels.
inline void run_convergence(const RunConfig& c, RunResult& out) {
  std::vector<int> levels = c.levels;
  if (levels.size() == 1) {
    levels.clear();
    for (int l = 0; l <= c.levels.front(); ++l) levels.push_back(l);
  }
  std::sort(levels.begin(), levels.end());
  for (double p : c.p) {
    const Exponent e(p);
    if (c.target == "douglas") {
      const auto ref = detail::douglas_reference(c, p);
      if (!ref) {
        throw ConfigError("convergence: no closed-form reference for douglas with this data; anchored cases are "
                          "interval linear data, disk constants, disk cos with p in {2, 4}, band-limited disk data "
                          "with p = 2");
      }
      std::vector<double> interior;
      std::vector<double> boundary;
      for (int l : levels) {
        if (c.domain == "interval") {
          const IntervalHarmonic u = detail::interval_data(c);
          interior.push_back(interior_energy_edp(u, e).value);
          boundary.push_back(boundary_form_hdp(u, e).value);
        } else {
          const BoundaryFunction g = parse_boundary_preset(c.g);
          const QuadratureGrid grid = QuadratureGrid::at_level(l);
          interior.push_back(interior_energy_edp(fourier_project(g, c.order), e, grid).value);
          boundary.push_back(boundary_form_hdp(g, e, grid).value);
        }
      }
      detail::append_rows(out, "interior_energy", levels, interior, *ref);
      detail::append_rows(out, "boundary_form", levels, boundary, *ref);
    } else if (c.target == "hardy-stein") {
      const auto ref = detail::hardy_stein_reference(c, p);
      if (!ref) {
        throw ConfigError("convergence: no closed-form reference for hardy-stein; anchored cases are disk cos "
                          "with p = 2 (any x) or p = 4 at the origin");
      }
      const BoundaryFunction g = parse_boundary_preset(c.g);
      const HarmonicDiskFunction h = fourier_project(g, c.order);
      std::vector<double> rhs;
      for (int l : levels) rhs.push_back(p * (p - 1.0) * green_weighted_energy(h, e, c.point(), QuadratureGrid::at_level(l)).value);
      detail::append_rows(out, "hardy_stein_rhs", levels, rhs, *ref);
    } else {
      throw ConfigError("convergence: target must be douglas or hardy-stein");
    }
  }
}

/// Executes one subcommand. Configuration errors propagate as exceptions.
inline RunResult run(const RunConfig& c) {
  c.validate();
  RunResult out;
  const int level = c.levels.back();
  const auto opt = detail::options(c, level);
  const std::string& s = c.subcommand;
  if (s == "check-douglas") {
    for (double p : c.p) {
      if (c.domain == "interval") out.reports.push_back(check_douglas(detail::interval_data(c), Exponent(p), opt));
      else if (c.domain == "ball") out.reports.push_back(check_douglas(detail::sphere_data(c), Exponent(p), opt));
      else out.reports.push_back(check_douglas(detail::circle_data(c), Exponent(p), opt));
    }
  } else if (s == "check-hardy-stein") {
    detail::require_disk(c);
    for (double p : c.p) out.reports.push_back(check_hardy_stein(detail::circle_data(c), Exponent(p), c.point(), opt));
  } else if (s == "check-pvariance") {
    detail::require_disk(c);
    for (double p : c.p) {
      out.reports.push_back(check_p_variance(detail::circle_data(c), Exponent(p), c.point(), c.w, opt));
    }
  } else if (s == "check-remainder") {
    detail::require_disk(c);
    const SmoothDiskFunction u = detail::smooth_data(c.u.empty() ? "x1sq" : c.u, c);
    for (double p : c.p) out.reports.push_back(check_remainder(u, Exponent(p), opt));
  } else if (s == "check-vanishing") {
    detail::require_disk(c);
    const SmoothDiskFunction v = detail::smooth_data(c.v, c);
    for (double p : c.p) out.reports.push_back(check_vanishing(v, Exponent(p), opt));
  } else if (s == "check-minimizer") {
    detail::require_disk(c);
    for (double p : c.p) out.reports.push_back(check_minimizer(detail::circle_data(c), Exponent(p), opt));
  } else if (s == "check-quasimin") {
    detail::require_disk(c);
    for (double p : c.p) {
      for (double r : c.rho) out.reports.push_back(check_quasimin(detail::circle_data(c), Exponent(p), r, opt));
    }
  } else if (s == "check-fpequiv") {
    for (double p : c.p) out.reports.push_back(check_fpequiv(Exponent(p), c.samples, c.seed));
  } else if (s == "mc-validate") {
    for (double p : c.p) {
      if (c.domain == "ball") {
        out.reports.push_back(
            check_monte_carlo(detail::sphere_data(c), Exponent(p), detail::mc_config(c, DomainSpec::ball(), c.point())));
      } else {
        detail::require_disk(c);
        out.reports.push_back(
            check_monte_carlo(detail::circle_data(c), Exponent(p), detail::mc_config(c, DomainSpec::disk(), c.point())));
      }
    }
  } else if (s == "convergence") {
    run_convergence(c, out);
  } else if (s == "suite") {
    if (c.domain == "interval") {
      const IntervalHarmonic u = detail::interval_data(c);
      for (double p : c.p) out.reports.push_back(check_douglas(u, Exponent(p), opt));
      for (double p : c.p) out.reports.push_back(check_fpequiv(Exponent(p), c.samples, c.seed));
      return out;
    }
    if (c.domain == "ball") {
      const SphereFunction g = detail::sphere_data(c);
      const Vec x = c.point();
      for (double p : c.p) {
        out.reports.push_back(check_douglas(g, Exponent(p), opt));
        out.reports.push_back(check_monte_carlo(g, Exponent(p), detail::mc_config(c, DomainSpec::ball(), x)));
      }
      return out;
    }
    const BoundaryFunction g = detail::circle_data(c);
    const Vec origin{0.0, 0.0, 0.0};
    const Vec off{0.3, 0.0, 0.0};
    const IntervalHarmonic iu{1.0, 0.0, Interval{0.0, 1.0}};
    for (double p : c.p) {
      const Exponent e(p);
      out.reports.push_back(check_douglas(g, e, opt));
      out.reports.push_back(check_douglas(iu, e, opt));
      out.reports.push_back(check_hardy_stein(g, e, origin, opt));
      out.reports.push_back(check_hardy_stein(g, e, off, opt));
      out.reports.push_back(check_p_variance(g, e, Vec{0.2, 0.1, 0.0}, c.w, opt));
      if (p >= 2.0) {
        out.reports.push_back(check_remainder(detail::smooth_data(c.u.empty() ? "x1sq" : c.u, c), e, opt));
      } else {
        out.skipped.push_back("remainder at p = " + std::to_string(p) + ": requires p >= 2");
      }
      out.reports.push_back(check_vanishing(detail::smooth_data(c.v, c), e, opt));
      out.reports.push_back(check_minimizer(g, e, opt));
      for (double r : c.rho) out.reports.push_back(check_quasimin(g, e, r, opt));
      out.reports.push_back(check_fpequiv(e, c.samples, c.seed));
      out.reports.push_back(check_monte_carlo(g, e, detail::mc_config(c, DomainSpec::disk(), off)));
    }
  }
  return out;
}

inline const char* convergence_csv_header() { return "quantity,level,value,reference,abs_error,observed_order"; }

inline std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

/// Report document; contains no timestamps, so identical runs give identical bytes.
inline Json result_json(const RunConfig& c, const RunResult& r) {
  Json reports = Json::array();
  for (const auto& rep : r.reports) reports.push_back(to_json(rep));
  Json doc{{"schema_version", 1}, {"subcommand", c.subcommand}, {"config", to_json(c)}, {"reports", reports}};
  if (!r.convergence.empty()) {
    Json rows = Json::array();
    for (const auto& row : r.convergence) {
      rows.push_back({{"quantity", row.quantity},
                      {"level", row.level},
                      {"value", row.value},
                      {"reference", row.reference},
                      {"abs_error", row.abs_error},
                      {"observed_order", row.observed_order ? Json(*row.observed_order) : Json(nullptr)}});
    }
    doc["convergence"] = rows;
    doc["convergence_monotone"] = r.convergence_monotone;
  }
  doc["skipped"] = r.skipped;
  doc["all_pass"] = r.all_pass();
  return doc;
}

inline std::string result_csv(const RunResult& r) {
  std::ostringstream os;
  if (!r.convergence.empty()) {
    os << convergence_csv_header() << '\n';
    for (const auto& row : r.convergence) {
      os << row.quantity << ',' << row.level << ',' << format_number(row.value) << ','
         << format_number(row.reference) << ',' << format_number(row.abs_error) << ','
         << (row.observed_order ? format_number(*row.observed_order) : "") << '\n';
    }
    return os.str();
  }
  os << report_csv_header() << '\n';
  for (const auto& rep : r.reports) {
    os << rep.identity << ',' << rep.domain << ',' << (rep.p ? format_number(*rep.p) : "") << ','
       << format_number(rep.lhs) << ',' << format_number(rep.rhs) << ',' << format_number(rep.abs_diff) << ','
       << format_number(rep.rel_diff) << ',' << format_number(rep.tolerance) << ',' << (rep.pass ? "true" : "false")
       << '\n';
  }
  return os.str();
}

inline std::string render(const RunConfig& c, const RunResult& r) {
  return c.format == "csv" ? result_csv(r) : result_json(c, r).dump(2) + "\n";
}

/// Output path: --output, else $PDOUGLAS_OUTPUT_DIR/<subcommand>.<format>,
/// else empty (standard output).
inline std::string output_path(const RunConfig& c) {
  if (!c.output.empty()) return c.output;
  if (const char* dir = std::getenv("PDOUGLAS_OUTPUT_DIR"); dir && *dir) {
    return (std::filesystem::path(dir) / (c.subcommand + "." + c.format)).string();
  }
  return {};
}

/// Writes the report (and a sidecar <path>.meta.json with the timestamp).
inline void write_outputs(const RunConfig& c, const RunResult& r, std::ostream& fallback) {
  const std::string body = render(c, r);
  const std::string path = output_path(c);
  if (path.empty()) {
    fallback << body;
    return;
  }
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  std::ofstream f(target, std::ios::binary);
  if (!f) throw ConfigError("cannot write output file " + path);
  f << body;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream stamp;
  stamp << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
  std::ofstream meta(target.string() + ".meta.json", std::ios::binary);
  meta << Json{{"generated_at", stamp.str()}, {"report", target.filename().string()}}.dump(2) << '\n';
}

}  // namespace pdouglas
