#pragma once

// Identity reports: two independently computed sides, their discrepancy,
// and the pass decision, with a stable JSON form.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdouglas/forms.hpp"

namespace pdouglas {

using Json = nlohmann::ordered_json;

/// Sides closer to zero than this are compared in absolute terms.
inline constexpr double kNearZero = 1e-10;
inline constexpr double kRelativeFloor = 1e-300;

struct IdentityReport {
  std::string identity;
  std::string domain;
  std::optional<double> p;
  Json params = Json::object();
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_diff = 0.0;
  double rel_diff = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  Json grid = Json::object();
  std::vector<std::string> notes;

  /// Reports flagged informational do not count toward a run's exit status.
  bool informational() const { return params.value("informational", false); }

  /// Computes abs/rel differences and the default pass decision.
  void compare() {
    abs_diff = std::abs(lhs - rhs);
    const double scale = std::max({std::abs(lhs), std::abs(rhs), kRelativeFloor});
    rel_diff = abs_diff / scale;
    if (!std::isfinite(lhs) || !std::isfinite(rhs)) {
      pass = false;
      return;
    }
    pass = std::max(std::abs(lhs), std::abs(rhs)) <= kNearZero ? abs_diff <= kNearZero : rel_diff <= tolerance;
  }
};

inline Json grid_json(const QuadratureGrid& g) {
  return Json{{"level", g.level}, {"n_r", g.n_r}, {"n_theta", g.n_theta}, {"m", g.m}, {"s0", g.diagonal_band()}};
}

/// JSON cannot carry inf/nan; they are written as strings.
inline Json number_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline Json to_json(const IdentityReport& r) {
  return Json{{"identity", r.identity},
              {"domain", r.domain},
              {"p", r.p ? Json(*r.p) : Json(nullptr)},
              {"params", r.params},
              {"lhs", number_json(r.lhs)},
              {"rhs", number_json(r.rhs)},
              {"abs_diff", number_json(r.abs_diff)},
              {"rel_diff", number_json(r.rel_diff)},
              {"tolerance", r.tolerance},
              {"pass", r.pass},
              {"grid", r.grid},
              {"notes", r.notes}};
}

inline double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

inline IdentityReport report_from_json(const Json& j) {
  IdentityReport r;
  r.identity = j.at("identity").get<std::string>();
  r.domain = j.at("domain").get<std::string>();
  if (!j.at("p").is_null()) r.p = j.at("p").get<double>();
  r.params = j.at("params");
  r.lhs = number_from_json(j.at("lhs"));
  r.rhs = number_from_json(j.at("rhs"));
  r.abs_diff = number_from_json(j.at("abs_diff"));
  r.rel_diff = number_from_json(j.at("rel_diff"));
  r.tolerance = j.at("tolerance").get<double>();
  r.pass = j.at("pass").get<bool>();
  r.grid = j.at("grid");
  r.notes = j.at("notes").get<std::vector<std::string>>();
  return r;
}

/// Stable CSV columns for flat report tables.
inline const char* report_csv_header() {
  return "identity,domain,p,lhs,rhs,abs_diff,rel_diff,tolerance,pass";
}

}  // namespace pdouglas
