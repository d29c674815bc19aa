#pragma once

// Boundary data: functions of the angle on the unit circle, functions on the
// unit sphere, Fourier coefficient tables and the named presets.

#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pdouglas/errors.hpp"
#include "pdouglas/kernels.hpp"
#include "pdouglas/numerics.hpp"

namespace pdouglas {

/// g(theta) = a0 + sum_{n=1..N} (a_n cos n theta + b_n sin n theta).
/// a[n-1] and b[n-1] hold the order-n coefficients.
struct FourierTable {
  double a0 = 0.0;
  std::vector<double> a;
  std::vector<double> b;

  int order() const noexcept { return static_cast<int>(a.size()); }

  /// Degree of the highest nonzero coefficient.
  int degree() const noexcept {
    for (int n = order(); n >= 1; --n) {
      if (a[static_cast<std::size_t>(n - 1)] != 0.0 || b[static_cast<std::size_t>(n - 1)] != 0.0) {
        return n;
      }
    }
    return 0;
  }

  FourierTable resized(int order) const {
    FourierTable t = *this;
    t.a.resize(static_cast<std::size_t>(order), 0.0);
    t.b.resize(static_cast<std::size_t>(order), 0.0);
    return t;
  }

  double value(double theta) const {
    double s = a0;
    for (int n = 1; n <= order(); ++n) {
      s += a[static_cast<std::size_t>(n - 1)] * std::cos(n * theta) +
           b[static_cast<std::size_t>(n - 1)] * std::sin(n * theta);
    }
    return s;
  }

  double derivative(double theta) const {
    double s = 0.0;
    for (int n = 1; n <= order(); ++n) {
      s += n * (-a[static_cast<std::size_t>(n - 1)] * std::sin(n * theta) +
                b[static_cast<std::size_t>(n - 1)] * std::cos(n * theta));
    }
    return s;
  }

  /// sum n (a_n^2 + b_n^2); pi times this is the Dirichlet integral of the extension.
  double weighted_energy() const {
    double s = 0.0;
    for (int n = 1; n <= order(); ++n) {
      const double an = a[static_cast<std::size_t>(n - 1)];
      const double bn = b[static_cast<std::size_t>(n - 1)];
      s += n * (an * an + bn * bn);
    }
    return s;
  }
};

/// Smoothness class of boundary data, as declared by whoever built it.
enum class Regularity { Smooth, Lipschitz, NonLipschitz };

/// Boundary datum g on the unit circle, parametrized by angle.
///
/// Three representations: an analytic callable (optionally with its angular
/// derivative), a uniform sample grid (evaluated through its trigonometric
/// interpolant), or a Fourier coefficient table.
class BoundaryFunction {
 public:
  using Fn = std::function<double(double)>;

  static BoundaryFunction analytic(std::string name, Fn g, Fn dg = {},
                                   Regularity regularity = Regularity::Smooth) {
    if (!g) throw InvalidArgument("boundary function needs a value callable");
    BoundaryFunction f;
    f.name_ = std::move(name);
    f.value_ = std::move(g);
    f.derivative_ = std::move(dg);
    f.regularity_ = regularity;
    return f;
  }

  static BoundaryFunction fourier(std::string name, FourierTable table) {
    if (table.a.size() != table.b.size()) throw InvalidArgument("Fourier table: a and b differ in length");
    auto shared = std::make_shared<const FourierTable>(std::move(table));
    BoundaryFunction f;
    f.name_ = std::move(name);
    f.table_ = shared;
    f.value_ = [shared](double t) { return shared->value(t); };
    f.derivative_ = [shared](double t) { return shared->derivative(t); };
    f.regularity_ = Regularity::Smooth;
    return f;
  }

  /// Uniform samples g(2 pi j / M), j = 0..M-1; M >= 4 and a power of two.
  static BoundaryFunction sampled(std::string name, std::vector<double> samples) {
    const std::size_t m = samples.size();
    if (m < 4 || (m & (m - 1)) != 0) {
      throw InvalidArgument("sample grid size must be a power of two >= 4");
    }
    for (double v : samples) {
      if (!std::isfinite(v)) throw InvalidArgument("sample grid contains non-finite values");
    }
    BoundaryFunction f = fourier(std::move(name), interpolating_table(samples));
    f.samples_ = std::make_shared<const std::vector<double>>(std::move(samples));
    return f;
  }

  double operator()(double theta) const { return value_(theta); }

  bool has_derivative() const noexcept { return static_cast<bool>(derivative_); }

  double derivative(double theta) const {
    if (!derivative_) throw ConfigError("boundary function '" + name_ + "' has no derivative");
    return derivative_(theta);
  }

  const std::string& name() const noexcept { return name_; }
  Regularity regularity() const noexcept { return regularity_; }

  /// Exact coefficient table for band-limited data (table or sampled form).
  const FourierTable* table() const noexcept { return table_.get(); }

  /// Original samples when built by `sampled`.
  const std::vector<double>* samples() const noexcept { return samples_.get(); }

  /// DFT coefficients of the trigonometric interpolant of M samples
  /// (degree M/2, Nyquist cosine term halved).
  static FourierTable interpolating_table(const std::vector<double>& s) {
    const int m = static_cast<int>(s.size());
    const int half = m / 2;
    FourierTable t;
    t.a0 = pairwise_sum(s) / m;
    t.a.assign(static_cast<std::size_t>(half), 0.0);
    t.b.assign(static_cast<std::size_t>(half), 0.0);
    std::vector<double> ca(static_cast<std::size_t>(m));
    std::vector<double> cb(static_cast<std::size_t>(m));
    for (int n = 1; n <= half; ++n) {
      for (int j = 0; j < m; ++j) {
        const double angle = kTwoPi * static_cast<double>((static_cast<long long>(n) * j) % m) / m;
        ca[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j)] * std::cos(angle);
        cb[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j)] * std::sin(angle);
      }
      double an = 2.0 * pairwise_sum(ca) / m;
      double bn = 2.0 * pairwise_sum(cb) / m;
      if (n == half) {
        an *= 0.5;
        bn = 0.0;
      }
      t.a[static_cast<std::size_t>(n - 1)] = an;
      t.b[static_cast<std::size_t>(n - 1)] = bn;
    }
    return t;
  }

 private:
  BoundaryFunction() = default;

  std::string name_;
  Fn value_;
  Fn derivative_;
  Regularity regularity_ = Regularity::Smooth;
  std::shared_ptr<const FourierTable> table_;
  std::shared_ptr<const std::vector<double>> samples_;
};

/// Boundary datum on the unit sphere in R^3.
struct SphereFunction {
  std::string name;
  std::function<double(const Vec&)> value;

  double operator()(const Vec& z) const { return value(z); }
};

/// Boundary data of the interval: the harmonic u(x) = c x + d on (a, b).
struct IntervalHarmonic {
  double slope = 1.0;
  double intercept = 0.0;
  Interval domain{0.0, 1.0};

  double operator()(double x) const { return slope * x + intercept; }
  double at_a() const { return (*this)(domain.a); }
  double at_b() const { return (*this)(domain.b); }
};

namespace detail {

inline std::vector<double> parse_number_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss{std::string(text)};
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument("trailing");
      out.push_back(v);
    } catch (const std::exception&) {
      throw InvalidArgument("cannot parse number '" + item + "' in " + std::string(what));
    }
  }
  return out;
}

inline std::pair<std::string, std::string> split_preset(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) return {std::string(spec), ""};
  return {std::string(spec.substr(0, colon)), std::string(spec.substr(colon + 1))};
}

}  // namespace detail

inline std::vector<std::string> known_boundary_presets() {
  return {"const:c", "cos", "cosk:k", "trig:a0,a1,b1,...", "shifted-cos:c", "abs-sin"};
}

inline std::string known_boundary_presets_text() {
  std::string s;
  for (const auto& p : known_boundary_presets()) s += (s.empty() ? "" : ", ") + p;
  return s;
}

/// Circle boundary data from a preset string such as "cos", "const:2",
/// "cosk:3", "trig:0.5,1,0,0,0,0,0.25" or "shifted-cos:0.5".
inline BoundaryFunction parse_boundary_preset(std::string_view spec) {
  auto [head, args] = detail::split_preset(spec);
  if (head == "coskθ") head = "cosk";
  const auto need_args = [&](std::size_t n) {
    const auto v = detail::parse_number_list(args, head);
    if (v.size() != n) throw InvalidArgument("preset '" + head + "' expects " + std::to_string(n) + " parameter(s)");
    return v;
  };
  if (head == "const") {
    FourierTable t;
    t.a0 = need_args(1)[0];
    return BoundaryFunction::fourier(std::string(spec), t);
  }
  if (head == "cos") {
    if (!args.empty()) throw InvalidArgument("preset 'cos' takes no parameters");
    return BoundaryFunction::fourier("cos", FourierTable{0.0, {1.0}, {0.0}});
  }
  if (head == "cosk") {
    const double k = need_args(1)[0];
    if (k < 1 || k != std::floor(k) || k > 4096) throw InvalidArgument("cosk: k must be a positive integer");
    FourierTable t;
    t.a.assign(static_cast<std::size_t>(k), 0.0);
    t.b.assign(static_cast<std::size_t>(k), 0.0);
    t.a.back() = 1.0;
    return BoundaryFunction::fourier(std::string(spec), t);
  }
  if (head == "trig") {
    const auto v = detail::parse_number_list(args, head);
    if (v.empty() || v.size() % 2 == 0) {
      throw InvalidArgument("trig expects a0 followed by (a_n, b_n) pairs");
    }
    FourierTable t;
    t.a0 = v[0];
    for (std::size_t i = 1; i + 1 < v.size(); i += 2) {
      t.a.push_back(v[i]);
      t.b.push_back(v[i + 1]);
    }
    return BoundaryFunction::fourier(std::string(spec), t);
  }
  if (head == "shifted-cos") {
    FourierTable t{need_args(1)[0], {1.0}, {0.0}};
    return BoundaryFunction::fourier(std::string(spec), t);
  }
  if (head == "abs-sin") {
    if (!args.empty()) throw InvalidArgument("preset 'abs-sin' takes no parameters");
    // One-sided (right) derivative at the kinks theta = 0, pi.
    return BoundaryFunction::analytic(
        "abs-sin", [](double t) { return std::abs(std::sin(t)); },
        [](double t) { return std::cos(t) * (std::sin(t) >= 0.0 ? 1.0 : -1.0); },
        Regularity::Lipschitz);
  }
  throw InvalidArgument("unknown boundary data '" + std::string(spec) +
                        "'; known presets: " + known_boundary_presets_text());
}

/// Sphere boundary data: "const:c" or "linear:c1,c2,c3[,d]" (g(z) = c.z + d).
inline SphereFunction parse_sphere_preset(std::string_view spec) {
  auto [head, args] = detail::split_preset(spec);
  const auto v = detail::parse_number_list(args, head);
  if (head == "const" && v.size() == 1) {
    const double c = v[0];
    return {std::string(spec), [c](const Vec&) { return c; }};
  }
  if (head == "linear" && (v.size() == 3 || v.size() == 4)) {
    const Vec c{v[0], v[1], v[2]};
    const double d = v.size() == 4 ? v[3] : 0.0;
    return {std::string(spec), [c, d](const Vec& z) { return dot(c, z) + d; }};
  }
  throw InvalidArgument("unknown sphere boundary data '" + std::string(spec) +
                        "'; known presets: const:c, linear:c1,c2,c3[,d]");
}

/// Interval data: "linear:c,d" for u(x) = c x + d.
inline IntervalHarmonic parse_interval_preset(std::string_view spec, Interval domain) {
  auto [head, args] = detail::split_preset(spec);
  const auto v = detail::parse_number_list(args, head);
  if (head == "linear" && v.size() == 2) return {v[0], v[1], domain};
  if (head == "const" && v.size() == 1) return {0.0, v[0], domain};
  throw InvalidArgument("unknown interval data '" + std::string(spec) +
                        "'; known presets: linear:c,d, const:c");
}

/// Reads a coefficient table from CSV with columns n, a_n, b_n. A header line
/// is optional; the n = 0 row supplies a0 (its b column is ignored).
inline FourierTable read_fourier_csv(std::istream& in) {
  FourierTable t;
  std::string line;
  int line_no = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> cols;
    try {
      cols = detail::parse_number_list(line, "Fourier CSV");
    } catch (const InvalidArgument&) {
      if (!seen_data && line.find('n') != std::string::npos) continue;  // header
      throw InvalidArgument("Fourier CSV line " + std::to_string(line_no) + ": cannot parse '" + line + "'");
    }
    if (cols.size() != 3) {
      throw InvalidArgument("Fourier CSV line " + std::to_string(line_no) + ": expected 3 columns");
    }
    seen_data = true;
    const double n = cols[0];
    if (n < 0 || n != std::floor(n) || n > 1 << 20) {
      throw InvalidArgument("Fourier CSV line " + std::to_string(line_no) + ": bad index");
    }
    const auto k = static_cast<std::size_t>(n);
    if (k == 0) {
      t.a0 = cols[1];
      continue;
    }
    if (t.a.size() < k) {
      t.a.resize(k, 0.0);
      t.b.resize(k, 0.0);
    }
    t.a[k - 1] = cols[1];
    t.b[k - 1] = cols[2];
  }
  if (!seen_data) throw InvalidArgument("Fourier CSV contains no coefficient rows");
  return t;
}

inline FourierTable load_fourier_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open Fourier CSV '" + path + "'");
  return read_fourier_csv(in);
}

inline void write_fourier_csv(std::ostream& out, const FourierTable& t) {
  out.precision(17);
  out << "n,a_n,b_n\n0," << t.a0 << ",0\n";
  for (int n = 1; n <= t.order(); ++n) {
    out << n << ',' << t.a[static_cast<std::size_t>(n - 1)] << ',' << t.b[static_cast<std::size_t>(n - 1)]
        << '\n';
  }
}

}  // namespace pdouglas
