#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "pdouglas/boundary.hpp"
#include "pdouglas/harmonic.hpp"

using namespace pdouglas;

namespace {

// Band-limited test datum 0.5 + cos t + 0.25 sin 3t.
BoundaryFunction mixed() { return parse_boundary_preset("trig:0.5,1,0,0,0,0,0.25"); }

}  // namespace

TEST(FourierProject, Examples) {
  const auto h = fourier_project(parse_boundary_preset("cos"), 4);
  EXPECT_EQ(h.coefficients().a0, 0.0);
  EXPECT_EQ(h.coefficients().a[0], 1.0);
  for (int n = 1; n < 4; ++n) EXPECT_EQ(h.coefficients().a[static_cast<std::size_t>(n)], 0.0);

  const auto c = fourier_project(parse_boundary_preset("const:7"), 3);
  EXPECT_EQ(c.mean(), 7.0);

  const auto m = fourier_project(mixed(), 8);
  EXPECT_DOUBLE_EQ(m.coefficients().a0, 0.5);
  EXPECT_DOUBLE_EQ(m.coefficients().a[0], 1.0);
  EXPECT_DOUBLE_EQ(m.coefficients().b[2], 0.25);
}

TEST(FourierProject, AnalyticDataRecoversCoefficients) {
  const auto g = BoundaryFunction::analytic("mixed", [](double t) { return 0.5 + std::cos(t) + 0.25 * std::sin(3 * t); });
  const auto h = fourier_project(g, 6);
  EXPECT_NEAR(h.coefficients().a0, 0.5, 1e-15);
  EXPECT_NEAR(h.coefficients().a[0], 1.0, 1e-14);
  EXPECT_NEAR(h.coefficients().b[2], 0.25, 1e-14);
  EXPECT_NEAR(h.coefficients().a[4], 0.0, 1e-14);
}

TEST(FourierProject, SampledGridAndAliasing) {
  std::vector<double> s(16);
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = std::cos(2.0 * kTwoPi * static_cast<double>(j) / 16.0);
  const auto g = BoundaryFunction::sampled("cos2", s);
  const auto h = fourier_project(g, 7);
  EXPECT_NEAR(h.coefficients().a[1], 1.0, 1e-14);
  EXPECT_THROW(fourier_project(g, 8), AliasingError);
  EXPECT_THROW(BoundaryFunction::sampled("bad", std::vector<double>(12, 1.0)), InvalidArgument);
  EXPECT_THROW(BoundaryFunction::sampled("bad", std::vector<double>(2, 1.0)), InvalidArgument);
  EXPECT_THROW(fourier_project(g, 0), InvalidArgument);
}

TEST(EvalU, Examples) {
  const auto h = fourier_project(parse_boundary_preset("cos"), 4);
  EXPECT_DOUBLE_EQ(eval_u(h, 0.5, 0.0), 0.5);
  const auto m = fourier_project(mixed(), 8);
  for (double t : {0.0, 1.0, 4.0}) EXPECT_DOUBLE_EQ(eval_u(m, 0.0, t), 0.5);
  EXPECT_THROW(eval_u(h, 1.0, 0.0), DomainError);
  EXPECT_THROW(eval_u(h, -0.1, 0.0), DomainError);
}

TEST(EvalGradSq, Examples) {
  const auto lin = fourier_project(parse_boundary_preset("cos"), 4);
  const auto quad = fourier_project(parse_boundary_preset("cosk:2"), 4);
  const auto flat = fourier_project(parse_boundary_preset("const:3"), 4);
  for (double r : {0.0, 0.2, 0.7, 0.95}) {
    for (double t : {0.0, 0.9, 2.5}) {
      EXPECT_NEAR(eval_grad_sq(lin, r, t), 1.0, 1e-14);
      EXPECT_NEAR(eval_grad_sq(quad, r, t), 4.0 * r * r, 1e-14);
      EXPECT_EQ(eval_grad_sq(flat, r, t), 0.0);
    }
  }
  // r = 0: only the n = 1 terms contribute.
  const auto m = fourier_project(parse_boundary_preset("trig:0,0.3,0.4,1,1"), 4);
  EXPECT_NEAR(eval_grad_sq(m, 0.0, 0.0), 0.25, 1e-15);
}

TEST(Harmonicity, FivePointLaplacianVanishes) {
  const auto h = fourier_project(parse_boundary_preset("trig:0.1,1,0.5,-0.3,0.2,0,0.7,0.1,0.1"), 16);
  std::mt19937_64 rng(2);
  const double step = 1e-3;
  for (int i = 0; i < 50; ++i) {
    const double r = 0.9 * std::sqrt(detail::uniform01(rng));
    const double t = kTwoPi * detail::uniform01(rng);
    const double x = r * std::cos(t);
    const double y = r * std::sin(t);
    const double lap = (h.value_xy(x + step, y) + h.value_xy(x - step, y) + h.value_xy(x, y + step) +
                        h.value_xy(x, y - step) - 4.0 * h.value_xy(x, y)) /
                       (step * step);
    EXPECT_LE(std::abs(lap), 1e-6 * 10.0);
  }
}

TEST(MeanValue, OriginEqualsCircleAverage) {
  const auto g = parse_boundary_preset("shifted-cos:0.5");
  const auto h = fourier_project(g);
  const auto avg = periodic_integrate([&](double t) { return g(t); });
  EXPECT_NEAR(h.value_xy(0, 0), avg.value / kTwoPi, 1e-10 * 0.5);
}

TEST(PoissonPointwise, Examples) {
  const KernelSet ks(DomainSpec::disk());
  const auto cos = parse_boundary_preset("cos");
  EXPECT_NEAR(poisson_extend_pointwise(ks, cos, {0.3, 0, 0}), 0.3, 1e-10);
  EXPECT_NEAR(poisson_extend_pointwise(ks, parse_boundary_preset("const:1"), {0.5, -0.6, 0}), 1.0, 1e-12);
  EXPECT_NEAR(poisson_extend_pointwise(ks, mixed(), {0, 0, 0}), 0.5, 1e-12);
  EXPECT_THROW(poisson_extend_pointwise(ks, cos, {1.0, 0, 0}), DomainError);
}

TEST(PoissonPointwise, AgreesWithFourierPathOnRandomPoints) {
  const KernelSet ks(DomainSpec::disk());
  const auto g = parse_boundary_preset("trig:0.2,1,0.5,-0.3,0.2,0,0.7");
  const auto h = fourier_project(g);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const double r = 0.99 * std::sqrt(detail::uniform01(rng));
    const double t = kTwoPi * detail::uniform01(rng);
    const double series = eval_u(h, r, t);
    const double direct = poisson_extend_pointwise(ks, g, disk_point(r, t));
    EXPECT_LE(std::abs(series - direct), 1e-8 * std::max(1.0, std::abs(series)));
  }
}

TEST(Gradient, MatchesCentralDifferences) {
  const auto h = fourier_project(parse_boundary_preset("trig:0.2,1,0.5,-0.3,0.2,0,0.7"), 16);
  std::mt19937_64 rng(6);
  const double step = 1e-4;
  for (int i = 0; i < 40; ++i) {
    const double r = 0.1 + 0.8 * detail::uniform01(rng);
    const double t = kTwoPi * detail::uniform01(rng);
    const double x = r * std::cos(t);
    const double y = r * std::sin(t);
    const double ux = (h.value_xy(x + step, y) - h.value_xy(x - step, y)) / (2 * step);
    const double uy = (h.value_xy(x, y + step) - h.value_xy(x, y - step)) / (2 * step);
    const double fd = ux * ux + uy * uy;
    EXPECT_LE(std::abs(eval_grad_sq(h, r, t) - fd), 1e-5 * fd);
  }
}

TEST(BallPoisson, LinearDataIsReproduced) {
  const KernelSet ks(DomainSpec::ball());
  const auto g = parse_sphere_preset("linear:0,0,1");
  EXPECT_NEAR(poisson_extend_pointwise(ks, g, {0.1, 0.2, 0.4}), 0.4, 1e-10);
  const Vec grad = poisson_extend_gradient(ks, g, {0.1, 0.2, 0.4});
  EXPECT_NEAR(grad[0], 0.0, 1e-9);
  EXPECT_NEAR(grad[2], 1.0, 1e-9);
}

TEST(RadialTrace, Examples) {
  const auto cos = fourier_project(parse_boundary_preset("cos"), 4);
  EXPECT_NEAR(radial_trace(cos, 0.0), 1.0, 1e-12);
  const auto c = fourier_project(parse_boundary_preset("const:2.5"), 4);
  for (double t : {0.0, 2.0, 5.0}) EXPECT_NEAR(radial_trace(c, t), 2.5, 1e-12);
  const auto m = fourier_project(mixed(), 8);
  EXPECT_NEAR(radial_trace(m, kPi / 2), 0.25, 1e-10);
}

TEST(RadialTrace, RejectsBadSequences) {
  const auto h = fourier_project(parse_boundary_preset("cos"), 4);
  const std::vector<double> decreasing{0.9, 0.8};
  EXPECT_THROW(radial_trace(h, 0.0, decreasing), InvalidArgument);
  const std::vector<double> single{0.9};
  EXPECT_THROW(radial_trace(h, 0.0, single), InvalidArgument);
  // A steep radial profile cannot be extrapolated from three radii.
  const auto wild = fourier_project(parse_boundary_preset("cosk:40"), 40);
  const std::vector<double> coarse{0.9, 0.95, 0.975};
  EXPECT_THROW(radial_trace(wild, 0.0, coarse), TraceFailure);
}

TEST(Presets, UnknownNameListsKnownPresets) {
  try {
    parse_boundary_preset("sinh");
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    for (const auto& name : known_boundary_presets()) EXPECT_NE(msg.find(name), std::string::npos) << name;
  }
  EXPECT_THROW(parse_boundary_preset("cosk:0"), InvalidArgument);
  EXPECT_THROW(parse_boundary_preset("trig:1,2"), InvalidArgument);
  EXPECT_NO_THROW(parse_boundary_preset("coskθ:3"));
}

TEST(Presets, AbsSinIsLipschitzWithOneSidedDerivative) {
  const auto g = parse_boundary_preset("abs-sin");
  EXPECT_EQ(g.regularity(), Regularity::Lipschitz);
  EXPECT_DOUBLE_EQ(g(-kPi / 2), 1.0);
  EXPECT_DOUBLE_EQ(g.derivative(0.0), 1.0);
}

TEST(FourierCsv, RoundTrip) {
  FourierTable t{0.5, {1.0, 0.0, 0.0}, {0.0, 0.0, 0.25}};
  std::stringstream ss;
  write_fourier_csv(ss, t);
  const FourierTable back = read_fourier_csv(ss);
  EXPECT_EQ(back.a0, t.a0);
  EXPECT_EQ(back.a, t.a);
  EXPECT_EQ(back.b, t.b);
  std::stringstream bad("n,a_n,b_n\n1,x,0\n");
  EXPECT_THROW(read_fourier_csv(bad), InvalidArgument);
}
