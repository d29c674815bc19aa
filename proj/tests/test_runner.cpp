#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pdouglas/runner.hpp"

using namespace pdouglas;

namespace {

RunConfig make(const std::string& sub) {
  RunConfig c;
  c.subcommand = sub;
  c.levels = {2};
  c.n = 20000;
  c.samples = 500;
  return c;
}

}  // namespace

TEST(RunConfig, JsonRoundTrip) {
  RunConfig c;
  c.subcommand = "check-quasimin";
  c.p = {1.5, 3.0};
  c.levels = {1, 2};
  c.tol = 1e-4;
  c.x = {0.1, -0.2};
  c.rho = {0.3};
  c.format = "csv";
  const RunConfig back = run_config_from_json(Json::parse(to_json(c).dump()));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(back.tol, c.tol);
  const RunConfig defaults = run_config_from_json(Json::object());
  EXPECT_EQ(to_json(defaults), to_json(RunConfig{}));
}

TEST(RunConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(run_config_from_json(Json{{"colour", "red"}}), ConfigError);
  EXPECT_THROW(run_config_from_json(Json{{"p", "two"}}), ConfigError);
  RunConfig c;
  c.p = {1.0};
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.levels = {7};
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.subcommand = "check-everything";
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.domain = "interval";
  c.a = 1;
  c.b = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.rho = {1.5};
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(RunConfig, UnknownPresetListsKnownOnes) {
  RunConfig c = make("check-douglas");
  c.g = "tanh";
  try {
    run(c);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("shifted-cos:c"), std::string::npos);
  }
}

TEST(Run, IntervalDouglas) {
  RunConfig c = make("check-douglas");
  c.domain = "interval";
  c.u = "linear:1,0";
  c.p = {3.0};
  const auto r = run(c);
  ASSERT_EQ(r.reports.size(), 1u);
  EXPECT_DOUBLE_EQ(r.reports[0].params["display_lhs"].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(r.reports[0].params["display_rhs"].get<double>(), 0.5);
  EXPECT_EQ(r.exit_status(), 0);
}

TEST(Run, FpEquivAtTwo) {
  RunConfig c = make("check-fpequiv");
  c.samples = 1000;
  const auto r = run(c);
  ASSERT_EQ(r.reports.size(), 1u);
  EXPECT_TRUE(r.reports[0].pass);
  EXPECT_LE(std::abs(r.reports[0].lhs - 1.0), 1e-12);
  EXPECT_LE(std::abs(r.reports[0].rhs - 1.0), 1e-12);
}

TEST(Run, EachDiskSubcommand) {
  for (const char* sub : {"check-douglas", "check-hardy-stein", "check-pvariance", "check-remainder",
                          "check-vanishing", "check-minimizer", "check-quasimin", "mc-validate"}) {
    RunConfig c = make(sub);
    if (std::string(sub) == "mc-validate") c.x = {0.3, 0.0};
    const auto r = run(c);
    EXPECT_FALSE(r.reports.empty()) << sub;
    EXPECT_EQ(r.exit_status(), 0) << sub;
  }
}

TEST(Run, DiskOnlySubcommandsRefuseOtherDomains) {
  RunConfig c = make("check-hardy-stein");
  c.domain = "interval";
  EXPECT_THROW(run(c), ConfigError);
}

TEST(Run, RemainderRejectsSubquadratic) {
  RunConfig c = make("check-remainder");
  c.p = {1.5};
  EXPECT_THROW(run(c), UnsupportedInput);
}

TEST(Run, SuiteContainsAnchors) {
  RunConfig c = make("suite");
  c.levels = {3};
  c.n = 100000;
  const auto r = run(c);
  EXPECT_EQ(r.exit_status(), 0);
  const auto find = [&](const std::string& id, const std::string& domain) -> const IdentityReport& {
    for (const auto& rep : r.reports) {
      if (rep.identity == id && rep.domain == domain) return rep;
    }
    throw std::runtime_error("missing " + id);
  };
  EXPECT_NEAR(find("douglas", "disk").lhs, kTwoPi, 1e-6 * kTwoPi);
  EXPECT_NEAR(find("douglas", "disk").params["display_lhs"].get<double>(), kPi, 1e-6 * kPi);
  EXPECT_NEAR(find("hardy-stein", "disk").lhs, 0.5, 1e-6);
  EXPECT_NEAR(find("hardy-stein", "disk").params["green_weighted_energy"].get<double>(), 0.25, 1e-6);
}

TEST(Run, SuiteSkipsRemainderBelowTwo) {
  RunConfig c = make("suite");
  c.domain = "disk";
  c.g = "shifted-cos:2";
  c.p = {1.5};
  c.levels = {1};
  c.rho = {0.5};
  const auto r = run(c);
  ASSERT_EQ(r.skipped.size(), 1u);
  EXPECT_NE(r.skipped[0].find("remainder"), std::string::npos);
}

TEST(Convergence, DouglasErrorsShrink) {
  RunConfig c = make("convergence");
  c.g = "trig:0,1,0,0.5,0";
  c.levels = {0, 1, 2, 3};
  const auto r = run(c);
  EXPECT_TRUE(r.convergence_monotone);
  EXPECT_EQ(r.convergence.size(), 8u);
  EXPECT_LE(r.convergence[3].abs_error, 1e-6 * r.convergence[3].reference);
}

TEST(Convergence, SingleLevelExpandsAndIntervalIsExact) {
  RunConfig c = make("convergence");
  c.domain = "interval";
  c.p = {1.5, 2.0, 3.0};
  c.levels = {2};
  const auto r = run(c);
  EXPECT_EQ(r.convergence.size(), 3u * 2u * 3u);
  for (const auto& row : r.convergence) EXPECT_LE(row.abs_error, 1e-12 * row.reference) << row.quantity;
  EXPECT_TRUE(r.convergence_monotone);
}

TEST(Convergence, HardySteinShrinks) {
  RunConfig c = make("convergence");
  c.target = "hardy-stein";
  c.levels = {0, 1, 2, 3};
  const auto r = run(c);
  EXPECT_TRUE(r.convergence_monotone);
  EXPECT_LT(r.convergence.back().abs_error, r.convergence.front().abs_error);
}

TEST(Convergence, RefusesUnanchoredTargets) {
  RunConfig c = make("convergence");
  c.g = "shifted-cos:0.5";
  c.p = {3.0};
  EXPECT_THROW(run(c), ConfigError);
  c = make("convergence");
  c.target = "minimizer";
  EXPECT_THROW(run(c), ConfigError);
}

TEST(Output, CsvHeadersAreStable) {
  EXPECT_STREQ(convergence_csv_header(), "quantity,level,value,reference,abs_error,observed_order");
  EXPECT_STREQ(report_csv_header(), "identity,domain,p,lhs,rhs,abs_diff,rel_diff,tolerance,pass");
  RunConfig c = make("check-fpequiv");
  c.format = "csv";
  const std::string text = render(c, run(c));
  EXPECT_EQ(text.substr(0, text.find('\n')), report_csv_header());
}

TEST(Output, JsonDocumentIsDeterministic) {
  RunConfig c = make("check-pvariance");
  const std::string a = render(c, run(c));
  const std::string b = render(c, run(c));
  EXPECT_EQ(a, b);
  const Json doc = Json::parse(a);
  EXPECT_EQ(doc["schema_version"], 1);
  EXPECT_FALSE(doc.contains("generated_at"));
}

TEST(Output, PathResolutionAndMetadata) {
  const auto dir = std::filesystem::temp_directory_path() / "pdouglas_runner_test";
  std::filesystem::remove_all(dir);
  RunConfig c = make("check-fpequiv");
  ::setenv("PDOUGLAS_OUTPUT_DIR", dir.c_str(), 1);
  EXPECT_EQ(output_path(c), (dir / "check-fpequiv.json").string());
  std::ostringstream sink;
  write_outputs(c, run(c), sink);
  EXPECT_TRUE(sink.str().empty());
  EXPECT_TRUE(std::filesystem::exists(dir / "check-fpequiv.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "check-fpequiv.json.meta.json"));
  c.output = (dir / "explicit.json").string();
  EXPECT_EQ(output_path(c), c.output);
  ::unsetenv("PDOUGLAS_OUTPUT_DIR");
  c.output.clear();
  EXPECT_TRUE(output_path(c).empty());
  std::filesystem::remove_all(dir);
}
