// Command-line front end: one subcommand per identity check, plus
// Monte Carlo validation, convergence tables and the full suite.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pdouglas/runner.hpp"

namespace {

constexpr int kConfigErrorStatus = 2;

const char* describe(const std::string& name) {
  if (name == "check-douglas") return "interior p-energy against the boundary p-form";
  if (name == "check-hardy-stein") return "Poisson expectation against the Green-weighted energy";
  if (name == "check-pvariance") return "p-variance displays at a point x";
  if (name == "check-remainder") return "remainder identity for a smooth non-harmonic u (p >= 2)";
  if (name == "check-vanishing") return "identity for v vanishing on the boundary";
  if (name == "check-minimizer") return "minimizer property of (P[g^<p/2>])^<2/p>";
  if (name == "check-quasimin") return "quasiminimizer ratio on concentric subdisks";
  if (name == "check-fpequiv") return "comparability envelopes of the Bregman chain";
  if (name == "mc-validate") return "Monte Carlo exit sampling against quadrature";
  if (name == "convergence") return "errors against closed-form references across grid levels";
  return "all checks with default parameters";
}

void add_options(CLI::App& sub, pdouglas::RunConfig& c, double& tol) {
  sub.add_option("--domain", c.domain, "interval, disk or ball")->check(CLI::IsMember({"interval", "disk", "ball"}));
  sub.add_option("--a", c.a, "interval left end");
  sub.add_option("--b", c.b, "interval right end");
  sub.add_option("--g", c.g,
                 "boundary data preset (disk: const:c, cos, cosk:k, trig:a0,a1,b1,..., shifted-cos:c, abs-sin; "
                 "ball: const:c, linear:c1,c2,c3[,d])");
  sub.add_option("--u", c.u, "interval data linear:c,d, or smooth preset for check-remainder");
  sub.add_option("--v", c.v, "smooth preset vanishing on the circle (check-vanishing)");
  sub.add_option("--fourier-csv", c.fourier_csv, "Fourier coefficients CSV (n,a_n,b_n) instead of --g");
  sub.add_option("--p", c.p, "exponents (list)")->delimiter(',');
  sub.add_option("--levels", c.levels, "grid levels (list)")->delimiter(',');
  sub.add_option("--tol", tol, "tolerance override");
  sub.add_option("--seed", c.seed, "random seed");
  sub.add_option("--n", c.n, "Monte Carlo sample count");
  sub.add_option("--x", c.x, "evaluation point coordinates")->delimiter(',');
  sub.add_option("--w", c.w, "base angle for the shifted p-variance display");
  sub.add_option("--rho", c.rho, "subdisk radii (list)")->delimiter(',');
  sub.add_option("--order", c.order, "Fourier truncation order");
  sub.add_option("--samples", c.samples, "random pairs for check-fpequiv");
  sub.add_option("--eps", c.eps, "walk-on-spheres shell thickness");
  sub.add_option("--target", c.target, "convergence target: douglas or hardy-stein");
  sub.add_option("--output", c.output, "report path (default: $PDOUGLAS_OUTPUT_DIR/<subcommand>.<format> or stdout)");
  sub.add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of p-Douglas, Hardy-Stein and related identities"};
  app.require_subcommand(1);
  pdouglas::RunConfig config;
  double tol = 0.0;
  bool print_config = false;
  for (const auto& name : pdouglas::known_subcommands()) {
    CLI::App* sub = app.add_subcommand(name, describe(name));
    add_options(*sub, config, tol);
    sub->add_flag("--print-config", print_config, "print the parsed configuration as JSON and exit");
    sub->callback([&config, name] { config.subcommand = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigErrorStatus;
  }
  if (tol > 0.0) config.tol = tol;

  try {
    config.validate();
    if (print_config) {
      std::cout << pdouglas::to_json(config).dump(2) << '\n';
      return 0;
    }
    const pdouglas::RunResult result = pdouglas::run(config);
    pdouglas::write_outputs(config, result, std::cout);
    for (const auto& r : result.reports) {
      if (!r.pass) {
        std::cerr << (r.informational() ? "informational: " : "FAIL: ") << r.identity << " (" << r.domain
                  << ") rel_diff=" << r.rel_diff << " tolerance=" << r.tolerance << '\n';
      }
    }
    if (!result.convergence_monotone) std::cerr << "FAIL: convergence errors are not monotone\n";
    return result.exit_status();
  } catch (const pdouglas::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigErrorStatus;
  } catch (const pdouglas::InvalidArgument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigErrorStatus;
  } catch (const pdouglas::AliasingError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigErrorStatus;
  } catch (const pdouglas::UnsupportedInput& e) {
    std::cerr << "unsupported input: " << e.what() << '\n';
    return kConfigErrorStatus;
  } catch (const pdouglas::PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return kConfigErrorStatus;
  } catch (const pdouglas::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kConfigErrorStatus;
  } catch (const pdouglas::Error& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return 1;
  }
}
