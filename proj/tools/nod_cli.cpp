#include "nod/bench/commands.hpp"
#include "nod/bench/config.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace nod::bench;

struct Flags {
  std::string config_path;
  CliOverrides overrides;
  std::optional<std::string> axis;
  std::optional<std::vector<double>> values;
  std::optional<double> eps;
};

void add_common(CLI::App* sub, Flags& f, bool config_required) {
  auto* opt = sub->add_option("--config", f.config_path, "JSON run configuration");
  if (config_required) opt->required();
  sub->add_option("--out", f.overrides.out, "output path (default: stdout)");
  sub->add_option("--seed", f.overrides.seed, "RNG seed");
  sub->add_option("--eta", f.overrides.eta, "step size override");
  sub->add_option("--max-iters", f.overrides.max_iters, "iteration budget");
  sub->add_option("--tol", f.overrides.tol, "residual tolerance");
}

// --out names the trace CSV for solve/ode and the JSON report for verify/scaling.
RunConfig resolve(const Flags& f, bool for_scaling, bool out_is_report) {
  RunConfig config;
  if (!f.config_path.empty()) {
    config = load_config(f.config_path);
  }
  if (for_scaling) {
    ScalingConfig sc = config.scaling.value_or(ScalingConfig{});
    if (f.axis) sc.axis = *f.axis;
    if (f.values) sc.values = *f.values;
    if (f.eps) sc.eps = *f.eps;
    config.scaling = sc;
  }
  CliOverrides o = f.overrides;
  if (out_is_report && o.out) {
    config.outputs.report_path = *o.out;
    o.out.reset();
  }
  apply_overrides(config, o);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accelerated solver for decomposed monotone inclusions"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Flags solve_f, verify_f, scaling_f, ode_f;
  auto* solve = app.add_subcommand("solve", "run a solver and write a trace CSV");
  add_common(solve, solve_f, true);
  auto* verify = app.add_subcommand("verify", "probe the claimed constants of an instance");
  add_common(verify, verify_f, true);
  auto* scaling = app.add_subcommand("scaling", "iterations-to-eps sweep along one constant");
  add_common(scaling, scaling_f, false);
  scaling->add_option("--axis", scaling_f.axis, "L_S | L_phi | L_xy");
  scaling->add_option("--values", scaling_f.values, "sweep values")->delimiter(',');
  scaling->add_option("--eps", scaling_f.eps, "target squared distance");
  auto* ode = app.add_subcommand("ode", "integrate the continuous flow and check its envelope");
  add_common(ode, ode_f, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (solve->parsed()) {
      return cmd_solve(resolve(solve_f, false, false), std::cout, std::cerr);
    }
    if (verify->parsed()) {
      return cmd_verify(resolve(verify_f, false, true), std::cout, std::cerr);
    }
    if (scaling->parsed()) {
      return cmd_scaling(resolve(scaling_f, true, true), std::cout, std::cerr);
    }
    return cmd_ode(resolve(ode_f, false, false), std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
