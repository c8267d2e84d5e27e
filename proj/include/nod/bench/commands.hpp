#pragma once

#include "nod/bench/config.hpp"
#include "nod/solvers.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nod::bench {

// Exit codes of the CLI subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitDiverged = 2;  // also: non-converged scaling point
inline constexpr int kExitProbeFailed = 3;
inline constexpr int kExitEnvelope = 4;

struct CliOverrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<double> eta;
  std::optional<long> max_iters;
  std::optional<double> tol;
};

/// Applies command-line overrides on top of a parsed config and rebuilds the
/// problem to re-check it. Throws ConfigError.
void apply_overrides(RunConfig& config, const CliOverrides& overrides);

/// Runs the configured solver. `out` receives the trace CSV when no
/// trace_path is configured; `err` receives warnings and diagnostics.
int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Runs the configured method and returns its trace. Throws ConfigError,
/// DomainError or DivergedError.
SolverTrace run_solver(const RunConfig& config, std::ostream& err);

struct ProbeEntry {
  std::string property;
  double constant_claimed = 0.0;
  double constant_observed = 0.0;
  bool pass = false;
};

/// Probe battery against the claimed constants of a built problem: S
/// monotone and L_S-Lipschitz, grad(phi) mu-strongly monotone and
/// L_phi-Lipschitz, grad(phi) consistent with phi. With `sin_extras` also the
/// joint 3-Lipschitz bound of T, the symm(DS) grid minimum and the closed-form
/// Jacobian-norm grid supremum.
std::vector<ProbeEntry> probe_battery(const BuiltProblem& built, bool sin_extras,
                                      std::uint64_t seed);

nlohmann::json to_json(const ProbeEntry& entry);

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Sweep point that failed to reach the target within the budget.
class ScalingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScalingPoint {
  double value = 0.0;
  long iterations = 0;
};

struct ScalingReport {
  std::string axis;
  std::vector<ScalingPoint> points;
  double fitted_slope = 0.0;
  double theory_slope = 0.0;
  double band_lo = 0.0;
  double band_hi = 0.0;
  bool within_band = false;
};

/// Least-squares slope of log y against log x. Throws DomainError when x
/// has no spread or any value is nonpositive.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Thread cap from NOD_THREADS, else the hardware concurrency (at least 1).
unsigned sweep_threads();

/// Iterations-to-eps sweep along one constant. Requires >= 5 values spanning
/// >= 1.5 decades (ConfigError); throws ScalingError if a point does not
/// converge within max_iters.
ScalingReport run_scaling(const ScalingConfig& scaling, long max_iters, unsigned threads);

nlohmann::json to_json(const ScalingReport& report);

int cmd_scaling(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Integrates the flow and checks the decay envelope.
int cmd_ode(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace nod::bench
