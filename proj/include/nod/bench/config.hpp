#pragma once

#include "nod/core.hpp"
#include "nod/problems.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nod::bench {

inline constexpr const char* kVersion = "0.1.0";

/// Invalid or unreadable run configuration. The message names the field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  std::string method = "nod";  // nod | nod_bc | nag | forward | extragradient
  std::optional<double> eta;
  long max_iters = 100000;
  double tol = 1e-10;
};

struct OutputConfig {
  std::string trace_path;
  std::string report_path;
};

struct OdeConfig {
  std::optional<double> t_end;  // default 20 / sqrt(mu)
  std::optional<double> dt;     // default 0.01 / max(1, L_phi + L_S)
  std::optional<std::vector<double>> v0;
  std::optional<long> corrupt_psi_row;  // test hook: pushes psi above the envelope at this row (>= 1)
};

struct ScalingConfig {
  std::string axis;  // L_S | L_phi | L_xy
  std::vector<double> values;
  double eps = 1e-10;
};

/// Resolved configuration of one CLI invocation. `problem` is the tagged
/// instance description, kept as JSON and checked by build_problem().
struct RunConfig {
  nlohmann::json problem;
  SolverConfig solver;
  OutputConfig outputs;
  std::uint64_t seed = 0;
  std::optional<OdeConfig> ode;
  std::optional<ScalingConfig> scaling;
};

/// Strict parse: unknown keys and ill-typed or out-of-range values throw
/// ConfigError naming the offending field.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Fully resolved config with defaults written out.
nlohmann::json to_json(const RunConfig& config);

struct BuiltProblem {
  DecomposedProblem problem;
  std::optional<BilinearInstance> bilinear;
  Vec z0;
};

/// Instantiates a problem description. Kinds: sin_coupling, quadratic_skew,
/// pure_convex, bilinear, random_bilinear. Throws ConfigError.
BuiltProblem build_problem(const nlohmann::json& desc, std::uint64_t seed);

}  // namespace nod::bench
