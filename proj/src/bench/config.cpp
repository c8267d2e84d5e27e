#include "nod/bench/config.hpp"

#include "nod/lyapunov.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>

namespace nod::bench {
namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) {
    throw ConfigError(where + ": expected an object");
  }
}

void reject_unknown(const json& j, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) {
      throw ConfigError(where + "." + it.key() + ": unknown key");
    }
  }
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) {
    throw ConfigError(field + ": expected a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    throw ConfigError(field + ": must be finite");
  }
  return v;
}

double get_positive(const json& j, const std::string& field) {
  const double v = get_number(j, field);
  if (!(v > 0.0)) {
    throw ConfigError(field + ": must be positive");
  }
  return v;
}

long get_count(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ConfigError(field + ": expected a nonnegative integer");
  }
  return static_cast<long>(j.get<long long>());
}

std::string get_string(const json& j, const std::string& field) {
  if (!j.is_string()) {
    throw ConfigError(field + ": expected a string");
  }
  return j.get<std::string>();
}

std::vector<double> get_list(const json& j, const std::string& field) {
  if (!j.is_array()) {
    throw ConfigError(field + ": expected an array of numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(get_number(j[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Vec get_vec(const json& j, const std::string& field) {
  const std::vector<double> v = get_list(j, field);
  if (v.empty()) {
    throw ConfigError(field + ": must not be empty");
  }
  return Eigen::Map<const Vec>(v.data(), static_cast<Index>(v.size()));
}

Mat get_mat(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(field + ": expected a nonempty array of rows");
  }
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Mat m;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::vector<double> row = get_list(j[r], field + "[" + std::to_string(r) + "]");
    if (r == 0) {
      cols = row.size();
      if (cols == 0) {
        throw ConfigError(field + ": rows must not be empty");
      }
      m.resize(static_cast<Index>(rows), static_cast<Index>(cols));
    } else if (row.size() != cols) {
      throw ConfigError(field + ": rows have unequal length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) = row[c];
    }
  }
  return m;
}

json vec_json(const std::vector<double>& v) { return json(v); }

SolverConfig parse_solver(const json& j) {
  require_object(j, "solver");
  reject_unknown(j, "solver", {"method", "eta", "max_iters", "tol"});
  SolverConfig s;
  if (j.contains("method")) {
    s.method = get_string(j["method"], "solver.method");
    static const std::set<std::string> methods = {"nod", "nod_bc", "nag", "forward",
                                                  "extragradient"};
    if (!methods.count(s.method)) {
      throw ConfigError("solver.method: unknown method '" + s.method + "'");
    }
  }
  if (j.contains("eta") && !j["eta"].is_null()) {
    s.eta = get_positive(j["eta"], "solver.eta");
  }
  if (j.contains("max_iters")) {
    s.max_iters = get_count(j["max_iters"], "solver.max_iters");
  }
  if (j.contains("tol")) {
    s.tol = get_positive(j["tol"], "solver.tol");
  }
  return s;
}

OutputConfig parse_outputs(const json& j) {
  require_object(j, "outputs");
  reject_unknown(j, "outputs", {"trace_path", "report_path"});
  OutputConfig o;
  if (j.contains("trace_path")) {
    o.trace_path = get_string(j["trace_path"], "outputs.trace_path");
  }
  if (j.contains("report_path")) {
    o.report_path = get_string(j["report_path"], "outputs.report_path");
  }
  return o;
}

OdeConfig parse_ode(const json& j) {
  require_object(j, "ode");
  reject_unknown(j, "ode", {"t_end", "dt", "v0", "corrupt_psi_row"});
  OdeConfig o;
  if (j.contains("t_end") && !j["t_end"].is_null()) {
    o.t_end = get_positive(j["t_end"], "ode.t_end");
  }
  if (j.contains("dt") && !j["dt"].is_null()) {
    o.dt = get_positive(j["dt"], "ode.dt");
  }
  if (j.contains("v0") && !j["v0"].is_null()) {
    o.v0 = get_list(j["v0"], "ode.v0");
  }
  if (j.contains("corrupt_psi_row") && !j["corrupt_psi_row"].is_null()) {
    o.corrupt_psi_row = get_count(j["corrupt_psi_row"], "ode.corrupt_psi_row");
  }
  return o;
}

ScalingConfig parse_scaling(const json& j) {
  require_object(j, "scaling");
  reject_unknown(j, "scaling", {"axis", "values", "eps"});
  ScalingConfig s;
  if (!j.contains("axis")) {
    throw ConfigError("scaling.axis: required");
  }
  s.axis = get_string(j["axis"], "scaling.axis");
  if (s.axis != "L_S" && s.axis != "L_phi" && s.axis != "L_xy") {
    throw ConfigError("scaling.axis: must be L_S, L_phi or L_xy");
  }
  if (!j.contains("values")) {
    throw ConfigError("scaling.values: required");
  }
  s.values = get_list(j["values"], "scaling.values");
  if (j.contains("eps")) {
    s.eps = get_positive(j["eps"], "scaling.eps");
  }
  return s;
}

void apply_claims(DecomposedProblem& p, const json& claims) {
  require_object(claims, "problem.claims");
  reject_unknown(claims, "problem.claims", {"mu", "L_phi", "L_S"});
  if (claims.contains("mu")) {
    p.mu = get_positive(claims["mu"], "problem.claims.mu");
  }
  if (claims.contains("L_phi")) {
    p.L_phi = get_positive(claims["L_phi"], "problem.claims.L_phi");
  }
  if (claims.contains("L_S")) {
    p.L_S = get_number(claims["L_S"], "problem.claims.L_S");
    if (p.L_S < 0.0) {
      throw ConfigError("problem.claims.L_S: must be nonnegative");
    }
  }
}

}  // namespace

RunConfig parse_config(const json& j) {
  require_object(j, "config");
  reject_unknown(j, "config", {"problem", "solver", "outputs", "seed", "ode", "scaling"});
  RunConfig c;
  if (!j.contains("problem")) {
    throw ConfigError("config.problem: required");
  }
  c.problem = j["problem"];
  require_object(c.problem, "problem");
  if (j.contains("solver")) {
    c.solver = parse_solver(j["solver"]);
  }
  if (j.contains("outputs")) {
    c.outputs = parse_outputs(j["outputs"]);
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"] >= 0)) {
      throw ConfigError("config.seed: expected a nonnegative integer");
    }
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("ode")) {
    c.ode = parse_ode(j["ode"]);
  }
  if (j.contains("scaling")) {
    c.scaling = parse_scaling(j["scaling"]);
  }
  // surface problem errors at parse time
  (void)build_problem(c.problem, c.seed);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json j;
  j["problem"] = c.problem;
  j["solver"] = {{"method", c.solver.method},
                 {"eta", c.solver.eta ? json(*c.solver.eta) : json(nullptr)},
                 {"max_iters", c.solver.max_iters},
                 {"tol", c.solver.tol}};
  j["outputs"] = {{"trace_path", c.outputs.trace_path},
                  {"report_path", c.outputs.report_path}};
  j["seed"] = c.seed;
  if (c.ode) {
    j["ode"] = {{"t_end", c.ode->t_end ? json(*c.ode->t_end) : json(nullptr)},
                {"dt", c.ode->dt ? json(*c.ode->dt) : json(nullptr)},
                {"v0", c.ode->v0 ? vec_json(*c.ode->v0) : json(nullptr)},
                {"corrupt_psi_row",
                 c.ode->corrupt_psi_row ? json(*c.ode->corrupt_psi_row) : json(nullptr)}};
  }
  if (c.scaling) {
    j["scaling"] = {
        {"axis", c.scaling->axis}, {"values", c.scaling->values}, {"eps", c.scaling->eps}};
  }
  return j;
}

BuiltProblem build_problem(const json& desc, std::uint64_t seed) {
  require_object(desc, "problem");
  if (!desc.contains("kind")) {
    throw ConfigError("problem.kind: required");
  }
  const std::string kind = get_string(desc["kind"], "problem.kind");
  BuiltProblem out;
  try {
    if (kind == "sin_coupling") {
      reject_unknown(desc, "problem", {"kind", "id", "z0", "claims", "self_certify"});
      out.problem = make_sin_coupling();
    } else if (kind == "quadratic_skew") {
      reject_unknown(desc, "problem",
                     {"kind", "id", "z0", "claims", "self_certify", "A", "K", "dim", "mu",
                      "omega"});
      if (desc.contains("omega")) {
        const long dim = desc.contains("dim") ? get_count(desc["dim"], "problem.dim") : 2;
        const double mu = desc.contains("mu") ? get_positive(desc["mu"], "problem.mu") : 1.0;
        const double omega = get_number(desc["omega"], "problem.omega");
        out.problem = make_rotation_instance(dim, mu, omega);
      } else {
        if (!desc.contains("A") || !desc.contains("K")) {
          throw ConfigError("problem: quadratic_skew needs A and K, or omega");
        }
        out.problem = make_quadratic_skew(get_mat(desc["A"], "problem.A"),
                                          get_mat(desc["K"], "problem.K"));
      }
    } else if (kind == "pure_convex") {
      reject_unknown(desc, "problem", {"kind", "id", "z0", "claims", "self_certify", "A", "b"});
      if (!desc.contains("A")) {
        throw ConfigError("problem.A: required");
      }
      const Mat A = get_mat(desc["A"], "problem.A");
      const Vec b = desc.contains("b") ? get_vec(desc["b"], "problem.b")
                                       : Vec(Vec::Zero(A.rows()));
      out.problem = make_pure_convex(A, b);
    } else if (kind == "bilinear") {
      reject_unknown(desc, "problem",
                     {"kind", "id", "z0", "claims", "self_certify", "A_g", "b_g", "A_h", "b_h",
                      "M", "L_xy"});
      for (const char* key : {"A_g", "A_h", "M"}) {
        if (!desc.contains(key)) {
          throw ConfigError(std::string("problem.") + key + ": required");
        }
      }
      const Mat A_g = get_mat(desc["A_g"], "problem.A_g");
      const Mat A_h = get_mat(desc["A_h"], "problem.A_h");
      const Vec b_g = desc.contains("b_g") ? get_vec(desc["b_g"], "problem.b_g")
                                           : Vec(Vec::Zero(A_g.rows()));
      const Vec b_h = desc.contains("b_h") ? get_vec(desc["b_h"], "problem.b_h")
                                           : Vec(Vec::Zero(A_h.rows()));
      std::optional<double> L_xy;
      if (desc.contains("L_xy")) {
        L_xy = get_number(desc["L_xy"], "problem.L_xy");
      }
      out.bilinear =
          make_bilinear_instance(A_g, b_g, A_h, b_h, get_mat(desc["M"], "problem.M"), L_xy);
      out.problem = make_bilinear(*out.bilinear);
    } else if (kind == "random_bilinear") {
      reject_unknown(desc, "problem",
                     {"kind", "id", "z0", "claims", "self_certify", "dx", "dy", "mu_x", "L_x",
                      "mu_y", "L_y", "L_xy"});
      BilinearTargets t;
      const long dx = desc.contains("dx") ? get_count(desc["dx"], "problem.dx") : 2;
      const long dy = desc.contains("dy") ? get_count(desc["dy"], "problem.dy") : 2;
      if (desc.contains("mu_x")) t.mu_x = get_positive(desc["mu_x"], "problem.mu_x");
      if (desc.contains("L_x")) t.L_x = get_positive(desc["L_x"], "problem.L_x");
      if (desc.contains("mu_y")) t.mu_y = get_positive(desc["mu_y"], "problem.mu_y");
      if (desc.contains("L_y")) t.L_y = get_positive(desc["L_y"], "problem.L_y");
      if (desc.contains("L_xy")) t.L_xy = get_number(desc["L_xy"], "problem.L_xy");
      out.bilinear = random_bilinear_instance(dx, dy, t, seed);
      out.problem = make_bilinear(*out.bilinear);
    } else {
      throw ConfigError("problem.kind: unknown kind '" + kind + "'");
    }

    if (desc.contains("id")) {
      out.problem.id = get_string(desc["id"], "problem.id");
    }
    if (desc.contains("claims")) {
      apply_claims(out.problem, desc["claims"]);
    }
    validate(out.problem);
    out.z0 = desc.contains("z0") ? get_vec(desc["z0"], "problem.z0")
                                 : default_start(out.problem.dim);
    if (out.z0.size() != out.problem.dim) {
      throw ConfigError("problem.z0: dimension must be " + std::to_string(out.problem.dim));
    }
    if (desc.contains("self_certify")) {
      if (!desc["self_certify"].is_boolean()) {
        throw ConfigError("problem.self_certify: expected a boolean");
      }
      if (desc["self_certify"].get<bool>()) {
        out.problem = self_certify(out.problem);
      }
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
  return out;
}

}  // namespace nod::bench
