#include "nod/bench/commands.hpp"

#include "nod/bench/csv.hpp"
#include "nod/ode_flow.hpp"
#include "nod/probes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <sstream>
#include <thread>

namespace nod::bench {
namespace {

using nlohmann::json;

std::string problem_kind(const RunConfig& config) {
  return config.problem.value("kind", std::string());
}

// Start point of the bilinear-form method in unscaled (x, y) coordinates.
std::pair<Vec, Vec> unscaled_start(const BilinearInstance& inst, const Vec& z0) {
  return {z0.head(inst.dx()) / std::sqrt(inst.mu_x), z0.tail(inst.dy()) / std::sqrt(inst.mu_y)};
}

double method_default_eta(const std::string& method, const DecomposedProblem& p) {
  if (method == "forward") return forward_default_eta(p);
  if (method == "extragradient") return extragradient_default_eta(p);
  return p.default_eta();
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_file(path, text);
  }
}

}  // namespace

void apply_overrides(RunConfig& config, const CliOverrides& o) {
  if (o.out) config.outputs.trace_path = *o.out;
  if (o.seed) config.seed = *o.seed;
  if (o.eta) {
    if (!(*o.eta > 0.0) || !std::isfinite(*o.eta)) {
      throw ConfigError("solver.eta: must be positive");
    }
    config.solver.eta = *o.eta;
  }
  if (o.max_iters) {
    if (*o.max_iters < 0) throw ConfigError("solver.max_iters: must be nonnegative");
    config.solver.max_iters = *o.max_iters;
  }
  if (o.tol) {
    if (!(*o.tol > 0.0)) throw ConfigError("solver.tol: must be positive");
    config.solver.tol = *o.tol;
  }
  if (!config.problem.is_null()) {
    (void)build_problem(config.problem, config.seed);
  }
}

SolverTrace run_solver(const RunConfig& config, std::ostream& err) {
  const BuiltProblem built = build_problem(config.problem, config.seed);
  const DecomposedProblem& p = built.problem;
  const std::string& method = config.solver.method;

  const double fallback = method_default_eta(method, p);
  const double eta = config.solver.eta.value_or(fallback);
  if (eta > fallback) {
    err << "warning: eta " << format_double(eta) << " exceeds the default step "
        << format_double(fallback) << "; convergence guarantees do not apply\n";
  }

  StoppingRule stop;
  stop.max_iters = config.solver.max_iters;
  stop.tol = config.solver.tol;

  SolverTrace trace;
  if (method == "nod") {
    trace = nod_run(p, eta, built.z0, stop);
  } else if (method == "nod_bc") {
    if (!built.bilinear) {
      throw ConfigError("solver.method: nod_bc needs a bilinear problem");
    }
    const auto [x0, y0] = unscaled_start(*built.bilinear, built.z0);
    trace = nod_bc_run(*built.bilinear, eta, x0, y0, stop);
    trace.meta.instance_id = p.id;
  } else if (method == "nag") {
    trace = nag_run(p, eta, built.z0, stop);
  } else if (method == "forward") {
    trace = forward_run(p, eta, built.z0, stop);
  } else {
    trace = extragradient_run(p, eta, built.z0, stop);
  }
  trace.meta.seed = config.seed;
  return trace;
}

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  SolverTrace trace;
  try {
    trace = run_solver(config, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DivergedError& e) {
    err << "diverged at k=" << e.k() << ": " << e.what() << '\n';
    return kExitDiverged;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::ostringstream csv;
  write_trace_csv(csv, trace, config);
  emit(config.outputs.trace_path, csv.str(), out);

  if (!config.outputs.report_path.empty()) {
    const TraceRecord& last = trace.last();
    json report = {{"version", kVersion},
                   {"config", to_json(config)},
                   {"instance", trace.meta.instance_id},
                   {"method", trace.meta.method},
                   {"eta", trace.meta.eta},
                   {"mu", trace.meta.mu},
                   {"seed", trace.meta.seed},
                   {"stop", to_string(trace.meta.stop)},
                   {"iterations", trace.iterations()},
                   {"final_residual", last.residual},
                   {"self_certified", trace.meta.self_certified},
                   {"grad_phi_calls", trace.meta.grad_phi_calls},
                   {"S_calls", trace.meta.S_calls}};
    if (last.dist_sq) report["final_dist_sq"] = *last.dist_sq;
    write_file(config.outputs.report_path, report.dump(2) + "\n");
  }
  return kExitOk;
}

// ---------------------------------------------------------------- verify

std::vector<ProbeEntry> probe_battery(const BuiltProblem& built, bool sin_extras,
                                      std::uint64_t seed) {
  const DecomposedProblem& p = built.problem;
  constexpr long n = 10000;
  const Box box{-10.0, 10.0, p.dim};
  std::vector<ProbeEntry> out;
  auto add = [&out](std::string name, double claimed, double observed, bool pass) {
    out.push_back({std::move(name), claimed, observed, pass});
  };

  const double s_mono = monotonicity_probe(p.S, box, n, seed);
  add("S monotone (min pairing ratio)", 0.0, s_mono, s_mono >= -1e-10);
  const double s_lip = lipschitz_probe(p.S, box, n, seed + 1);
  add("S Lipschitz", p.L_S, s_lip, s_lip <= p.L_S + 1e-9);
  const double g_mono = strong_monotonicity_probe(p.grad_phi, box, n, seed + 2);
  add("grad phi strongly monotone", p.mu, g_mono, g_mono >= p.mu - 1e-6);
  const double g_lip = lipschitz_probe(p.grad_phi, box, n, seed + 3);
  add("grad phi Lipschitz", p.L_phi, g_lip, g_lip <= p.L_phi + 1e-9);
  if (p.phi_val) {
    const Box inner{-5.0, 5.0, p.dim};
    const double gc = grad_consistency(p, inner, 1000, seed + 4);
    add("grad phi matches central differences of phi", 0.0, gc, gc <= 1e-6 * (1.0 + p.L_phi));
  }

  if (sin_extras) {
    const Oracle T = [](const Vec& z) { return sin_coupling_T(z); };
    const double joint = lipschitz_probe(T, box, n, seed + 5);
    add("T jointly Lipschitz", 3.0, joint, joint <= 3.0 + 1e-9);

    const Grid grid{-2.0 * M_PI, 2.0 * M_PI, 2, 201, 1e-3};
    const MinEigResult eig = symm_jacobian_min_eig(p.S, grid, 1e-5);
    add("symm(DS) min eigenvalue on offset grid", 0.0, eig.min_eig, eig.min_eig >= -1e-5);

    double sup = 0.0;
    constexpr long pts = 401;
    for (long i = 0; i < pts; ++i) {
      for (long j = 0; j < pts; ++j) {
        const double x = -M_PI + 2.0 * M_PI * static_cast<double>(i) / (pts - 1);
        const double y = -M_PI + 2.0 * M_PI * static_cast<double>(j) / (pts - 1);
        sup = std::max(sup, sin_jacobian_norm(x, y));
      }
    }
    add("Jacobian norm of T grid supremum", 3.0, sup, sup <= 3.0 + 1e-12);
    const double peak = sin_jacobian_norm(M_PI / 2, M_PI / 2);
    add("Jacobian norm of T at (pi/2, pi/2)", 3.0, peak, peak == 3.0);
  }
  return out;
}

json to_json(const ProbeEntry& e) {
  return {{"property", e.property},
          {"constant_claimed", e.constant_claimed},
          {"constant_observed", e.constant_observed},
          {"pass", e.pass}};
}

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  BuiltProblem built;
  try {
    built = build_problem(config.problem, config.seed);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  const std::vector<ProbeEntry> entries =
      probe_battery(built, problem_kind(config) == "sin_coupling", config.seed);

  json report = {{"version", kVersion},
                 {"config", to_json(config)},
                 {"instance", built.problem.id},
                 {"evidence", "sampled"},
                 {"probes", json::array()}};
  bool all = true;
  for (const ProbeEntry& e : entries) {
    report["probes"].push_back(to_json(e));
    all = all && e.pass;
    if (!e.pass) {
      err << "probe failed: " << e.property << " (claimed " << format_double(e.constant_claimed)
          << ", observed " << format_double(e.constant_observed) << ")\n";
    }
  }
  report["pass"] = all;
  emit(config.outputs.report_path, report.dump(2) + "\n", out);
  return all ? kExitOk : kExitProbeFailed;
}

// --------------------------------------------------------------- scaling

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DomainError("fit_loglog_slope: need two or more paired values");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw DomainError("fit_loglog_slope: values must be positive");
    }
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (!(sxx > 0.0)) {
    throw DomainError("fit_loglog_slope: x values have no spread");
  }
  return sxy / sxx;
}

unsigned sweep_threads() {
  if (const char* env = std::getenv("NOD_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

long iterations_to_eps(const std::string& axis, double value, double eps, long max_iters) {
  StoppingRule stop;
  stop.max_iters = max_iters;
  stop.dist_tol = eps;
  SolverTrace trace;
  if (axis == "L_S") {
    const DecomposedProblem p = make_rotation_instance(2, 1.0, value);
    trace = nod_run(p, p.default_eta(), default_start(2), stop);
  } else if (axis == "L_phi") {
    Mat A = Mat::Zero(2, 2);
    A(0, 0) = 1.0;
    A(1, 1) = value;
    const DecomposedProblem p = make_pure_convex(A, Vec::Zero(2));
    trace = nod_run(p, p.default_eta(), default_start(2), stop);
  } else {
    const Mat I = Mat::Identity(2, 2);
    const BilinearInstance inst =
        make_bilinear_instance(I, Vec::Zero(2), I, Vec::Zero(2), value * I);
    const DecomposedProblem p = make_bilinear(inst);
    const auto [x0, y0] = unscaled_start(inst, default_start(4));
    trace = nod_bc_run(inst, p.default_eta(), x0, y0, stop);
  }
  if (trace.meta.stop != StopReason::converged) {
    throw ScalingError("sweep point " + axis + "=" + format_double(value) +
                       " did not reach eps within " + std::to_string(max_iters) + " iterations");
  }
  return trace.iterations();
}

}  // namespace

ScalingReport run_scaling(const ScalingConfig& sc, long max_iters, unsigned threads) {
  if (sc.axis != "L_S" && sc.axis != "L_phi" && sc.axis != "L_xy") {
    throw ConfigError("scaling.axis: must be L_S, L_phi or L_xy");
  }
  if (sc.values.size() < 5) {
    throw ConfigError("scaling.values: need at least 5 sweep values");
  }
  const auto [lo, hi] = std::minmax_element(sc.values.begin(), sc.values.end());
  if (!(*lo > 0.0)) {
    throw ConfigError("scaling.values: must be positive");
  }
  if (!(std::log10(*hi / *lo) >= 1.5)) {
    throw ConfigError("scaling.values: must span at least 1.5 decades");
  }
  if (!(sc.eps > 0.0)) {
    throw ConfigError("scaling.eps: must be positive");
  }

  ScalingReport report;
  report.axis = sc.axis;
  report.points.resize(sc.values.size());
  threads = std::max(1u, threads);
  for (std::size_t begin = 0; begin < sc.values.size(); begin += threads) {
    const std::size_t end = std::min(sc.values.size(), begin + threads);
    std::vector<std::future<long>> jobs;
    for (std::size_t i = begin; i < end; ++i) {
      jobs.push_back(std::async(std::launch::async, iterations_to_eps, sc.axis, sc.values[i],
                                sc.eps, max_iters));
    }
    for (std::size_t i = begin; i < end; ++i) {
      report.points[i] = {sc.values[i], jobs[i - begin].get()};
    }
  }

  std::vector<double> xs, ys;
  for (const ScalingPoint& pt : report.points) {
    xs.push_back(pt.value);
    ys.push_back(static_cast<double>(pt.iterations));
  }
  report.fitted_slope = fit_loglog_slope(xs, ys);
  if (sc.axis == "L_phi") {
    report.theory_slope = 0.5;
    report.band_lo = 0.4;
    report.band_hi = 0.6;
  } else {
    report.theory_slope = 1.0;
    report.band_lo = 0.8;
    report.band_hi = 1.2;
  }
  report.within_band =
      report.fitted_slope >= report.band_lo && report.fitted_slope <= report.band_hi;
  return report;
}

json to_json(const ScalingReport& r) {
  json points = json::array();
  for (const ScalingPoint& pt : r.points) {
    points.push_back({{"value", pt.value}, {"iterations", pt.iterations}});
  }
  return {{"axis", r.axis},
          {"points", points},
          {"fitted_slope", r.fitted_slope},
          {"theory_slope", r.theory_slope},
          {"band", {r.band_lo, r.band_hi}},
          {"within_band", r.within_band}};
}

int cmd_scaling(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (!config.scaling) {
    err << "config error: scaling section required\n";
    return kExitConfig;
  }
  ScalingReport report;
  try {
    report = run_scaling(*config.scaling, config.solver.max_iters, sweep_threads());
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ScalingError& e) {
    err << "scaling aborted: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const DivergedError& e) {
    err << "scaling aborted: " << e.what() << '\n';
    return kExitDiverged;
  }
  json j = to_json(report);
  j["version"] = kVersion;
  j["config"] = to_json(config);
  emit(config.outputs.report_path, j.dump(2) + "\n", out);
  if (!report.within_band) {
    err << "warning: fitted slope " << format_double(report.fitted_slope)
        << " outside the acceptance band\n";
  }
  return kExitOk;
}

// ------------------------------------------------------------------- ode

int cmd_ode(const RunConfig& config, std::ostream& out, std::ostream& err) {
  BuiltProblem built;
  try {
    built = build_problem(config.problem, config.seed);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  const DecomposedProblem& p = built.problem;
  const OdeConfig ode = config.ode.value_or(OdeConfig{});
  const double limit = stable_dt(p);
  const double dt = ode.dt.value_or(limit);
  const double t_end = ode.t_end.value_or(20.0 / std::sqrt(p.mu));
  if (dt > limit) {
    err << "config error: ode.dt " << format_double(dt) << " exceeds the stability limit "
        << format_double(limit) << '\n';
    return kExitConfig;
  }
  if (!p.z_star) {
    err << "config error: problem has no z_star\n";
    return kExitConfig;
  }
  Vec v0 = Vec::Zero(p.dim);
  if (ode.v0) {
    if (static_cast<Index>(ode.v0->size()) != p.dim) {
      err << "config error: ode.v0: dimension must be " << p.dim << '\n';
      return kExitConfig;
    }
    v0 = Eigen::Map<const Vec>(ode.v0->data(), p.dim);
  }

  std::vector<FlowRow> rows;
  try {
    rows = integrate(p, built.z0, v0, t_end, dt);
  } catch (const DivergedError& e) {
    err << "diverged: " << e.what() << '\n';
    return kExitDiverged;
  }
  if (ode.corrupt_psi_row) {
    const auto i = static_cast<std::size_t>(*ode.corrupt_psi_row);
    if (i == 0 || i >= rows.size()) {
      err << "config error: ode.corrupt_psi_row out of range\n";
      return kExitConfig;
    }
    const double envelope = rows[0].psi * std::exp(-std::sqrt(p.mu) * rows[i].state.t);
    rows[i].psi = 2.0 * (envelope * (1.0 + 1e-4) + 1e-12);
  }

  std::ostringstream csv;
  write_flow_csv(csv, rows, p.id, p.mu, config);
  emit(config.outputs.trace_path, csv.str(), out);

  if (!gronwall_check(rows, p.mu, *p.z_star)) {
    err << "envelope violated\n";
    return kExitEnvelope;
  }
  return kExitOk;
}

}  // namespace nod::bench
