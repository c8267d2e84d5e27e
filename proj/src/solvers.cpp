#include "nod/solvers.hpp"

#include "nod/lyapunov.hpp"

#include <cmath>
#include <utility>

namespace nod {

DivergedError::DivergedError(long k, const std::string& what)
    : std::runtime_error("diverged at k=" + std::to_string(k) + ": " + what), k_(k) {}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::converged:
      return "converged";
    case StopReason::budget:
      return "budget";
  }
  return "unknown";
}

namespace {

constexpr double kDivergenceFactor = 1e12;

void check_start(const DecomposedProblem& problem, const Vec& z0) {
  if (z0.size() != problem.dim) {
    throw DomainError(problem.id + ": start point has wrong dimension");
  }
  require_finite(z0, problem.id + ": start point");
  if (!problem.grad_phi || !problem.S) {
    throw DomainError(problem.id + ": missing oracle");
  }
}

// Appends trace records, fills Lyapunov columns and decides when to stop.
class Monitor {
 public:
  Monitor(const DecomposedProblem& problem, std::optional<StepPlan> plan, const StoppingRule& stop,
          SolverTrace& trace)
      : problem_(problem), plan_(plan), stop_(stop), trace_(trace) {
    lyapunov_ = plan_.has_value() && problem_.z_star.has_value() && bool(problem_.phi_val);
  }

  // Returns true when the run should stop after this record.
  bool record(long k, const Vec& field, const Vec& z_tilde, const Vec& z,
              const SolverState* state) {
    TraceRecord rec;
    rec.k = k;
    rec.residual = field.norm();
    if (!std::isfinite(rec.residual) || !z_tilde.allFinite()) {
      throw DivergedError(k, "non-finite iterate or oracle value");
    }
    if (initial_residual_ < 0.0) {
      initial_residual_ = rec.residual;
    } else if (initial_residual_ > 0.0 && rec.residual > kDivergenceFactor * initial_residual_) {
      throw DivergedError(k, "residual exceeded 1e12 times its initial value");
    }
    if (problem_.z_star) {
      rec.dist_sq = (z_tilde - *problem_.z_star).squaredNorm();
    }
    if (lyapunov_ && state != nullptr && k >= 2) {
      const LyapunovSnapshot snap = discrete_lyapunov(*state, *plan_, problem_);
      rec.psi = snap.psi;
      rec.psi_lower = lyapunov_lower_bound(snap, *plan_);
      TraceRecord& prev = trace_.records.back();
      if (prev.psi) {
        if (*prev.psi != 0.0) {
          prev.psi_ratio = snap.psi / *prev.psi;
        }
        prev.contraction_ok = contraction_check(*prev.psi, snap.psi, plan_->eta, plan_->mu);
      }
    }
    if (stop_.keep_iterates) {
      trace_.z_log.push_back(z);
      trace_.z_tilde_log.push_back(z_tilde);
    }
    const bool converged = (stop_.tol && rec.residual <= *stop_.tol) ||
                           (stop_.dist_tol && rec.dist_sq && *rec.dist_sq <= *stop_.dist_tol);
    trace_.records.push_back(rec);
    if (converged) {
      trace_.meta.stop = StopReason::converged;
      return true;
    }
    if (k >= stop_.max_iters) {
      trace_.meta.stop = StopReason::budget;
      return true;
    }
    return false;
  }

 private:
  const DecomposedProblem& problem_;
  std::optional<StepPlan> plan_;
  const StoppingRule& stop_;
  SolverTrace& trace_;
  bool lyapunov_ = false;
  double initial_residual_ = -1.0;
};

// Same problem with call-counting oracles.
DecomposedProblem counted(const DecomposedProblem& problem, TraceMeta& meta) {
  DecomposedProblem c = problem;
  c.grad_phi = [&problem, &meta](const Vec& z) {
    ++meta.grad_phi_calls;
    return problem.grad_phi(z);
  };
  c.S = [&problem, &meta](const Vec& z) {
    ++meta.S_calls;
    return problem.S(z);
  };
  return c;
}

void init_meta(SolverTrace& trace, const DecomposedProblem& problem, const char* method,
               double eta) {
  trace.meta.instance_id = problem.id;
  trace.meta.method = method;
  trace.meta.eta = eta;
  trace.meta.mu = problem.mu;
  trace.meta.self_certified = problem.self_certified;
}

}  // namespace

SolverState initial_state(const DecomposedProblem& problem, const Vec& z0) {
  check_start(problem, z0);
  SolverState s;
  s.k = 0;
  s.z = z0;
  s.z_tilde = z0;
  s.z_hat = z0;
  s.z_tilde_prev = z0;
  s.field = problem.grad_phi(s.z_tilde) + problem.S(s.z_hat);
  if (!s.field.allFinite()) {
    throw DivergedError(0, "non-finite oracle value at the start point");
  }
  return s;
}

SolverState nod_step(const SolverState& state, const StepPlan& plan,
                     const DecomposedProblem& problem) {
  SolverState next;
  next.k = state.k + 1;
  next.z = state.z_tilde - plan.eta * state.field;
  next.z_tilde = next.z + plan.tau * (next.z - state.z);
  next.z_hat = next.z_tilde + plan.theta * (next.z_tilde - state.z_tilde);
  next.z_tilde_prev = state.z_tilde;
  next.field_prev = state.field;
  next.field_prev2 = state.field_prev;
  next.diff_prev = state.z_tilde - state.z;
  next.field = problem.grad_phi(next.z_tilde) + problem.S(next.z_hat);
  if (!next.field.allFinite() || !next.z_hat.allFinite()) {
    throw DivergedError(next.k, "non-finite iterate or oracle value");
  }
  return next;
}

SolverTrace nod_run(const DecomposedProblem& problem, double eta, const Vec& z0,
                    const StoppingRule& stop) {
  const StepPlan plan = step_plan(eta, problem.mu);
  SolverTrace trace;
  init_meta(trace, problem, "nod", eta);
  const DecomposedProblem oracles = counted(problem, trace.meta);

  Monitor monitor(problem, plan, stop, trace);
  SolverState state = initial_state(oracles, z0);
  while (!monitor.record(state.k, state.field, state.z_tilde, state.z, &state)) {
    state = nod_step(state, plan, oracles);
  }
  return trace;
}

SolverTrace nod_bc_run(const BilinearInstance& inst, double eta, const Vec& x0, const Vec& y0,
                       const StoppingRule& stop) {
  const Index dx = inst.dx();
  const Index dy = inst.dy();
  if (x0.size() != dx || y0.size() != dy) {
    throw DomainError("nod_bc_run: start point has wrong dimension");
  }
  const DecomposedProblem scaled = make_bilinear(inst);
  const StepPlan plan = step_plan(eta, scaled.mu);
  const double eta_x = eta / inst.mu_x;
  const double eta_y = eta / inst.mu_y;
  const double rx = std::sqrt(inst.mu_x);
  const double ry = std::sqrt(inst.mu_y);

  SolverTrace trace;
  init_meta(trace, scaled, "nod_bc", eta);
  Monitor monitor(scaled, plan, stop, trace);

  auto stack = [dx, dy](const Vec& a, const Vec& b) {
    Vec out(dx + dy);
    out << a, b;
    return out;
  };
  auto to_scaled = [&](const Vec& x, const Vec& y) { return stack(rx * x, ry * y); };

  Vec x = x0, y = y0;
  Vec xt = x0, yt = y0;
  Vec xt_prev = x0, yt_prev = y0;

  // Scaled-coordinate history for the Lyapunov monitor.
  SolverState shadow;

  long k = 0;
  while (true) {
    const Vec gx = inst.grad_x_L(xt, yt);
    const Vec gx_lag = inst.grad_x_L(xt, yt_prev);
    const Vec gy = inst.grad_y_L(xt, yt);
    const Vec gy_lag = inst.grad_y_L(xt_prev, yt);
    trace.meta.grad_phi_calls += 4;
    trace.meta.S_calls += 4;
    const Vec dir_x = gx + plan.theta * (gx - gx_lag);
    const Vec dir_y = gy + plan.theta * (gy - gy_lag);

    // dir_x / sqrt(mu_x) and -dir_y / sqrt(mu_y) are the scaled field
    // grad phi(z_tilde_k) + S(z_hat_k).
    const Vec field = stack(dir_x / rx, -dir_y / ry);
    shadow.k = k;
    shadow.z = to_scaled(x, y);
    shadow.z_tilde = to_scaled(xt, yt);
    shadow.field = field;
    const bool done = monitor.record(k, field, shadow.z_tilde, shadow.z, &shadow);
    if (stop.keep_iterates) {
      // the monitor logs scaled iterates; report them in the original coordinates
      trace.z_log.back() = stack(x, y);
      trace.z_tilde_log.back() = stack(xt, yt);
    }
    if (done) {
      break;
    }

    const Vec x_next = xt - eta_x * dir_x;
    const Vec y_next = yt + eta_y * dir_y;
    const Vec xt_next = x_next + plan.tau * (x_next - x);
    const Vec yt_next = y_next + plan.tau * (y_next - y);

    shadow.field_prev2 = shadow.field_prev;
    shadow.field_prev = field;
    shadow.diff_prev = shadow.z_tilde - shadow.z;
    shadow.z_tilde_prev = shadow.z_tilde;

    xt_prev = xt;
    yt_prev = yt;
    x = x_next;
    y = y_next;
    xt = xt_next;
    yt = yt_next;
    ++k;
  }
  return trace;
}

SolverTrace nag_run(const DecomposedProblem& problem, double eta, const Vec& z0,
                    const StoppingRule& stop) {
  if (problem.L_S != 0.0) {
    throw DomainError("nag_run: requires L_S = 0");
  }
  check_start(problem, z0);
  const StepPlan plan = step_plan(eta, problem.mu);
  SolverTrace trace;
  init_meta(trace, problem, "nag", eta);
  Monitor monitor(problem, plan, stop, trace);

  Vec x = z0;  // gradient-step sequence
  Vec y = z0;  // extrapolated sequence
  Vec grad = problem.grad_phi(y);
  ++trace.meta.grad_phi_calls;

  SolverState hist;  // history in the layout the Lyapunov monitor reads
  hist.z_tilde_prev = z0;
  long k = 0;
  while (true) {
    hist.k = k;
    hist.z = x;
    hist.z_tilde = y;
    hist.field = grad;
    if (monitor.record(k, grad, y, x, &hist)) {
      break;
    }
    const Vec x_next = y - eta * grad;
    const Vec y_next = x_next + plan.tau * (x_next - x);

    hist.field_prev2 = hist.field_prev;
    hist.field_prev = grad;
    hist.diff_prev = y - x;
    hist.z_tilde_prev = y;

    x = x_next;
    y = y_next;
    grad = problem.grad_phi(y);
    ++trace.meta.grad_phi_calls;
    ++k;
  }
  return trace;
}

double forward_default_eta(const DecomposedProblem& problem) {
  const double lt = problem.L_phi + problem.L_S;
  return problem.mu / (lt * lt);
}

double extragradient_default_eta(const DecomposedProblem& problem) {
  return 1.0 / (2.0 * (problem.L_phi + problem.L_S));
}

SolverTrace forward_run(const DecomposedProblem& problem, double eta, const Vec& z0,
                        const StoppingRule& stop) {
  check_start(problem, z0);
  if (!(eta > 0.0)) {
    throw DomainError("forward_run: eta must be positive");
  }
  SolverTrace trace;
  init_meta(trace, problem, "forward", eta);
  const DecomposedProblem oracles = counted(problem, trace.meta);
  Monitor monitor(problem, std::nullopt, stop, trace);

  Vec z = z0;
  long k = 0;
  Vec t = oracles.field(z);
  while (!monitor.record(k, t, z, z, nullptr)) {
    z = z - eta * t;
    t = oracles.field(z);
    ++k;
  }
  return trace;
}

SolverTrace extragradient_run(const DecomposedProblem& problem, double eta, const Vec& z0,
                              const StoppingRule& stop) {
  check_start(problem, z0);
  if (!(eta > 0.0)) {
    throw DomainError("extragradient_run: eta must be positive");
  }
  SolverTrace trace;
  init_meta(trace, problem, "extragradient", eta);
  const DecomposedProblem oracles = counted(problem, trace.meta);
  Monitor monitor(problem, std::nullopt, stop, trace);

  Vec z = z0;
  long k = 0;
  Vec t = oracles.field(z);
  while (!monitor.record(k, t, z, z, nullptr)) {
    const Vec half = z - eta * t;
    z = z - eta * oracles.field(half);
    t = oracles.field(z);
    ++k;
  }
  return trace;
}

}  // namespace nod
