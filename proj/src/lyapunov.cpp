#include "nod/lyapunov.hpp"

#include "nod/solvers.hpp"

#include <cmath>

namespace nod {
namespace {

const Vec& require_z_star(const DecomposedProblem& problem, const char* who) {
  if (!problem.z_star) {
    throw DomainError(std::string(who) + ": problem has no z_star");
  }
  return *problem.z_star;
}

}  // namespace

double bregman_gap(const DecomposedProblem& problem, const Vec& z) {
  const Vec& zs = require_z_star(problem, "bregman_gap");
  if (!problem.phi_val) {
    throw DomainError("bregman_gap: problem has no phi_val oracle");
  }
  return problem.phi_val(z) - problem.phi_val(zs) - problem.grad_phi(zs).dot(z - zs);
}

LyapunovSnapshot discrete_lyapunov(const SolverState& state, const StepPlan& plan,
                                   const DecomposedProblem& problem) {
  if (state.k < 2) {
    throw DomainError("discrete_lyapunov: defined only for k >= 2");
  }
  const Vec& zs = require_z_star(problem, "discrete_lyapunov");
  const double eta = plan.eta;
  const double mu = plan.mu;
  const double s = plan.sqrt_eta_mu();
  const double B = constants().B;

  LyapunovSnapshot snap;
  snap.anchor_sq = (state.z_tilde + (state.z_tilde - state.z) / s - zs).squaredNorm();
  snap.gap = bregman_gap(problem, state.z_tilde_prev);
  snap.field_prev_sq = state.field_prev.squaredNorm();
  snap.diff_prev_sq = state.diff_prev.squaredNorm();
  snap.field_prev2_sq = state.field_prev2.squaredNorm();

  snap.psi = mu * snap.anchor_sq + 2.0 * snap.gap - eta * snap.field_prev_sq +
             (1.0 - eta * mu) * std::sqrt(mu / eta) * snap.diff_prev_sq +
             B * eta * (1.0 - s) * (1.0 - eta * problem.L_phi) * snap.field_prev2_sq;
  return snap;
}

double lyapunov_lower_bound(const LyapunovSnapshot& snap, const StepPlan& plan) {
  const double eta = plan.eta;
  const double mu = plan.mu;
  return (mu / 2.0) * snap.anchor_sq + snap.gap +
         (1.0 - eta * mu) * std::sqrt(mu / eta) * snap.diff_prev_sq;
}

double lyapunov_lower_bound(const SolverState& state, const StepPlan& plan,
                            const DecomposedProblem& problem) {
  return lyapunov_lower_bound(discrete_lyapunov(state, plan, problem), plan);
}

bool contraction_check(double psi_k, double psi_k1, double eta, double mu) {
  return psi_k1 <= (1.0 - std::sqrt(eta * mu)) * psi_k + kLyapunovSlack * (1.0 + psi_k);
}

double continuous_lyapunov(const Vec& z, const Vec& v, const DecomposedProblem& problem) {
  const Vec& zs = require_z_star(problem, "continuous_lyapunov");
  return (v + std::sqrt(problem.mu) * (z - zs)).squaredNorm() + 2.0 * bregman_gap(problem, z);
}

DecomposedProblem self_certify(const DecomposedProblem& problem, double tol, long max_iters) {
  DecomposedProblem stripped = problem;
  stripped.z_star.reset();
  const StepPlan plan = step_plan(stripped.default_eta(), stripped.mu);
  SolverState state = initial_state(stripped, default_start(stripped.dim));
  // certify on T at the returned point, not on the mixed step field
  while (stripped.field(state.z_tilde).norm() > tol) {
    if (state.k >= max_iters) {
      throw DomainError(problem.id + ": self-certification did not reach the tolerance");
    }
    state = nod_step(state, plan, stripped);
  }
  DecomposedProblem out = problem;
  out.z_star = state.z_tilde;
  out.self_certified = true;
  return out;
}

}  // namespace nod
