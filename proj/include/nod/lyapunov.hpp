#pragma once

#include "nod/core.hpp"
#include "nod/problems.hpp"
#include "nod/state.hpp"

namespace nod {

/// Absolute-plus-relative slack applied to every Lyapunov inequality.
inline constexpr double kLyapunovSlack = 1e-9;

/// The five terms of the discrete Lyapunov function at step k >= 2 and
/// their assembled value.
struct LyapunovSnapshot {
  double psi = 0.0;
  double anchor_sq = 0.0;       // |z_tilde_k + (z_tilde_k - z_k) / sqrt(eta mu) - z_star|^2
  double gap = 0.0;             // Bregman gap at z_tilde_{k-1}
  double field_prev_sq = 0.0;   // |field_{k-1}|^2
  double diff_prev_sq = 0.0;    // |z_tilde_{k-1} - z_{k-1}|^2
  double field_prev2_sq = 0.0;  // |field_{k-2}|^2
};

/// phi(z) - phi(z_star) - <grad phi(z_star), z - z_star>.
double bregman_gap(const DecomposedProblem& problem, const Vec& z);

/// Assembles Psi_k from the state history with the original (unshifted)
/// oracles. Requires k >= 2 and a certified z_star.
LyapunovSnapshot discrete_lyapunov(const SolverState& state, const StepPlan& plan,
                                   const DecomposedProblem& problem);

/// (mu / 2) anchor_sq + gap + (1 - eta mu) sqrt(mu / eta) diff_prev_sq.
double lyapunov_lower_bound(const SolverState& state, const StepPlan& plan,
                            const DecomposedProblem& problem);
double lyapunov_lower_bound(const LyapunovSnapshot& snap, const StepPlan& plan);

/// psi_k1 <= (1 - sqrt(eta mu)) psi_k + 1e-9 (1 + psi_k).
bool contraction_check(double psi_k, double psi_k1, double eta, double mu);

/// |v + sqrt(mu) (z - z_star)|^2 + 2 bregman_gap(z).
double continuous_lyapunov(const Vec& z, const Vec& v, const DecomposedProblem& problem);

/// Copy of `problem` with z_star replaced by the point where a default-step
/// run reaches residual `tol`; marks the result self-certified.
DecomposedProblem self_certify(const DecomposedProblem& problem, double tol = 1e-13,
                               long max_iters = 10'000'000);

}  // namespace nod
