#pragma once

#include "nod/core.hpp"
#include "nod/problems.hpp"
#include "nod/state.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nod {

/// A run stopped because an iterate or oracle value became non-finite or the
/// residual blew past 1e12 times its initial value.
class DivergedError : public std::runtime_error {
 public:
  DivergedError(long k, const std::string& what);
  long k() const { return k_; }

 private:
  long k_;
};

struct StoppingRule {
  long max_iters = 1000;
  std::optional<double> tol;       // residual |field_k| <= tol
  std::optional<double> dist_tol;  // |z_tilde_k - z_star|^2 <= dist_tol
  bool keep_iterates = false;      // fill SolverTrace::z_log / z_tilde_log
};

enum class StopReason { converged, budget };

const char* to_string(StopReason r);

struct TraceRecord {
  long k = 0;
  double residual = 0.0;
  std::optional<double> dist_sq;
  std::optional<double> psi;
  std::optional<double> psi_lower;  // lower bound on psi, same step
  std::optional<double> psi_ratio;  // psi_{k+1} / psi_k
  std::optional<bool> contraction_ok;
};

struct TraceMeta {
  std::string instance_id;
  std::string method;
  double eta = 0.0;
  double mu = 0.0;
  std::uint64_t seed = 0;
  StopReason stop = StopReason::budget;
  bool self_certified = false;
  long grad_phi_calls = 0;
  long S_calls = 0;
};

struct SolverTrace {
  std::vector<TraceRecord> records;
  TraceMeta meta;
  std::vector<Vec> z_log;        // z_k, only with keep_iterates
  std::vector<Vec> z_tilde_log;  // z_tilde_k, only with keep_iterates

  const TraceRecord& last() const { return records.back(); }
  long iterations() const { return records.empty() ? 0 : records.back().k; }
};

/// k = 0 state z = z_tilde = z_hat = z0 with the first field evaluated.
SolverState initial_state(const DecomposedProblem& problem, const Vec& z0);

/// One step:
///   z_{k+1}       = z_tilde_k - eta (grad phi(z_tilde_k) + S(z_hat_k))
///   z_tilde_{k+1} = z_{k+1} + tau (z_{k+1} - z_k)
///   z_hat_{k+1}   = z_tilde_{k+1} + theta (z_tilde_{k+1} - z_tilde_k)
/// followed by the single grad(phi) / S evaluation at the new extrapolated
/// points. Throws DivergedError on non-finite values.
SolverState nod_step(const SolverState& state, const StepPlan& plan,
                     const DecomposedProblem& problem);

/// Runs nod_step until the stopping rule fires. Lyapunov columns are filled
/// whenever the problem carries z_star and phi_val.
SolverTrace nod_run(const DecomposedProblem& problem, double eta, const Vec& z0,
                    const StoppingRule& stop);

/// Bilinear-coupling form of the method driven only by saddle-gradient
/// evaluations of L at mixed points, with per-block steps eta / mu_x and
/// eta / mu_y. Convention z_tilde_{-1} = z_tilde_0. The trace is reported in
/// the scaled coordinates of make_bilinear(inst); iterate logs are unscaled
/// and stacked (x, y).
SolverTrace nod_bc_run(const BilinearInstance& inst, double eta, const Vec& x0, const Vec& y0,
                       const StoppingRule& stop);

/// Classical strongly convex accelerated gradient method. Rejects L_S > 0.
SolverTrace nag_run(const DecomposedProblem& problem, double eta, const Vec& z0,
                    const StoppingRule& stop);

/// z_{k+1} = z_k - eta T(z_k).
SolverTrace forward_run(const DecomposedProblem& problem, double eta, const Vec& z0,
                        const StoppingRule& stop);

/// Half step to z - eta T(z), full step z - eta T(half).
SolverTrace extragradient_run(const DecomposedProblem& problem, double eta, const Vec& z0,
                              const StoppingRule& stop);

/// mu / L_T^2 with L_T = L_phi + L_S.
double forward_default_eta(const DecomposedProblem& problem);
/// 1 / (2 L_T).
double extragradient_default_eta(const DecomposedProblem& problem);

}  // namespace nod
