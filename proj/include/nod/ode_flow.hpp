#pragma once

#include "nod/core.hpp"
#include "nod/problems.hpp"

#include <utility>
#include <vector>

namespace nod {

/// Point on a trajectory of the second-order flow, reduced to first order.
struct FlowState {
  double t = 0.0;
  Vec z;
  Vec v;  // dz/dt
};

struct FlowRow {
  FlowState state;
  double psi = 0.0;  // continuous Lyapunov value at `state`
};

/// dz = v, dv = -2 sqrt(mu) v - grad phi(z) - S(z + v / sqrt(mu)).
std::pair<Vec, Vec> vector_field(const FlowState& state, const DecomposedProblem& problem);

/// Largest step accepted by integrate(): 0.01 / max(1, L_phi + L_S).
double stable_dt(const DecomposedProblem& problem);

/// Classical fixed-step RK4 from (z0, v0) over [0, t_end]. The final step is
/// shortened to land on t_end. Requires 0 < dt <= stable_dt(problem) and a
/// z_star for the Lyapunov column.
std::vector<FlowRow> integrate(const DecomposedProblem& problem, const Vec& z0, const Vec& v0,
                               double t_end, double dt);

/// Same integrator without the step-size precondition; used for
/// order-of-accuracy studies.
std::vector<FlowRow> integrate_unchecked(const DecomposedProblem& problem, const Vec& z0,
                                         const Vec& v0, double t_end, double dt);

/// True iff every row satisfies psi_t <= psi_0 exp(-sqrt(mu) t) (1 + 1e-4) + 1e-12
/// and mu |z_t - z_star|^2 <= psi_t (1 + 1e-9).
bool gronwall_check(const std::vector<FlowRow>& rows, double mu, const Vec& z_star);

}  // namespace nod
