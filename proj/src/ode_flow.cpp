#include "nod/ode_flow.hpp"

#include "nod/lyapunov.hpp"
#include "nod/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nod {

std::pair<Vec, Vec> vector_field(const FlowState& state, const DecomposedProblem& problem) {
  if (!(problem.mu > 0.0)) {
    throw DomainError("vector_field: mu must be positive");
  }
  const double rm = std::sqrt(problem.mu);
  Vec dv = -2.0 * rm * state.v - problem.grad_phi(state.z) - problem.S(state.z + state.v / rm);
  if (!dv.allFinite()) {
    throw DivergedError(0, "non-finite vector field at t=" + std::to_string(state.t));
  }
  return {state.v, std::move(dv)};
}

double stable_dt(const DecomposedProblem& problem) {
  return 0.01 / std::max(1.0, problem.L_phi + problem.L_S);
}

std::vector<FlowRow> integrate_unchecked(const DecomposedProblem& problem, const Vec& z0,
                                         const Vec& v0, double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) {
    throw DomainError("integrate: need dt > 0 and t_end >= 0");
  }
  if (z0.size() != problem.dim || v0.size() != problem.dim) {
    throw DomainError("integrate: start point has wrong dimension");
  }
  auto psi_of = [&problem](const FlowState& s) {
    return problem.z_star ? continuous_lyapunov(s.z, s.v, problem)
                          : std::numeric_limits<double>::quiet_NaN();
  };

  const long steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
  std::vector<FlowRow> rows;
  rows.reserve(static_cast<std::size_t>(steps) + 1);
  FlowState s{0.0, z0, v0};
  rows.push_back({s, psi_of(s)});
  const double psi0 = rows.front().psi;

  for (long i = 0; i < steps; ++i) {
    const double t0 = static_cast<double>(i) * dt;
    const double t1 = std::min(static_cast<double>(i + 1) * dt, t_end);
    const double h = t1 - t0;

    const auto [k1z, k1v] = vector_field(s, problem);
    const auto [k2z, k2v] =
        vector_field({t0 + h / 2, s.z + (h / 2) * k1z, s.v + (h / 2) * k1v}, problem);
    const auto [k3z, k3v] =
        vector_field({t0 + h / 2, s.z + (h / 2) * k2z, s.v + (h / 2) * k2v}, problem);
    const auto [k4z, k4v] = vector_field({t1, s.z + h * k3z, s.v + h * k3v}, problem);

    s.z += (h / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    s.v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    s.t = t1;
    if (!s.z.allFinite() || !s.v.allFinite()) {
      throw DivergedError(i + 1, "non-finite flow state");
    }
    const double psi = psi_of(s);
    if (psi0 > 0.0 && psi > 1e12 * psi0) {
      throw DivergedError(i + 1, "flow Lyapunov value exceeded 1e12 times its initial value");
    }
    rows.push_back({s, psi});
  }
  return rows;
}

std::vector<FlowRow> integrate(const DecomposedProblem& problem, const Vec& z0, const Vec& v0,
                               double t_end, double dt) {
  if (!problem.z_star) {
    throw DomainError("integrate: problem has no z_star");
  }
  if (dt > stable_dt(problem)) {
    throw DomainError("integrate: dt exceeds 0.01 / max(1, L_phi + L_S)");
  }
  return integrate_unchecked(problem, z0, v0, t_end, dt);
}

bool gronwall_check(const std::vector<FlowRow>& rows, double mu, const Vec& z_star) {
  if (rows.empty()) {
    return false;
  }
  const double psi0 = rows.front().psi;
  const double rate = std::sqrt(mu);
  for (const FlowRow& row : rows) {
    const double envelope = psi0 * std::exp(-rate * row.state.t) * (1.0 + 1e-4) + 1e-12;
    if (!(row.psi <= envelope)) {
      return false;
    }
    if (!(mu * (row.state.z - z_star).squaredNorm() <= row.psi * (1.0 + 1e-9))) {
      return false;
    }
  }
  return true;
}

}  // namespace nod
