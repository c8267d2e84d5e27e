#include "nod/core.hpp"

#include <algorithm>
#include <cmath>

namespace nod {

void require_finite(const Eigen::Ref<const Vec>& v, const std::string& what) {
  if (!v.allFinite()) {
    throw DomainError(what + ": non-finite entry");
  }
}

double c_residual(double c) { return 1.0 - c - std::sqrt(c) * (c + 6.0); }

double bisect_C() {
  // residual is strictly decreasing on (0, 1): f(1e-9) > 0 > f(0.04)
  double lo = 1e-9;
  double hi = 0.04;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    if (c_residual(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(c_residual(lo)) <= std::abs(c_residual(hi)) ? lo : hi;
}

double solve_C() {
  static const double c = bisect_C();
  return c;
}

double compute_B(double c) {
  if (!(c > 0.0 && c < 1.0)) {
    throw DomainError("compute_B: C must lie in (0, 1)");
  }
  return std::sqrt(c) / (1.0 - c);
}

const Constants& constants() {
  static const Constants k{solve_C(), compute_B(solve_C())};
  return k;
}

double default_eta(double mu, double L_phi, double L_S) {
  if (!(mu > 0.0)) {
    throw DomainError("default_eta: mu must be positive");
  }
  if (!(L_phi >= mu)) {
    throw DomainError("default_eta: L_phi must be >= mu");
  }
  if (!(L_S >= 0.0)) {
    throw DomainError("default_eta: L_S must be nonnegative");
  }
  const double c = solve_C();
  if (L_S == 0.0) {
    return c / L_phi;
  }
  return c * std::min(1.0 / L_phi, mu / (L_S * L_S));
}

StepPlan step_plan(double eta, double mu) {
  const double em = eta * mu;
  if (!(em > 0.0 && em <= 1.0) || !std::isfinite(em)) {
    throw DomainError("step_plan: eta * mu must lie in (0, 1]");
  }
  const double s = std::sqrt(em);
  StepPlan plan;
  plan.eta = eta;
  plan.mu = mu;
  plan.tau = (1.0 - s) / (1.0 + s);
  plan.theta = 1.0 / s - 1.0;
  return plan;
}

double joint_smoothness(double L_x, double L_y, double L_xy) {
  if (L_x < 0.0 || L_y < 0.0 || L_xy < 0.0) {
    throw DomainError("joint_smoothness: constants must be nonnegative");
  }
  const double half_diff = (L_x - L_y) / 2.0;
  return (L_x + L_y) / 2.0 + std::sqrt(half_diff * half_diff + L_xy * L_xy);
}

SmoothnessProfile make_smoothness_profile(double mu_x, double mu_y, double L_x, double L_y,
                                          double L_xy) {
  if (mu_x < 0.0 || mu_y < 0.0 || L_x < 0.0 || L_y < 0.0 || L_xy < 0.0) {
    throw DomainError("smoothness profile: constants must be nonnegative");
  }
  if (mu_x > L_x || mu_y > L_y) {
    throw DomainError("smoothness profile: strong convexity exceeds smoothness");
  }
  SmoothnessProfile p{mu_x, mu_y, L_x, L_y, L_xy, 0.0};
  p.L_joint = joint_smoothness(L_x, L_y, L_xy);
  return p;
}

BilinearSplit split_bilinear_oracle(const SaddleOracle& saddle, const Vec& x, const Vec& y) {
  const Index dx = x.size();
  const Index dy = y.size();

  const Vec t_base = saddle(x, y);
  const Vec t_2y = saddle(x, 2.0 * y);
  const Vec t_2x = saddle(2.0 * x, y);
  if (t_base.size() != dx + dy || t_2y.size() != dx + dy || t_2x.size() != dx + dy) {
    throw DomainError("split_bilinear_oracle: oracle output has wrong dimension");
  }

  // x-block: grad_x L = grad g(x) + M y, linear in y.
  // y-block: -grad_y L = grad h(y) - M^T x, linear in x.
  BilinearSplit out;
  out.grad_g = 2.0 * t_base.head(dx) - t_2y.head(dx);
  out.My = t_2y.head(dx) - t_base.head(dx);
  out.grad_h = 2.0 * t_base.tail(dy) - t_2x.tail(dy);
  out.Mtx = t_base.tail(dy) - t_2x.tail(dy);
  return out;
}

}  // namespace nod
