#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace nod {

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vec = VecX<double>;
using Mat = MatX<double>;
using Index = Eigen::Index;

/// Vec -> Vec map, e.g. a gradient or a monotone operator.
using Oracle = std::function<Vec(const Vec&)>;
/// Vec -> real map, e.g. a potential value.
using ScalarOracle = std::function<double(const Vec&)>;

/// Raised when an argument falls outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}

/// Throws DomainError naming `what` when `v` carries NaN or Inf.
void require_finite(const Eigen::Ref<const Vec>& v, const std::string& what);

/// The pair of universal step-size constants.
///
/// `C` is the unique real root of 1 - C - sqrt(C) (C + 6) = 0 on (0, 1), and
/// `B = sqrt(C) / (1 - C)`. Both are derived once from the defining equation.
struct Constants {
  double C;
  double B;
};

/// Residual of the defining equation for C.
double c_residual(double c);

/// Bisection for C on the fixed bracket (1e-9, 0.04], run to full double
/// precision. Deterministic; does not cache.
double bisect_C();

/// Cached result of bisect_C().
double solve_C();

/// sqrt(C) / (1 - C). Requires 0 < C < 1.
double compute_B(double c);

/// Cached {C, B}.
const Constants& constants();

/// Largest admissible step, C * min{1 / L_phi, mu / L_S^2}; C / L_phi when L_S = 0.
double default_eta(double mu, double L_phi, double L_S);

/// Derived scalars for one accelerated run.
struct StepPlan {
  double eta = 0.0;
  double mu = 0.0;
  double tau = 0.0;    // (1 - s) / (1 + s), s = sqrt(eta mu)
  double theta = 0.0;  // 1 / s - 1

  double sqrt_eta_mu() const { return std::sqrt(eta * mu); }
};

/// Requires 0 < eta * mu <= 1.
StepPlan step_plan(double eta, double mu);

/// Blockwise curvature constants of a saddle function plus the joint constant.
struct SmoothnessProfile {
  double mu_x = 0.0;
  double mu_y = 0.0;
  double L_x = 0.0;
  double L_y = 0.0;
  double L_xy = 0.0;
  double L_joint = 0.0;
};

/// Spectral norm of [[L_x, L_xy], [L_xy, L_y]]; upper bound for the joint
/// Lipschitz constant of an (L_x, L_y, L_xy)-smooth function.
double joint_smoothness(double L_x, double L_y, double L_xy);

/// Validates the profile invariants and fills L_joint.
SmoothnessProfile make_smoothness_profile(double mu_x, double mu_y, double L_x, double L_y,
                                          double L_xy);

/// Single-evaluation oracle of a saddle function L(x, y): returns the stacked
/// saddle gradient (grad_x L, -grad_y L).
using SaddleOracle = std::function<Vec(const Vec& x, const Vec& y)>;

/// Decomposed pieces recovered from a single-evaluation oracle of
/// L(x, y) = g(x) - h(y) + x^T M y.
struct BilinearSplit {
  Vec grad_g;
  Vec grad_h;
  Vec My;
  Vec Mtx;
};

/// Recovers (grad g(x), grad h(y), M y, M^T x) from exactly three queries,
/// T(x, y), T(x, 2y), T(2x, y). Only meaningful for bilinear coupling; the
/// result is unspecified for any other coupling.
BilinearSplit split_bilinear_oracle(const SaddleOracle& saddle, const Vec& x, const Vec& y);

}  // namespace nod
