#pragma once

#include "nod/core.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

namespace nod {

/// A monotone inclusion T = grad(phi) + S presented through its decomposed
/// oracles together with the constants the accelerated method needs.
struct DecomposedProblem {
  std::string id;
  Index dim = 0;
  Oracle grad_phi;
  Oracle S;
  ScalarOracle phi_val;  // may be empty
  double mu = 0.0;
  double L_phi = 0.0;
  double L_S = 0.0;
  std::optional<Vec> z_star;
  std::optional<std::pair<Index, Index>> saddle_split;
  // z_star was found numerically rather than certified analytically
  bool self_certified = false;

  Vec field(const Vec& z) const { return grad_phi(z) + S(z); }
  double default_eta() const { return nod::default_eta(mu, L_phi, L_S); }
};

/// Throws DomainError unless 0 < mu <= L_phi, L_S >= 0 and the z_star
/// residual is within 1e-9 (1 + |z_star|).
void validate(const DecomposedProblem& p);

/// L(x, y) = g(x) - h(y) + x^T M y with quadratic g(x) = x^T A_g x / 2 + b_g^T x
/// and h(y) = y^T A_h y / 2 + b_h^T y.
struct BilinearInstance {
  Mat A_g;
  Vec b_g;
  Mat A_h;
  Vec b_h;
  Mat M;
  double mu_x = 0.0;
  double mu_y = 0.0;
  double L_x = 0.0;
  double L_y = 0.0;
  double L_xy = 0.0;

  Index dx() const { return A_g.rows(); }
  Index dy() const { return A_h.rows(); }

  double g(const Vec& x) const { return 0.5 * x.dot(A_g * x) + b_g.dot(x); }
  double h(const Vec& y) const { return 0.5 * y.dot(A_h * y) + b_h.dot(y); }
  Vec grad_g(const Vec& x) const { return A_g * x + b_g; }
  Vec grad_h(const Vec& y) const { return A_h * y + b_h; }

  Vec grad_x_L(const Vec& x, const Vec& y) const { return A_g * x + b_g + M * y; }
  Vec grad_y_L(const Vec& x, const Vec& y) const { return M.transpose() * x - (A_h * y + b_h); }

  /// Stacked saddle gradient (grad_x L, -grad_y L).
  Vec saddle_field(const Vec& x, const Vec& y) const;
  /// Single-evaluation oracle view of saddle_field.
  SaddleOracle saddle_oracle() const;

  /// Saddle point (x*, y*) from the dense linear optimality system.
  std::pair<Vec, Vec> solution() const;
};

/// Validates symmetry and definiteness and derives mu/L constants. `L_xy`
/// defaults to the spectral norm of M and may only be raised above it.
BilinearInstance make_bilinear_instance(Mat A_g, Vec b_g, Mat A_h, Vec b_h, Mat M,
                                        std::optional<double> L_xy = std::nullopt);

struct BilinearTargets {
  double mu_x = 1.0;
  double L_x = 1.0;
  double mu_y = 1.0;
  double L_y = 1.0;
  double L_xy = 1.0;
};

/// Seeded random quadratic bilinear instance hitting the target constants
/// exactly (extreme eigenvalues and the top singular value of M).
BilinearInstance random_bilinear_instance(Index dx, Index dy, const BilinearTargets& targets,
                                          std::uint64_t seed);

/// phi(z) = z^T A z / 2, S(z) = K z. A symmetric positive definite, K skew.
DecomposedProblem make_quadratic_skew(const Mat& A, const Mat& K);

/// Quadratic-skew instance A = I scaled to mu, K = omega times the planar
/// rotation generator on consecutive coordinate pairs. dim must be even.
DecomposedProblem make_rotation_instance(Index dim, double mu, double omega);

/// Scaled saddle operator of a bilinear instance: mu = 1,
/// L_phi = max(L_x / mu_x, L_y / mu_y), L_S = L_xy / sqrt(mu_x mu_y).
DecomposedProblem make_bilinear(const BilinearInstance& inst);

/// phi(z) = z^T A z / 2 + b^T z, S = 0.
DecomposedProblem make_pure_convex(const Mat& A, const Vec& b);

/// I(w) = int_0^w |sin s| ds in closed form.
template <typename Scalar>
Scalar abs_sin_integral(Scalar w) {
  using std::cos;
  using std::floor;
  if (w < Scalar(0)) {
    return -abs_sin_integral(-w);
  }
  const Scalar pi = Scalar(M_PI);
  Scalar n = floor(w / pi);
  Scalar r = w - n * pi;
  if (r < Scalar(0)) {
    n -= Scalar(1);
    r += pi;
  }
  return Scalar(2) * n + Scalar(1) - cos(r);
}

/// h'(w) = 2 w - I(w) for h(w) = int_0^w int_0^t (2 - |sin s|) ds dt.
template <typename Scalar>
Scalar h_prime(Scalar w) {
  return Scalar(2) * w - abs_sin_integral(w);
}

/// h(w) = w^2 - J(w), J(w) = int_0^w I(t) dt in closed form (J is even).
template <typename Scalar>
Scalar h_val(Scalar w) {
  using std::abs;
  using std::floor;
  using std::sin;
  const Scalar a = abs(w);
  const Scalar pi = Scalar(M_PI);
  Scalar n = floor(a / pi);
  Scalar r = a - n * pi;
  if (r < Scalar(0)) {
    n -= Scalar(1);
    r += pi;
  }
  const Scalar j = n * n * pi + (Scalar(2) * n + Scalar(1)) * r - sin(r);
  return w * w - j;
}

/// Saddle gradient of L(x, y) = x^2 - y^2 + sin x sin y.
Vec sin_coupling_T(const Vec& z);

/// Closed-form Asplund decomposition of the sin-coupling saddle:
/// phi(x, y) = h(x) + h(y), S = T - grad(phi); mu = 1, L_phi = 2, L_S = 2.
DecomposedProblem make_sin_coupling();

/// Deterministic default start for a problem of dimension `dim`: entries
/// alternate 3, -2.
Vec default_start(Index dim);

}  // namespace nod
