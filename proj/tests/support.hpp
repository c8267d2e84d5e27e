#pragma once

// Shared fixtures and independent reference computations for the test suite.

#include "nod/core.hpp"
#include "nod/problems.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace nod::test {

// Adaptive Simpson with Richardson correction.
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-14) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50);
}

// Integral over [0, w] split at the multiples of pi, where |sin| has kinks.
inline double piecewise_integral(const std::function<double(double)>& f, double w,
                                 double tol = 1e-14) {
  const double sign = w < 0 ? -1.0 : 1.0;
  const double end = std::abs(w);
  double total = 0.0;
  double a = 0.0;
  while (a < end) {
    const double b = std::min(end, a + M_PI);
    total += adaptive_simpson([&](double s) { return f(sign * s); }, a, b, tol);
    a = b;
  }
  return sign * total;
}

// Quadrature reference for int_0^w |sin s| ds.
inline double quad_abs_sin(double w) {
  return piecewise_integral([](double s) { return std::abs(std::sin(s)); }, w);
}

// Nested quadrature reference for int_0^w int_0^t (2 - |sin s|) ds dt.
inline double quad_h(double w) {
  return piecewise_integral(
      [](double t) {
        return piecewise_integral([](double s) { return 2.0 - std::abs(std::sin(s)); }, t,
                                  1e-15);
      },
      w, 1e-13);
}

// The four instances the acceptance criteria are stated on.
struct NamedProblem {
  std::string name;
  DecomposedProblem problem;
};

inline BilinearInstance acceptance_bilinear() {
  BilinearTargets t;
  t.mu_x = 1.0;
  t.L_x = 2.0;
  t.mu_y = 2.0;
  t.L_y = 4.0;
  t.L_xy = 3.0;
  return random_bilinear_instance(2, 2, t, 7);
}

inline std::vector<NamedProblem> acceptance_instances() {
  Mat A = Mat::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 10.0;
  return {
      {"pure_convex diag(1,10)", make_pure_convex(A, Vec::Zero(2))},
      {"quadratic_skew |K|=4", make_rotation_instance(2, 1.0, 4.0)},
      {"sin_coupling", make_sin_coupling()},
      {"bilinear mu_x=1 mu_y=2 L_xy=3", make_bilinear(acceptance_bilinear())},
  };
}

// phi(z) = z^2 / 2 in one dimension, S = 0.
inline DecomposedProblem scalar_quadratic() {
  return make_pure_convex(Mat::Identity(1, 1), Vec::Zero(1));
}

inline Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

inline double rel_err(const Vec& a, const Vec& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

// One step of the method on T(z) = A z + K z, written as a linear map on the
// stacked state (z_k, z_tilde_k, z_tilde_{k-1}); built from the update rule
// directly, without the solver code.
inline Mat linear_step_matrix(const Mat& A, const Mat& K, double eta, double mu) {
  const Index d = A.rows();
  const double s = std::sqrt(eta * mu);
  const double tau = (1 - s) / (1 + s);
  const double theta = 1 / s - 1;
  const Mat I = Mat::Identity(d, d);
  // z_hat = (1 + theta) zt - theta zt_prev
  // z_next = zt - eta (A zt + K z_hat)
  const Mat zn_zt = I - eta * A - eta * (1 + theta) * K;
  const Mat zn_ztp = eta * theta * K;
  Mat F = Mat::Zero(3 * d, 3 * d);
  F.block(0, d, d, d) = zn_zt;
  F.block(0, 2 * d, d, d) = zn_ztp;
  // zt_next = (1 + tau) z_next - tau z
  F.block(d, 0, d, d) = -tau * I;
  F.block(d, d, d, d) = (1 + tau) * zn_zt;
  F.block(d, 2 * d, d, d) = (1 + tau) * zn_ztp;
  F.block(2 * d, d, d, d) = I;
  return F;
}

inline Mat rotation_generator() {
  Mat K(2, 2);
  K << 0.0, 1.0, -1.0, 0.0;
  return K;
}

}  // namespace nod::test
