#include "nod/problems.hpp"

#include "nod/linalg.hpp"
#include "nod/random.hpp"

#include <cmath>

namespace nod {

void validate(const DecomposedProblem& p) {
  if (p.dim <= 0) {
    throw DomainError(p.id + ": dimension must be positive");
  }
  if (!(p.mu > 0.0) || !(p.mu <= p.L_phi)) {
    throw DomainError(p.id + ": need 0 < mu <= L_phi");
  }
  if (!(p.L_S >= 0.0)) {
    throw DomainError(p.id + ": need L_S >= 0");
  }
  if (p.z_star) {
    const Vec& zs = *p.z_star;
    if (zs.size() != p.dim) {
      throw DomainError(p.id + ": z_star has wrong dimension");
    }
    const double res = p.field(zs).norm();
    if (res > 1e-9 * (1.0 + zs.norm())) {
      throw DomainError(p.id + ": z_star residual too large");
    }
  }
}

Vec BilinearInstance::saddle_field(const Vec& x, const Vec& y) const {
  Vec out(dx() + dy());
  out.head(dx()) = grad_x_L(x, y);
  out.tail(dy()) = -grad_y_L(x, y);
  return out;
}

SaddleOracle BilinearInstance::saddle_oracle() const {
  return [inst = *this](const Vec& x, const Vec& y) { return inst.saddle_field(x, y); };
}

std::pair<Vec, Vec> BilinearInstance::solution() const {
  const Index n = dx() + dy();
  Mat kkt = Mat::Zero(n, n);
  kkt.topLeftCorner(dx(), dx()) = A_g;
  kkt.topRightCorner(dx(), dy()) = M;
  kkt.bottomLeftCorner(dy(), dx()) = -M.transpose();
  kkt.bottomRightCorner(dy(), dy()) = A_h;
  Vec rhs(n);
  rhs.head(dx()) = -b_g;
  rhs.tail(dy()) = -b_h;
  const Vec sol = lu_solve(kkt, rhs);
  return {sol.head(dx()), sol.tail(dy())};
}

BilinearInstance make_bilinear_instance(Mat A_g, Vec b_g, Mat A_h, Vec b_h, Mat M,
                                        std::optional<double> L_xy) {
  if (A_g.rows() == 0 || A_h.rows() == 0) {
    throw DomainError("bilinear: empty block");
  }
  if (!is_symmetric(A_g) || !is_symmetric(A_h)) {
    throw DomainError("bilinear: A_g and A_h must be symmetric");
  }
  if (b_g.size() != A_g.rows() || b_h.size() != A_h.rows()) {
    throw DomainError("bilinear: linear term dimension mismatch");
  }
  if (M.rows() != A_g.rows() || M.cols() != A_h.rows()) {
    throw DomainError("bilinear: M must be dx x dy");
  }
  BilinearInstance inst;
  inst.A_g = std::move(A_g);
  inst.b_g = std::move(b_g);
  inst.A_h = std::move(A_h);
  inst.b_h = std::move(b_h);
  inst.M = std::move(M);
  std::tie(inst.mu_x, inst.L_x) = symmetric_eig_extremes(inst.A_g);
  std::tie(inst.mu_y, inst.L_y) = symmetric_eig_extremes(inst.A_h);
  if (!(inst.mu_x > 0.0) || !(inst.mu_y > 0.0)) {
    throw DomainError("bilinear: A_g and A_h must be positive definite");
  }
  const double m_norm = spectral_norm(inst.M);
  inst.L_xy = m_norm;
  if (L_xy) {
    if (*L_xy < m_norm * (1.0 - 1e-12)) {
      throw DomainError("bilinear: L_xy must bound the spectral norm of M");
    }
    inst.L_xy = *L_xy;
  }
  return inst;
}

BilinearInstance random_bilinear_instance(Index dx, Index dy, const BilinearTargets& t,
                                          std::uint64_t seed) {
  if (dx < 1 || dy < 1) {
    throw DomainError("random_bilinear_instance: dimensions must be positive");
  }
  if (!(t.mu_x > 0.0 && t.mu_x <= t.L_x && t.mu_y > 0.0 && t.mu_y <= t.L_y && t.L_xy >= 0.0)) {
    throw DomainError("random_bilinear_instance: inconsistent targets");
  }
  Rng rng(seed);
  auto spectrum = [&rng](Index n, double lo, double hi) {
    Vec e(n);
    e(0) = lo;
    if (n > 1) {
      e(n - 1) = hi;
    }
    for (Index i = 1; i + 1 < n; ++i) {
      e(i) = rng.uniform(lo, hi);
    }
    return e;
  };
  const Mat A_g = random_spd(dx, spectrum(dx, t.mu_x, dx > 1 ? t.L_x : t.mu_x), rng);
  const Mat A_h = random_spd(dy, spectrum(dy, t.mu_y, dy > 1 ? t.L_y : t.mu_y), rng);
  const Index k = std::min(dx, dy);
  Vec sv(k);
  sv(0) = t.L_xy;
  for (Index i = 1; i < k; ++i) {
    sv(i) = rng.uniform(0.0, t.L_xy);
  }
  const Mat M = random_with_singular_values(dx, dy, sv, rng);
  Vec b_g = rng.uniform_vec(dx, -1.0, 1.0);
  Vec b_h = rng.uniform_vec(dy, -1.0, 1.0);
  return make_bilinear_instance(A_g, std::move(b_g), A_h, std::move(b_h), M, t.L_xy);
}

DecomposedProblem make_quadratic_skew(const Mat& A, const Mat& K) {
  if (!is_symmetric(A)) {
    throw DomainError("quadratic_skew: A must be symmetric");
  }
  if (K.rows() != A.rows() || !is_skew(K)) {
    throw DomainError("quadratic_skew: K must be skew-symmetric of matching size");
  }
  const auto [lmin, lmax] = symmetric_eig_extremes(A);
  if (!(lmin > 0.0)) {
    throw DomainError("quadratic_skew: A must be positive definite");
  }
  DecomposedProblem p;
  p.id = "quadratic_skew";
  p.dim = A.rows();
  p.grad_phi = [A](const Vec& z) -> Vec { return A * z; };
  p.S = [K](const Vec& z) -> Vec { return K * z; };
  p.phi_val = [A](const Vec& z) { return 0.5 * z.dot(A * z); };
  p.mu = lmin;
  p.L_phi = lmax;
  p.L_S = spectral_norm(K);
  p.z_star = Vec::Zero(p.dim);
  return p;
}

DecomposedProblem make_rotation_instance(Index dim, double mu, double omega) {
  if (dim < 2 || dim % 2 != 0) {
    throw DomainError("rotation instance: dimension must be even");
  }
  Mat K = Mat::Zero(dim, dim);
  for (Index i = 0; i < dim; i += 2) {
    K(i, i + 1) = omega;
    K(i + 1, i) = -omega;
  }
  return make_quadratic_skew(mu * Mat::Identity(dim, dim), K);
}

DecomposedProblem make_bilinear(const BilinearInstance& inst) {
  const Index dx = inst.dx();
  const Index dy = inst.dy();
  const double sx = 1.0 / std::sqrt(inst.mu_x);
  const double sy = 1.0 / std::sqrt(inst.mu_y);
  const double coupling = 1.0 / std::sqrt(inst.mu_x * inst.mu_y);

  DecomposedProblem p;
  p.id = "bilinear";
  p.dim = dx + dy;
  p.saddle_split = std::make_pair(dx, dy);
  p.grad_phi = [inst, dx, dy, sx, sy](const Vec& z) -> Vec {
    Vec out(dx + dy);
    out.head(dx) = sx * inst.grad_g(sx * z.head(dx));
    out.tail(dy) = sy * inst.grad_h(sy * z.tail(dy));
    return out;
  };
  p.S = [M = inst.M, dx, dy, coupling](const Vec& z) -> Vec {
    Vec out(dx + dy);
    out.head(dx) = coupling * (M * z.tail(dy));
    out.tail(dy) = -coupling * (M.transpose() * z.head(dx));
    return out;
  };
  p.phi_val = [inst, dx, dy, sx, sy](const Vec& z) {
    return inst.g(sx * z.head(dx)) + inst.h(sy * z.tail(dy));
  };
  p.mu = 1.0;
  p.L_phi = std::max(inst.L_x / inst.mu_x, inst.L_y / inst.mu_y);
  p.L_S = inst.L_xy * coupling;

  const auto [xs, ys] = inst.solution();
  Vec zs(dx + dy);
  zs.head(dx) = xs / sx;
  zs.tail(dy) = ys / sy;
  p.z_star = zs;
  return p;
}

DecomposedProblem make_pure_convex(const Mat& A, const Vec& b) {
  if (!is_symmetric(A) || b.size() != A.rows()) {
    throw DomainError("pure_convex: A must be symmetric and match b");
  }
  const auto [lmin, lmax] = symmetric_eig_extremes(A);
  if (!(lmin > 0.0)) {
    throw DomainError("pure_convex: A must be positive definite");
  }
  DecomposedProblem p;
  p.id = "pure_convex";
  p.dim = A.rows();
  p.grad_phi = [A, b](const Vec& z) -> Vec { return A * z + b; };
  p.S = [n = p.dim](const Vec&) -> Vec { return Vec::Zero(n); };
  p.phi_val = [A, b](const Vec& z) { return 0.5 * z.dot(A * z) + b.dot(z); };
  p.mu = lmin;
  p.L_phi = lmax;
  p.L_S = 0.0;
  p.z_star = lu_solve(A, -b);
  return p;
}

Vec sin_coupling_T(const Vec& z) {
  const double x = z(0);
  const double y = z(1);
  Vec t(2);
  t << 2.0 * x + std::cos(x) * std::sin(y), 2.0 * y - std::sin(x) * std::cos(y);
  return t;
}

DecomposedProblem make_sin_coupling() {
  DecomposedProblem p;
  p.id = "sin_coupling";
  p.dim = 2;
  p.grad_phi = [](const Vec& z) -> Vec {
    Vec g(2);
    g << h_prime(z(0)), h_prime(z(1));
    return g;
  };
  p.S = [](const Vec& z) -> Vec {
    Vec g(2);
    g << h_prime(z(0)), h_prime(z(1));
    return sin_coupling_T(z) - g;
  };
  p.phi_val = [](const Vec& z) { return h_val(z(0)) + h_val(z(1)); };
  // h'' = 2 - |sin| in [1, 2]; S is a sum of two 1-Lipschitz maps
  p.mu = 1.0;
  p.L_phi = 2.0;
  p.L_S = 2.0;
  p.z_star = Vec::Zero(2);
  return p;
}

Vec default_start(Index dim) {
  Vec z(dim);
  for (Index i = 0; i < dim; ++i) {
    z(i) = (i % 2 == 0) ? 3.0 : -2.0;
  }
  return z;
}

}  // namespace nod
