#include "nod/linalg.hpp"

#include "nod/random.hpp"

#include <cmath>

namespace nod {

double spectral_norm(const Eigen::Ref<const Mat>& A, double rel_tol, int max_iters) {
  if (A.size() == 0) {
    return 0.0;
  }
  const Index n = A.cols();
  // fixed, non-symmetric start so it is unlikely to be orthogonal to the top singular vector
  Vec v(n);
  for (Index i = 0; i < n; ++i) {
    v(i) = 1.0 + 0.1 * static_cast<double>(i % 7) + 0.01 * static_cast<double>(i);
  }
  v.normalize();

  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vec w = A.transpose() * (A * v);
    const double next = v.dot(w);
    const double norm_w = w.norm();
    if (norm_w == 0.0) {
      return 0.0;
    }
    w /= norm_w;
    const bool settled = std::abs(next - lambda) <= rel_tol * std::abs(next);
    lambda = next;
    v = w;
    if (settled) {
      break;
    }
  }
  return std::sqrt(std::max(lambda, 0.0));
}

std::pair<double, double> symmetric_eig_extremes(const Eigen::Ref<const Mat>& A) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(A, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw DomainError("symmetric_eig_extremes: eigen decomposition failed");
  }
  const Vec& ev = solver.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

bool is_symmetric(const Eigen::Ref<const Mat>& A, double tol) {
  if (A.rows() != A.cols()) {
    return false;
  }
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  return (A - A.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

bool is_skew(const Eigen::Ref<const Mat>& A, double tol) {
  if (A.rows() != A.cols()) {
    return false;
  }
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  return (A + A.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

Vec lu_solve(const Eigen::Ref<const Mat>& A, const Eigen::Ref<const Vec>& rhs) {
  if (A.rows() != A.cols() || A.rows() != rhs.size()) {
    throw DomainError("lu_solve: dimension mismatch");
  }
  Eigen::FullPivLU<Mat> lu(A);
  if (!lu.isInvertible()) {
    throw DomainError("lu_solve: singular system");
  }
  return lu.solve(rhs);
}

Mat random_orthogonal(Index n, Rng& rng) {
  Eigen::HouseholderQR<Mat> qr(rng.normal_mat(n, n));
  Mat q = qr.householderQ();
  // fix column signs so the result is a deterministic function of the draw
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) {
      q.col(j) = -q.col(j);
    }
  }
  return q;
}

Mat random_spd(Index n, const Vec& eigs, Rng& rng) {
  if (eigs.size() != n) {
    throw DomainError("random_spd: need one eigenvalue per dimension");
  }
  const Mat q = random_orthogonal(n, rng);
  Mat a = q * eigs.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

Mat random_with_singular_values(Index rows, Index cols, const Vec& sv, Rng& rng) {
  const Index k = std::min(rows, cols);
  if (sv.size() != k) {
    throw DomainError("random_with_singular_values: need min(rows, cols) singular values");
  }
  const Mat u = random_orthogonal(rows, rng);
  const Mat w = random_orthogonal(cols, rng);
  Mat sigma = Mat::Zero(rows, cols);
  for (Index i = 0; i < k; ++i) {
    sigma(i, i) = sv(i);
  }
  return u * sigma * w.transpose();
}

}  // namespace nod
