#pragma once

#include "nod/core.hpp"

#include <utility>

namespace nod {

/// Largest singular value by power iteration on A^T A, started from a fixed
/// vector; stops when the Rayleigh quotient settles to `rel_tol`.
double spectral_norm(const Eigen::Ref<const Mat>& A, double rel_tol = 1e-12,
                     int max_iters = 100000);

/// (lambda_min, lambda_max) of a symmetric matrix.
std::pair<double, double> symmetric_eig_extremes(const Eigen::Ref<const Mat>& A);

bool is_symmetric(const Eigen::Ref<const Mat>& A, double tol = 1e-12);
bool is_skew(const Eigen::Ref<const Mat>& A, double tol = 1e-12);

/// Dense LU solve; throws DomainError on a singular system.
Vec lu_solve(const Eigen::Ref<const Mat>& A, const Eigen::Ref<const Vec>& rhs);

/// Builds Q diag(eigs) Q^T with Q drawn from a seeded Gaussian matrix.
class Rng;
Mat random_spd(Index n, const Vec& eigs, Rng& rng);
/// Random matrix with prescribed singular values (min(rows, cols) of them).
Mat random_with_singular_values(Index rows, Index cols, const Vec& sv, Rng& rng);
/// Random orthogonal n x n matrix.
Mat random_orthogonal(Index n, Rng& rng);

}  // namespace nod
