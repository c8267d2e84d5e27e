#include "nod/probes.hpp"

#include "nod/linalg.hpp"
#include "nod/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace nod {
namespace {

// Visits n seeded pairs (z, z') drawn uniformly from the box.
template <typename Visit>
void for_each_pair(const Box& box, long n, std::uint64_t seed, Visit&& visit) {
  Rng rng(seed);
  for (long i = 0; i < n; ++i) {
    const Vec a = rng.uniform_vec(box.dim, box.lo, box.hi);
    const Vec b = rng.uniform_vec(box.dim, box.lo, box.hi);
    if ((a - b).squaredNorm() == 0.0) {
      continue;
    }
    visit(a, b);
  }
}

double min_pairing_ratio(const Oracle& op, const Box& box, long n, std::uint64_t seed) {
  if (n < 2) {
    throw DomainError("probe: need at least 2 samples");
  }
  double best = std::numeric_limits<double>::infinity();
  for_each_pair(box, n, seed, [&](const Vec& a, const Vec& b) {
    const Vec d = a - b;
    best = std::min(best, (op(a) - op(b)).dot(d) / d.squaredNorm());
  });
  return best;
}

}  // namespace

double monotonicity_probe(const Oracle& op, const Box& box, long n, std::uint64_t seed) {
  return min_pairing_ratio(op, box, n, seed);
}

double strong_monotonicity_probe(const Oracle& op, const Box& box, long n, std::uint64_t seed) {
  return min_pairing_ratio(op, box, n, seed);
}

double lipschitz_probe(const Oracle& op, const Box& box, long n, std::uint64_t seed) {
  if (n < 2) {
    throw DomainError("lipschitz_probe: need at least 2 samples");
  }
  double best = 0.0;
  for_each_pair(box, n, seed, [&](const Vec& a, const Vec& b) {
    best = std::max(best, (op(a) - op(b)).norm() / (a - b).norm());
  });
  return best;
}

Vec central_difference_gradient(const ScalarOracle& f, const Vec& z, double h) {
  Vec g(z.size());
  Vec probe = z;
  for (Index i = 0; i < z.size(); ++i) {
    probe(i) = z(i) + h;
    const double up = f(probe);
    probe(i) = z(i) - h;
    const double down = f(probe);
    probe(i) = z(i);
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

double grad_consistency(const DecomposedProblem& problem, const Box& box, long n,
                        std::uint64_t seed) {
  if (!problem.phi_val) {
    throw DomainError("grad_consistency: problem has no phi_val oracle");
  }
  Rng rng(seed);
  double worst = 0.0;
  for (long i = 0; i < n; ++i) {
    const Vec z = rng.uniform_vec(box.dim, box.lo, box.hi);
    const Vec fd = central_difference_gradient(problem.phi_val, z, 1e-5);
    worst = std::max(worst, (problem.grad_phi(z) - fd).cwiseAbs().maxCoeff());
  }
  return worst;
}

Mat fd_jacobian(const Oracle& op, const Vec& z, double h) {
  const Index d = z.size();
  Mat jac;
  Vec probe = z;
  for (Index j = 0; j < d; ++j) {
    probe(j) = z(j) + h;
    const Vec up = op(probe);
    probe(j) = z(j) - h;
    const Vec down = op(probe);
    probe(j) = z(j);
    if (j == 0) {
      jac.resize(up.size(), d);
    }
    jac.col(j) = (up - down) / (2.0 * h);
  }
  return jac;
}

MinEigResult symm_jacobian_min_eig(const Oracle& op, const Grid& grid, double fd_step) {
  if (!(fd_step >= 1e-7 && fd_step <= 1e-4)) {
    throw DomainError("symm_jacobian_min_eig: fd_step must lie in [1e-7, 1e-4]");
  }
  if (grid.points < 2 || grid.dim < 1) {
    throw DomainError("symm_jacobian_min_eig: need at least 2 points per axis");
  }
  const double spacing = (grid.hi - grid.lo) / static_cast<double>(grid.points - 1);
  std::vector<long> idx(static_cast<std::size_t>(grid.dim), 0);

  MinEigResult out;
  out.min_eig = std::numeric_limits<double>::infinity();
  Vec z(grid.dim);
  // odometer over the lattice in lexicographic order; the first minimum wins
  while (true) {
    for (Index a = 0; a < grid.dim; ++a) {
      z(a) = grid.lo + spacing * static_cast<double>(idx[a]) + grid.offset;
    }
    const Mat j = fd_jacobian(op, z, fd_step);
    const Mat sym = 0.5 * (j + j.transpose());
    const double lo = symmetric_eig_extremes(sym).first;
    if (lo < out.min_eig) {
      out.min_eig = lo;
      out.argmin = z;
    }
    Index a = 0;
    while (a < grid.dim && ++idx[a] == grid.points) {
      idx[a] = 0;
      ++a;
    }
    if (a == grid.dim) {
      break;
    }
  }
  return out;
}

double sin_jacobian_norm(double x, double y) {
  const double cc = std::cos(x) * std::cos(y);
  return std::sqrt(4.0 + cc * cc) + std::abs(std::sin(x) * std::sin(y));
}

}  // namespace nod
