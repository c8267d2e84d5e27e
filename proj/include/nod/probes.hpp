#pragma once

#include "nod/core.hpp"
#include "nod/problems.hpp"

#include <cstdint>

namespace nod {

// Sampled probes give necessary-condition evidence for the operator
// properties a decomposition claims. They never certify a property.

/// Axis-aligned cube [lo, hi]^dim.
struct Box {
  double lo = -10.0;
  double hi = 10.0;
  Index dim = 2;
};

/// min over n seeded pairs of <op(z) - op(z'), z - z'> / |z - z'|^2.
/// Monotone operators give values >= 0 up to rounding.
double monotonicity_probe(const Oracle& op, const Box& box, long n, std::uint64_t seed);

/// Same sampled pairing ratio, read as an estimate of the strong
/// monotonicity modulus (the infimum over pairs).
double strong_monotonicity_probe(const Oracle& op, const Box& box, long n, std::uint64_t seed);

/// sup over n seeded pairs of |op(z) - op(z')| / |z - z'|.
double lipschitz_probe(const Oracle& op, const Box& box, long n, std::uint64_t seed);

/// Central-difference gradient of `f` at z with step h.
Vec central_difference_gradient(const ScalarOracle& f, const Vec& z, double h = 1e-5);

/// max over n seeded points of |grad_phi(z) - central difference of phi_val|_inf.
double grad_consistency(const DecomposedProblem& problem, const Box& box, long n,
                        std::uint64_t seed);

/// Central-difference Jacobian of `op` at z; column j is d op / d z_j.
Mat fd_jacobian(const Oracle& op, const Vec& z, double h);

/// Tensor lattice over [lo, hi]^dim with `points` nodes per axis, every node
/// shifted by `offset` along each axis.
struct Grid {
  double lo = -1.0;
  double hi = 1.0;
  Index dim = 2;
  long points = 11;
  double offset = 0.0;
};

struct MinEigResult {
  double min_eig = 0.0;
  Vec argmin;
};

/// Smallest eigenvalue of sym(D op) = (J + J^T) / 2 over the lattice, with J
/// from central differences. Requires fd_step in [1e-7, 1e-4].
MinEigResult symm_jacobian_min_eig(const Oracle& op, const Grid& grid, double fd_step);

/// Operator norm of the Jacobian of the sin-coupling saddle gradient:
/// sqrt(4 + cos^2 x cos^2 y) + |sin x sin y|.
double sin_jacobian_norm(double x, double y);

}  // namespace nod
