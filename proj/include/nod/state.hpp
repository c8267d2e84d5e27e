#pragma once

#include "nod/core.hpp"

namespace nod {

/// Iterate bundle of the accelerated decomposed method at step k.
///
/// `field` holds grad(phi)(z_tilde_k) + S(z_hat_k), the one oracle pair
/// evaluated per step. The remaining history is what the discrete Lyapunov
/// function needs from steps k-1 and k-2; entries are empty until defined.
struct SolverState {
  long k = 0;
  Vec z;
  Vec z_tilde;
  Vec z_hat;
  Vec z_tilde_prev;  // z_tilde_{k-1}
  Vec field;         // at k
  Vec field_prev;    // at k-1
  Vec field_prev2;   // at k-2
  Vec diff_prev;     // z_tilde_{k-1} - z_{k-1}
};

}  // namespace nod
