#pragma once

#include "nod/core.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace nod {

// mt19937_64 is fully specified by the standard; the distributions below are
// built from raw bits so that samples agree across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (no cached second value).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) {
      u1 = uniform();
    }
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Vec uniform_vec(Index n, double lo, double hi) {
    Vec v(n);
    for (Index i = 0; i < n; ++i) {
      v(i) = uniform(lo, hi);
    }
    return v;
  }

  Mat normal_mat(Index rows, Index cols) {
    Mat m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < rows; ++i) {
        m(i, j) = normal();
      }
    }
    return m;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nod
