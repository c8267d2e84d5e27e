#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nod/linalg.hpp"
#include "nod/probes.hpp"
#include "nod/random.hpp"
#include "support.hpp"

#include <cmath>
#include <limits>

using namespace nod;
using doctest::Approx;
using test::vec2;

namespace {

constexpr long kSamples = 10000;
constexpr std::uint64_t kSeed = 2024;

std::vector<test::NamedProblem> builtin_instances() {
  auto out = test::acceptance_instances();
  Mat A(2, 2);
  A << 2, 0.5, 0.5, 3;
  out.push_back({"quadratic_skew general", make_quadratic_skew(A, 1.5 * test::rotation_generator())});
  BilinearTargets t;
  t.mu_x = 0.5;
  t.L_x = 4;
  t.mu_y = 1;
  t.L_y = 3;
  t.L_xy = 2;
  out.push_back({"random bilinear 3x2", make_bilinear(random_bilinear_instance(3, 2, t, 21))});
  return out;
}

}  // namespace

TEST_CASE("monotonicity_probe") {
  const DecomposedProblem s = make_sin_coupling();
  CHECK(monotonicity_probe(s.S, Box{}, kSamples, kSeed) >= -1e-10);

  const Mat K = 3.0 * test::rotation_generator();
  const Oracle skew = [K](const Vec& z) { return Vec(K * z); };
  CHECK(std::abs(monotonicity_probe(skew, Box{}, 1000, kSeed)) <= 1e-14);

  const Oracle anti = [](const Vec& z) { return Vec(-z); };
  CHECK(monotonicity_probe(anti, Box{}, 1000, kSeed) == Approx(-1.0));
  CHECK_THROWS_AS(monotonicity_probe(anti, Box{}, 1, kSeed), DomainError);
}

TEST_CASE("strong_monotonicity_probe") {
  const Oracle T = [](const Vec& z) { return sin_coupling_T(z); };
  CHECK(strong_monotonicity_probe(T, Box{}, kSamples, kSeed) >= 1 - 1e-6);
  const Oracle id = [](const Vec& z) { return z; };
  CHECK(strong_monotonicity_probe(id, Box{}, 1000, kSeed) == Approx(1.0).epsilon(1e-14));
  Mat A = Mat::Zero(2, 2);
  A(0, 0) = 2;
  A(1, 1) = 3;
  const DecomposedProblem q = make_quadratic_skew(A, test::rotation_generator());
  const Oracle field = [&q](const Vec& z) { return q.field(z); };
  CHECK(strong_monotonicity_probe(field, Box{}, kSamples, kSeed) >= 2 - 1e-9);
}

TEST_CASE("lipschitz_probe") {
  const DecomposedProblem s = make_sin_coupling();
  CHECK(lipschitz_probe(s.S, Box{}, kSamples, kSeed) <= 2 + 1e-9);
  const Oracle T = [](const Vec& z) { return sin_coupling_T(z); };
  CHECK(lipschitz_probe(T, Box{}, kSamples, kSeed) <= 3 + 1e-9);

  Rng rng(1);
  const Mat K = rng.normal_mat(3, 3);
  const Oracle lin = [K](const Vec& z) { return Vec(K * z); };
  const double norm = Eigen::JacobiSVD<Mat>(K).singularValues()(0);
  const double est = lipschitz_probe(lin, Box{-10, 10, 3}, kSamples, kSeed);
  CHECK(est <= norm * (1 + 1e-12));
  CHECK(est >= 0.9 * norm);
}

TEST_CASE("probe battery on every built-in instance") {
  for (const auto& [name, p] : builtin_instances()) {
    CAPTURE(name);
    const Box box{-10, 10, p.dim};
    CHECK(monotonicity_probe(p.S, box, kSamples, kSeed) >= -1e-10);
    CHECK(lipschitz_probe(p.S, box, kSamples, kSeed) <= p.L_S + 1e-9);
    CHECK(strong_monotonicity_probe(p.grad_phi, box, kSamples, kSeed) >= p.mu - 1e-6);
    CHECK(lipschitz_probe(p.grad_phi, box, kSamples, kSeed) <= p.L_phi + 1e-9);
  }
}

TEST_CASE("grad_consistency") {
  Mat A(2, 2);
  A << 2, 0.5, 0.5, 3;
  const DecomposedProblem q = make_pure_convex(A, vec2(1, -1));
  CHECK(grad_consistency(q, Box{-5, 5, 2}, 100, kSeed) <= 1e-9);
  CHECK(grad_consistency(make_sin_coupling(), Box{-5, 5, 2}, 100, kSeed) <= 1e-6);

  DecomposedProblem wrong = q;
  wrong.grad_phi = [q](const Vec& z) { return Vec(1.01 * q.grad_phi(z)); };
  CHECK(grad_consistency(wrong, Box{-5, 5, 2}, 100, kSeed) >= 1e-3);

  DecomposedProblem none = q;
  none.phi_val = nullptr;
  CHECK_THROWS_AS(grad_consistency(none, Box{-5, 5, 2}, 10, kSeed), DomainError);
}

TEST_CASE("symm_jacobian_min_eig") {
  const DecomposedProblem s = make_sin_coupling();
  const Grid grid{-2 * M_PI, 2 * M_PI, 2, 201, 1e-3};
  const MinEigResult r = symm_jacobian_min_eig(s.S, grid, 1e-5);
  CHECK(r.min_eig >= -1e-5);
  REQUIRE(r.argmin.size() == 2);

  const Mat K = 2.0 * test::rotation_generator();
  const Oracle skew = [K](const Vec& z) { return Vec(K * z); };
  // exact answer is 0; central differences leave rounding of order eps |K| |z| / h
  const double fd_noise = 4 * std::numeric_limits<double>::epsilon() * 2 * std::sqrt(2.0) / 1e-5;
  CHECK(std::abs(symm_jacobian_min_eig(skew, Grid{}, 1e-5).min_eig) <= fd_noise);

  const Oracle negated = [&s](const Vec& z) { return Vec(-s.S(z)); };
  const MinEigResult n = symm_jacobian_min_eig(negated, grid, 1e-5);
  CHECK(n.min_eig <= -0.5);

  CHECK_THROWS_AS(symm_jacobian_min_eig(skew, Grid{}, 1e-3), DomainError);
  CHECK_THROWS_AS(symm_jacobian_min_eig(skew, Grid{-1, 1, 2, 1, 0}, 1e-5), DomainError);
}

TEST_CASE("symm(DS) structure on the red and blue lines") {
  // Red lines: x = n pi, or y = (2m + 1/2) pi with x in [2n pi, (2n+1) pi],
  // or y = (2m - 1/2) pi with x in [(2n-1) pi, 2n pi]. There the (1,1) and
  // (1,2) entries vanish; on the blue lines (the same sets with x and y
  // exchanged) the (2,2) and (1,2) entries vanish.
  const DecomposedProblem s = make_sin_coupling();
  const double h = 1e-5;
  auto symm = [&](double x, double y) {
    const Mat j = fd_jacobian(s.S, vec2(x, y), h);
    return Mat(0.5 * (j + j.transpose()));
  };
  Rng rng(3);
  for (int n = -2; n <= 2; ++n) {
    for (int i = 0; i < 20; ++i) {
      const double t = rng.uniform(-2 * M_PI, 2 * M_PI);
      const double a = rng.uniform(0.01, M_PI - 0.01);
      // red
      Mat m = symm(n * M_PI, t);
      CHECK(std::abs(m(0, 0)) <= 2 * h);
      CHECK(std::abs(m(0, 1)) <= 2 * h);
      m = symm(2 * n * M_PI + a, (2 * n + 0.5) * M_PI);
      CHECK(std::abs(m(0, 0)) <= 2 * h);
      CHECK(std::abs(m(0, 1)) <= 2 * h);
      m = symm((2 * n - 1) * M_PI + a, (2 * n - 0.5) * M_PI);
      CHECK(std::abs(m(0, 0)) <= 2 * h);
      // blue
      m = symm(t, n * M_PI);
      CHECK(std::abs(m(1, 1)) <= 2 * h);
      CHECK(std::abs(m(0, 1)) <= 2 * h);
      m = symm((2 * n - 0.5) * M_PI, 2 * n * M_PI + a);
      CHECK(std::abs(m(1, 1)) <= 2 * h);
      m = symm((2 * n + 0.5) * M_PI, (2 * n - 1) * M_PI + a);
      CHECK(std::abs(m(1, 1)) <= 2 * h);
    }
  }
}

TEST_CASE("sin_jacobian_norm") {
  CHECK(sin_jacobian_norm(0, 0) == Approx(std::sqrt(5.0)).epsilon(1e-15));
  CHECK(sin_jacobian_norm(0, 0) == Approx(2.2360680).epsilon(1e-7));
  CHECK(sin_jacobian_norm(M_PI / 2, M_PI / 2) == 3.0);
  double sup = 0;
  for (int i = 0; i <= 400; ++i) {
    for (int j = 0; j <= 400; ++j) {
      sup = std::max(sup, sin_jacobian_norm(-M_PI + 2 * M_PI * i / 400, -M_PI + 2 * M_PI * j / 400));
    }
  }
  CHECK(sup <= 3 + 1e-12);

  const Oracle T = [](const Vec& z) { return sin_coupling_T(z); };
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const Vec z = rng.uniform_vec(2, -10, 10);
    const Mat j = fd_jacobian(T, z, 1e-5);
    const double svd = Eigen::JacobiSVD<Mat>(j).singularValues()(0);
    CHECK(std::abs(svd - sin_jacobian_norm(z(0), z(1))) <= 1e-4);
  }
}

TEST_CASE("fd_jacobian of a linear map") {
  Rng rng(5);
  const Mat A = rng.normal_mat(3, 2);
  const Oracle f = [A](const Vec& z) { return Vec(A * z); };
  CHECK((fd_jacobian(f, vec2(0.3, -1), 1e-5) - A).norm() <= 1e-9);
}
