#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nod/linalg.hpp"
#include "nod/random.hpp"
#include "nod/solvers.hpp"
#include "support.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace nod;
using doctest::Approx;
using test::linear_step_matrix;
using test::rel_err;
using test::vec2;

namespace {

StoppingRule budget(long n, bool keep = true) {
  StoppingRule s;
  s.max_iters = n;
  s.keep_iterates = keep;
  return s;
}

}  // namespace

TEST_CASE("first iterate on phi = z^2 / 2") {
  const DecomposedProblem p = test::scalar_quadratic();
  const double c = solve_C();
  Vec z0(1);
  z0 << 1.0;
  const SolverTrace t = nod_run(p, c, z0, budget(1));
  REQUIRE(t.z_log.size() == 2);
  CHECK(t.z_log[1](0) == Approx(1 - c).epsilon(1e-15));
  CHECK(t.z_log[1](0) == Approx(0.973882).epsilon(1e-6));
  const double tau = (1 - std::sqrt(c)) / (1 + std::sqrt(c));
  CHECK(t.z_tilde_log[1](0) == Approx((1 - c) - tau * c).epsilon(1e-15));
  CHECK(t.z_tilde_log[1](0) == Approx(0.955036).epsilon(1e-5));
}

TEST_CASE("first iterate on the unit rotation instance") {
  const DecomposedProblem p = make_quadratic_skew(Mat::Identity(2, 2), test::rotation_generator());
  const double c = solve_C();
  const SolverTrace t = nod_run(p, c, vec2(1, 0), budget(1));
  CHECK(t.z_log[1](0) == Approx(1 - c).epsilon(1e-15));
  CHECK(t.z_log[1](1) == Approx(c).epsilon(1e-15));
}

TEST_CASE("the solution is a fixed point") {
  const DecomposedProblem p = make_sin_coupling();
  const SolverTrace t = nod_run(p, p.default_eta(), *p.z_star, budget(50));
  for (std::size_t k = 0; k < t.z_log.size(); ++k) {
    CHECK(t.z_log[k] == *p.z_star);
    CHECK(t.z_tilde_log[k] == *p.z_star);
  }
}

TEST_CASE("zero budget records only the start") {
  const DecomposedProblem p = make_sin_coupling();
  const SolverTrace t = nod_run(p, p.default_eta(), default_start(2), budget(0));
  CHECK(t.records.size() == 1);
  CHECK(t.records[0].k == 0);
  CHECK(t.meta.stop == StopReason::budget);
}

TEST_CASE("one grad phi and one S evaluation per iteration") {
  const DecomposedProblem p = make_sin_coupling();
  for (long n : {0L, 1L, 10L, 137L}) {
    const SolverTrace t = nod_run(p, p.default_eta(), default_start(2), budget(n, false));
    CHECK(t.meta.grad_phi_calls == n + 1);
    CHECK(t.meta.S_calls == n + 1);
  }
}

TEST_CASE("momentum identity holds at every step") {
  for (const auto& [name, p] : test::acceptance_instances()) {
    CAPTURE(name);
    const StepPlan plan = step_plan(p.default_eta(), p.mu);
    const double inv = 1 / plan.sqrt_eta_mu();
    SolverState s = initial_state(p, default_start(p.dim));
    for (int k = 0; k < 300; ++k) {
      const SolverState n = nod_step(s, plan, p);
      const Vec lhs = n.z_tilde - s.z + inv * (n.z_tilde - n.z);
      const Vec rhs = inv * (n.z - s.z);
      CHECK((lhs - rhs).norm() <= 1e-12 * (1 + rhs.norm() + inv * n.z.norm()));
      s = n;
    }
  }
}

TEST_CASE("runs are bitwise deterministic") {
  for (const auto& [name, p] : test::acceptance_instances()) {
    CAPTURE(name);
    const SolverTrace a = nod_run(p, p.default_eta(), default_start(p.dim), budget(300));
    const SolverTrace b = nod_run(p, p.default_eta(), default_start(p.dim), budget(300));
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      CHECK(a.records[i].residual == b.records[i].residual);
      CHECK(a.records[i].psi == b.records[i].psi);
      CHECK(a.z_tilde_log[i] == b.z_tilde_log[i]);
    }
  }
}

TEST_CASE("NOD with S = 0 reduces to NAG") {
  Mat A = Mat::Zero(2, 2);
  A(0, 0) = 1;
  A(1, 1) = 10;
  for (const Vec& b : {Vec(Vec::Zero(2)), vec2(1, -2)}) {
    const DecomposedProblem p = make_pure_convex(A, b);
    const SolverTrace nod = nod_run(p, p.default_eta(), default_start(2), budget(1000));
    const SolverTrace nag = nag_run(p, p.default_eta(), default_start(2), budget(1000));
    REQUIRE(nod.z_tilde_log.size() == 1001);
    REQUIRE(nag.z_tilde_log.size() == 1001);
    for (std::size_t k = 0; k <= 1000; ++k) {
      CHECK(rel_err(nod.z_tilde_log[k], nag.z_tilde_log[k]) <= 1e-12);
    }
    CHECK(nag.meta.S_calls == 0);
  }
  CHECK_THROWS_AS(nag_run(make_sin_coupling(), 0.01, default_start(2), budget(1)), DomainError);
}

TEST_CASE("NAG with identity Hessian and eta mu = 1 is gradient descent") {
  const DecomposedProblem p = make_pure_convex(Mat::Identity(2, 2), Vec::Zero(2));
  const SolverTrace t = nag_run(p, 1.0, default_start(2), budget(3));
  CHECK(t.z_tilde_log[1].norm() == 0.0);
}

TEST_CASE("NAG at the classical step 1 / L_phi") {
  Mat A = Mat::Zero(2, 2);
  A(0, 0) = 1;
  A(1, 1) = 10;
  const DecomposedProblem p = make_pure_convex(A, Vec::Zero(2));
  const SolverTrace t = nag_run(p, 0.1, default_start(2), budget(300));
  const double ratio =
      std::pow(t.records[300].residual / t.records[100].residual, 1.0 / 200.0);
  // the slow mode has a double root rho = 1 - sqrt(0.1), so the residual
  // decays like k rho^k and the window picks up a factor 3^(1/200)
  const double rho = 1 - std::sqrt(0.1);
  CHECK(ratio <= rho * std::pow(3.0, 1.0 / 200.0) + 1e-4);
  CHECK(ratio >= rho);
}

TEST_CASE("independent linear map reproduces quadratic_skew iterates") {
  Rng rng(4);
  std::vector<std::pair<Mat, Mat>> cases;
  cases.emplace_back(Mat::Identity(2, 2), 4.0 * test::rotation_generator());
  {
    const Mat A = random_spd(3, (Vec(3) << 1, 2, 4).finished(), rng);
    const Mat G = rng.normal_mat(3, 3);
    cases.emplace_back(A, G - G.transpose());
  }
  for (const auto& [A, K] : cases) {
    const DecomposedProblem p = make_quadratic_skew(A, K);
    const double eta = p.default_eta();
    const Mat F = linear_step_matrix(A, K, eta, p.mu);
    const Index d = A.rows();
    const Vec z0 = rng.uniform_vec(d, -3, 3);
    Vec X(3 * d);
    X << z0, z0, z0;
    const SolverTrace t = nod_run(p, eta, z0, budget(200));
    for (long k = 1; k <= 200; ++k) {
      X = F * X;
      CHECK(rel_err(X.head(d), t.z_log[k]) <= 1e-10);
      CHECK(rel_err(X.segment(d, d), t.z_tilde_log[k]) <= 1e-10);
    }
  }
}

TEST_CASE("spectral radius of the step map on the acceptance rotation instance") {
  const Mat A = Mat::Identity(2, 2);
  const Mat K = 4.0 * test::rotation_generator();
  const DecomposedProblem p = make_quadratic_skew(A, K);
  const double eta = p.default_eta();
  const Mat F = linear_step_matrix(A, K, eta, p.mu);
  const double rho = Eigen::EigenSolver<Mat>(F).eigenvalues().cwiseAbs().maxCoeff();
  CHECK(rho <= 1 - std::sqrt(eta * p.mu) / 2 + 1e-6);
}

TEST_CASE("dist_sq decay rate on quadratic_skew") {
  const DecomposedProblem p = make_rotation_instance(2, 1.0, 4.0);
  const double eta = p.default_eta();
  const SolverTrace t = nod_run(p, eta, default_start(2), budget(500, false));
  const double ratio = std::pow(*t.records[500].dist_sq / *t.records[100].dist_sq, 1.0 / 400.0);
  CHECK(ratio <= 1 - std::sqrt(eta * p.mu) + 1e-3);
}

TEST_CASE("bilinear-form first iterate") {
  Mat one(1, 1);
  one << 1.0;
  const BilinearInstance inst = make_bilinear_instance(one, Vec::Zero(1), one, Vec::Zero(1), one);
  const double c = solve_C();
  Vec x0(1), y0(1);
  x0 << 1.0;
  y0 << 1.0;
  const SolverTrace t = nod_bc_run(inst, c, x0, y0, budget(1));
  const double tau = (1 - std::sqrt(c)) / (1 + std::sqrt(c));
  CHECK(t.z_log[1](0) == Approx(1 - 2 * c).epsilon(1e-15));
  CHECK(t.z_log[1](1) == Approx(1.0).epsilon(1e-15));
  CHECK(t.z_tilde_log[1](0) == Approx(1 - 2 * c - 2 * tau * c).epsilon(1e-14));
  CHECK(t.z_tilde_log[1](1) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("bilinear form equals NOD on the scaled operator") {
  for (std::uint64_t seed : {31u, 32u, 33u}) {
    BilinearTargets tg;
    tg.mu_x = 0.5;
    tg.L_x = 3;
    tg.mu_y = 2;
    tg.L_y = 5;
    tg.L_xy = 2.5;
    const BilinearInstance inst = random_bilinear_instance(3, 2, tg, seed);
    const DecomposedProblem p = make_bilinear(inst);
    Rng rng(seed);
    const Vec x0 = rng.uniform_vec(3, -2, 2);
    const Vec y0 = rng.uniform_vec(2, -2, 2);
    Vec u0(5);
    u0 << std::sqrt(inst.mu_x) * x0, std::sqrt(inst.mu_y) * y0;
    const double eta = p.default_eta();
    const SolverTrace bc = nod_bc_run(inst, eta, x0, y0, budget(200));
    const SolverTrace gen = nod_run(p, eta, u0, budget(200));
    for (long k = 0; k <= 200; ++k) {
      Vec unscaled(5);
      unscaled << gen.z_tilde_log[k].head(3) / std::sqrt(inst.mu_x),
          gen.z_tilde_log[k].tail(2) / std::sqrt(inst.mu_y);
      CHECK(rel_err(unscaled, bc.z_tilde_log[k]) <= 1e-10);
      CHECK(bc.records[k].residual == Approx(gen.records[k].residual).epsilon(1e-9));
    }
  }
}

TEST_CASE("bilinear form with M = 0 is two NAG runs") {
  Mat Ag(2, 2), Ah(1, 1);
  Ag << 2, 0.3, 0.3, 1;
  Ah << 3;
  const BilinearInstance inst =
      make_bilinear_instance(Ag, vec2(1, -1), Ah, Vec::Ones(1), Mat::Zero(2, 1));
  const double eta = 0.01;
  const SolverTrace bc = nod_bc_run(inst, eta, vec2(1, 2), Vec::Ones(1), budget(100));

  const double s = std::sqrt(eta);
  const double tau = (1 - s) / (1 + s);
  Vec x = vec2(1, 2), xt = x;
  double y = 1, yt = 1;
  for (int k = 1; k <= 100; ++k) {
    const Vec xn = xt - (eta / inst.mu_x) * inst.grad_g(xt);
    const double yn = yt - (eta / inst.mu_y) * (3 * yt + 1);
    xt = xn + tau * (xn - x);
    yt = yn + tau * (yn - y);
    x = xn;
    y = yn;
    CHECK((bc.z_tilde_log[k].head(2) - xt).norm() <= 1e-12);
    CHECK(bc.z_tilde_log[k](2) == Approx(yt).epsilon(1e-12));
  }
}

TEST_CASE("forward and extragradient baselines") {
  SUBCASE("forward with identity Hessian converges in one step") {
    const DecomposedProblem p = make_pure_convex(Mat::Identity(2, 2), Vec::Zero(2));
    StoppingRule s = budget(5, true);
    s.tol = 1e-300;
    const SolverTrace t = forward_run(p, 1.0, default_start(2), s);
    CHECK(t.z_log[1].norm() == 0.0);
    CHECK(t.meta.stop == StopReason::converged);
  }
  SUBCASE("extragradient converges linearly on a rotation instance") {
    const DecomposedProblem p =
        make_quadratic_skew(0.1 * Mat::Identity(2, 2), test::rotation_generator());
    const SolverTrace t = extragradient_run(p, 1 / (2 * 1.1), default_start(2), budget(400));
    const double ratio = std::pow(t.records[400].residual / t.records[0].residual, 1.0 / 400);
    CHECK(ratio < 1.0);
    CHECK(t.meta.S_calls == 2 * 400 + 1);
  }
  SUBCASE("forward on a skew-dominant instance exhausts a small budget") {
    const DecomposedProblem p = make_rotation_instance(2, 0.05, 20.0);
    StoppingRule s = budget(50, false);
    s.tol = 1e-10;
    const SolverTrace t = forward_run(p, forward_default_eta(p), default_start(2), s);
    CHECK(t.meta.stop == StopReason::budget);
  }
}

TEST_CASE("sin coupling converges within the complexity bound") {
  const DecomposedProblem p = make_sin_coupling();
  StoppingRule s;
  s.max_iters = 100000;
  s.tol = 1e-10;
  const SolverTrace t = nod_run(p, solve_C() / 4, vec2(3, -2), s);
  CHECK(t.meta.stop == StopReason::converged);
  const double bound = 10 * std::sqrt(2.0 + 4.0) * std::log(1e10);
  CHECK(t.iterations() <= bound);
  CHECK(*t.last().dist_sq <= 1e-10 * *t.records[2].psi / p.mu);
}

TEST_CASE("oversized steps diverge with an exception") {
  const DecomposedProblem p = make_rotation_instance(2, 1.0, 50.0);
  CHECK_THROWS_AS(nod_run(p, 1.0, default_start(2), budget(100000, false)), DivergedError);
}

TEST_CASE("dist_tol stops a run") {
  const DecomposedProblem p = make_rotation_instance(2, 1.0, 4.0);
  StoppingRule s = budget(100000, false);
  s.dist_tol = 1e-8;
  const SolverTrace t = nod_run(p, p.default_eta(), default_start(2), s);
  CHECK(t.meta.stop == StopReason::converged);
  CHECK(*t.last().dist_sq <= 1e-8);
  CHECK(*t.records[t.records.size() - 2].dist_sq > 1e-8);
}
