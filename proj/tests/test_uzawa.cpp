#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "granmilp/relaxation.hpp"
#include "granmilp/uzawa.hpp"
#include "support/instances.hpp"

using namespace granmilp;
using namespace granmilp::testing;
using Catch::Matchers::WithinAbs;

namespace {

RelaxedProblem continuous(std::vector<double> c, std::size_t rows, std::vector<double> A, std::vector<double> h,
                          std::vector<double> lo, std::vector<double> hi, double alpha = 0.1, double delta = 0.1) {
  RelaxOptions o;
  o.phi = 0.0;
  o.alpha = alpha;
  o.delta = delta;
  return build_relaxation(continuous_instance(std::move(c), rows, std::move(A), std::move(h), std::move(lo),
                                              std::move(hi)),
                          o);
}

SolveSettings defaults(const RelaxedProblem& P) {
  SolveSettings s;
  s.steps = default_steps(P);
  return s;
}

}  // namespace

TEST_CASE("default step sizes") {
  const RelaxedProblem P = continuous({1.0}, 1, {1.0}, {1.0}, {0.0}, {1.0});
  REQUIRE_THAT(P.norm_A, WithinAbs(1.0, 1e-12));
  const StepSizes s = default_steps(P);
  CHECK_THAT(s.beta, WithinAbs(0.9 * 0.2 / 1.02, 1e-12));
  CHECK_THAT(s.beta, WithinAbs(0.1764, 1e-4));
  CHECK_THAT(s.gamma, WithinAbs(1.0 / 1.1, 1e-12));
  CHECK_THAT(default_steps(P, 4.0).gamma, WithinAbs(1.0 / 4.1, 1e-12));

  // no coupling rows: only the second limit remains
  MilpInstance free;
  free.d = {1.0};
  free.E = CsrMatrix<double>(0, 0);
  free.F = CsrMatrix<std::int64_t>(0, 1);
  free.y_lo = {0};
  free.y_hi = {1};
  RelaxOptions o;
  o.xi = 0.6;
  const RelaxedProblem Q = build_relaxation(free, o);
  CHECK_THAT(default_steps(Q).beta, WithinAbs(0.9 * 0.2 / 1.01, 1e-15));
}

TEST_CASE("step validation") {
  const RelaxedProblem P = continuous({1.0}, 1, {1.0}, {1.0}, {0.0}, {1.0});
  CHECK_NOTHROW(check_steps(P, default_steps(P)));
  const double limit = beta_limit(P.alpha, P.delta, P.norm_A);
  for (StepSizes s : {StepSizes{0.0, 0.1}, StepSizes{0.5, 0.0}, StepSizes{0.5, limit},
                      StepSizes{std::numeric_limits<double>::infinity(), 0.1}}) {
    try {
      check_steps(P, s);
      FAIL("expected StepSizeViolation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::StepSizeViolation);
    }
  }
  // a user override is used verbatim
  SolveSettings s;
  s.steps = {0.3, 0.05};
  UzawaIterator it(P, s);
  it.step();
  CHECK_THAT(it.z()[0], WithinAbs(0.0, 0.0));
}

TEST_CASE("one-dimensional problem with an inactive row") {
  const RelaxedProblem P = continuous({1.0}, 1, {1.0}, {1.0}, {0.0}, {1.0});
  const SaddleSolution sol = solve(P, defaults(P));
  CHECK_THAT(sol.z_hat[0], WithinAbs(0.0, 1e-12));
  CHECK_THAT(sol.lambda_hat[0], WithinAbs(0.0, 1e-12));
  CHECK(sol.residual <= 1e-10);
}

TEST_CASE("one-dimensional problem with an active row") {
  // min -z + z^2/20 s.t. z <= 1 on [-2, 2]: z = 10(1 - l), l = 10(z - 1)
  const RelaxedProblem P = continuous({-1.0}, 1, {1.0}, {1.0}, {-2.0}, {2.0});
  SolveSettings s = defaults(P);
  s.cap_dual = false;
  const SaddleSolution sol = solve(P, s);
  CHECK_THAT(sol.z_hat[0], WithinAbs(110.0 / 101.0, 1e-8));
  CHECK_THAT(sol.lambda_hat[0], WithinAbs(90.0 / 101.0, 1e-8));
}

TEST_CASE("swapping symmetric variables leaves the solution unchanged") {
  const RelaxedProblem P = continuous({-1.0, -1.0}, 2, {1.0, 0.5, 0.5, 1.0}, {1.0, 1.0}, {-1.0, -1.0}, {2.0, 2.0});
  const SaddleSolution sol = solve(P, defaults(P));
  CHECK_THAT(sol.z_hat[0] - sol.z_hat[1], WithinAbs(0.0, 1e-9));
  CHECK_THAT(sol.lambda_hat[0] - sol.lambda_hat[1], WithinAbs(0.0, 1e-9));

  const RelaxedProblem Q = continuous({-1.0, -2.0}, 1, {1.0, 3.0}, {1.0}, {-1.0, -1.0}, {2.0, 2.0});
  const RelaxedProblem R = continuous({-2.0, -1.0}, 1, {3.0, 1.0}, {1.0}, {-1.0, -1.0}, {2.0, 2.0});
  const SaddleSolution a = solve(Q, defaults(Q)), b = solve(R, defaults(R));
  CHECK_THAT(a.z_hat[0] - b.z_hat[1], WithinAbs(0.0, 1e-9));
  CHECK_THAT(a.z_hat[1] - b.z_hat[0], WithinAbs(0.0, 1e-9));
}

TEST_CASE("small problems match a grid search of the min-max") {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const double c = u(gen), a = u(gen) > 0 ? 1.0 + 0.5 * u(gen) : -1.0 - 0.5 * u(gen), h = 0.5 * u(gen);
    const RelaxedProblem P = continuous({c}, 1, {a}, {h}, {-1.0}, {1.0}, 1.0, 1.0);
    SolveSettings s = defaults(P);
    const SaddleSolution sol = solve(P, s);
    const double R = P.lambda_radius, hz = 1e-3, hl = 1e-3;
    double best_val = std::numeric_limits<double>::infinity(), best_z = 0.0;
    for (double z = -1.0; z <= 1.0 + 1e-12; z += hz) {
      double inner = -std::numeric_limits<double>::infinity();
      for (double l = 0.0; l <= R + 1e-12; l += hl)
        inner = std::max(inner, eval_L(P, std::vector<double>{z}, std::vector<double>{l}));
      if (inner < best_val) {
        best_val = inner;
        best_z = z;
      }
    }
    INFO("instance " << t);
    CHECK_THAT(sol.z_hat[0], WithinAbs(best_z, 1e-2));
    CHECK_THAT(eval_L(P, sol.z_hat, sol.lambda_hat), WithinAbs(best_val, 1e-3));
  }
}

TEST_CASE("saddle inequalities hold against random probes") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MilpInstance m = random_granular(RandomSpec{}, 40 + seed);
    const RelaxedProblem P = build_relaxation(m, tuned_options(m));
    SolveSettings s = defaults(P);
    s.residual_tol = 1e-12;
    const SaddleSolution sol = solve(P, s);
    REQUIRE(P.z_box.contains(sol.z_hat));
    REQUIRE(norm1(sol.lambda_hat) <= P.lambda_radius + 1e-12);
    const double at = eval_L(P, sol.z_hat, sol.lambda_hat);
    for (int t = 0; t < 1000; ++t) {
      std::vector<double> z(P.dim()), l(P.rows());
      for (std::size_t i = 0; i < z.size(); ++i) z[i] = P.z_box.lo[i] + (P.z_box.hi[i] - P.z_box.lo[i]) * u(gen);
      for (auto& v : l) v = 2.0 * P.lambda_radius * u(gen);
      project_capped_simplex_inplace(l, P.lambda_radius);
      REQUIRE(eval_L(P, sol.z_hat, l) <= at + 1e-7);
      REQUIRE(at <= eval_L(P, z, sol.lambda_hat) + 1e-7);
    }
  }
}

namespace {

// Distances to the converged point after every iteration, each coordinate
// scaled by 1 / sqrt(step) of its block.
std::vector<double> distance_history(const RelaxedProblem& P, SolveSettings s, bool step_metric) {
  s.residual_tol = 1e-12;
  s.max_iters = 50'000'000;
  const SaddleSolution ref = solve(P, s);
  s.residual_tol = 1e-9;
  const double wz = step_metric ? 1.0 / s.steps.gamma : 1.0, wl = step_metric ? 1.0 / s.steps.beta : 1.0;
  std::vector<double> dist;
  solve(P, s, [&](long, std::span<const double> z, std::span<const double> l) {
    const double dz = distance2(z, ref.z_hat), dl = distance2(l, ref.lambda_hat);
    dist.push_back(std::sqrt(wz * dz * dz + wl * dl * dl));
  });
  return dist;
}

}  // namespace

TEST_CASE("Euclidean distance to the saddle point decreases over the last tenth of the run") {
  // Equal primal and dual steps, so the Euclidean norm is the step metric.
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const MilpInstance m = random_granular(RandomSpec{}, 90 + seed);
    const RelaxedProblem P = build_relaxation(m, tuned_options(m));
    SolveSettings s = defaults(P);
    s.steps.gamma = s.steps.beta;
    const auto dist = distance_history(P, s, false);
    const std::size_t from = std::max<std::size_t>(dist.size() - dist.size() / 10, 1);
    for (std::size_t k = from; k < dist.size(); ++k) {
      INFO("seed " << seed << " iteration " << k);
      REQUIRE(dist[k] <= dist[k - 1] * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("step-weighted distance to the saddle point decreases at default steps") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MilpInstance m = random_granular(RandomSpec{}, 90 + seed);
    const RelaxedProblem P = build_relaxation(m, tuned_options(m));
    const auto dist = distance_history(P, defaults(P), true);
    for (std::size_t k = 1; k < dist.size(); ++k) {
      INFO("seed " << seed << " iteration " << k);
      REQUIRE(dist[k] <= dist[k - 1] * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("solves are deterministic") {
  const MilpInstance m = random_granular(RandomSpec{}, 3);
  const RelaxedProblem P = build_relaxation(m, tuned_options(m));
  const SaddleSolution a = solve(P, defaults(P)), b = solve(P, defaults(P));
  CHECK(a.z_hat == b.z_hat);
  CHECK(a.lambda_hat == b.lambda_hat);
  CHECK(a.iters == b.iters);
  CHECK(a.residual == b.residual);
}

TEST_CASE("iteration budget exhaustion carries the last iterate") {
  const RelaxedProblem P = continuous({-1.0}, 1, {1.0}, {1.0}, {-2.0}, {2.0});
  SolveSettings s = defaults(P);
  s.max_iters = 3;
  try {
    solve(P, s);
    FAIL("expected NotConverged");
  } catch (const NotConverged& e) {
    CHECK(e.iterations() == 3);
    CHECK(e.z().size() == 1);
    CHECK(e.lambda().size() == 1);
    CHECK(e.residual() > 0.0);
  }
}
