#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "granmilp/analysis.hpp"
#include "granmilp/relaxation.hpp"
#include "granmilp/uzawa.hpp"
#include "support/instances.hpp"

using namespace granmilp;
using namespace granmilp::testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Validation;
}

MilpInstance small_integer(std::uint64_t seed, std::size_t m) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> coef(-3, 3), off(-1, 0);
  std::normal_distribution<double> cost(0.0, 1.0);
  MilpInstance inst;
  const std::size_t p = 4;
  std::vector<std::int64_t> F(p * m);
  for (auto& v : F) v = coef(gen);
  inst.E = CsrMatrix<double>(p, 0);
  inst.F = dense_int(p, m, F);
  for (std::size_t j = 0; j < m; ++j) {
    inst.d.push_back(cost(gen));
    inst.y_lo.push_back(off(gen));
    inst.y_hi.push_back(inst.y_lo.back() + 2);
  }
  for (std::size_t i = 0; i < p; ++i) {
    double s = 0.0;  // the middle of the box stays feasible
    for (std::size_t j = 0; j < m; ++j) s += static_cast<double>(F[i * m + j]) * (inst.y_lo[j] + 1);
    inst.h.push_back(s + 2.5);
  }
  return inst;
}

}  // namespace

TEST_CASE("oracle on the one-variable instance") {
  const auto r = brute_force_milp(one_var_instance());
  CHECK(r.z_star.y == std::vector<std::int64_t>{0});
  CHECK(r.cost == 0.0);
  CHECK(r.enumerated == 4);
  const auto up = brute_force_milp(one_var_instance(-1.0));
  CHECK(up.z_star.y == std::vector<std::int64_t>{3});
  CHECK(up.cost == -3.0);
}

TEST_CASE("oracle failures") {
  CHECK(kind_of([] { brute_force_milp(empty_interior_instance(), 1.0); }) == ErrorKind::TooLarge);
  CHECK(kind_of([] { brute_force_milp(continuous_instance({1.0}, 1, {1.0}, {1.0}, {0.0}, {1.0})); }) ==
        ErrorKind::MixedUnsupported);
  MilpInstance none = pinned_instance();
  none.h = {-1.0};
  CHECK(kind_of([&] { brute_force_milp(none); }) == ErrorKind::Infeasible);
}

TEST_CASE("oracle is no worse than any sampled feasible point") {
  std::mt19937_64 gen(4);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const MilpInstance m = small_integer(seed, 10);
    const auto r = brute_force_milp(m);
    REQUIRE(check_feasibility_milp(m, r.z_star).feasible);
    CHECK(r.enumerated == 59049);
    std::vector<double> y(10);
    for (int s = 0; s < 100000; ++s) {
      RoundedPoint pt;
      for (std::size_t j = 0; j < 10; ++j)
        pt.y.push_back(m.y_lo[j] + static_cast<std::int64_t>(gen() % 3));
      if (check_feasibility_milp(m, pt).feasible) REQUIRE(r.cost <= milp_cost(m, pt) + 1e-12);
    }
  }
}

TEST_CASE("Hoffman estimate for a single halfspace") {
  const MilpInstance m = continuous_instance({1.0}, 1, {1.0}, {0.0}, {-2.0}, {2.0});
  const auto est = hoffman_estimate(m, 2000, 1);
  CHECK(est.sigma >= 1.0 - 1e-3);
  CHECK(est.sigma <= 1.0 + 1e-9);
  CHECK(est.violating < est.samples);
  CHECK(est.violating > 0);
}

TEST_CASE("Hoffman estimate on wedges stays below the vertex bound") {
  for (double psi : {0.3, 0.8, 1.4, 2.2, 2.9}) {
    const double cs = std::cos(psi), sn = std::sin(psi);
    const MilpInstance m = continuous_instance({0.0, 0.0}, 2, {1.0, 0.0, cs, sn}, {0.0, 0.0}, {-3.0, -3.0}, {3.0, 3.0});
    const auto est = hoffman_estimate(m, 3000, 2);
    INFO("angle " << psi);
    CHECK(est.sigma >= 1.0 - 1e-3);
    CHECK(est.sigma <= 1.0 / std::sqrt(1.0 - std::abs(cs)) + 1e-9);
  }
}

TEST_CASE("Hoffman estimate never drops with more samples") {
  const MilpInstance m = random_granular(RandomSpec{}, 8);
  double prev = 0.0;
  for (long n : {10L, 100L, 1000L, 3000L}) {
    const double s = hoffman_estimate(m, n, 3).sigma;
    CHECK(s >= prev);
    prev = s;
  }
  MilpInstance empty = continuous_instance({1.0}, 1, {1.0}, {-10.0}, {-1.0}, {1.0});
  CHECK(kind_of([&] { hoffman_estimate(empty, 10); }) == ErrorKind::EmptyPolyhedron);
}

TEST_CASE("dual contraction factor is below one for admissible steps") {
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const double alpha = 1e-3 + 2.0 * u(gen), delta = 1e-3 + 2.0 * u(gen), nA = 5.0 * u(gen);
    const double beta = beta_limit(alpha, delta, nA) * (1e-6 + (1.0 - 2e-6) * u(gen));
    const double q = dual_contraction(beta, delta);
    REQUIRE(q >= 0.0);
    REQUIRE(q < 1.0);
  }
}

TEST_CASE("envelope edge cases") {
  EnvelopeInputs in{0.9, 0.5, 0.0, 2.0, 1.5, 0.1, 0.05, 1};
  const double K = envelope_constant(in);
  CHECK_THAT(K, WithinRel(4.0 * 4.0 * 0.9 * 0.25 * 2.25 + 8.0 * 4.0 * 0.0025 * 0.5 * 2.25, 1e-14));
  // starting at the optimum leaves only the constant series
  const auto d = dual_envelope(in, 3);
  CHECK_THAT(d[0], WithinRel(K * (1.0 + 0.9), 1e-14));
  CHECK_THAT(d[2], WithinRel(K * (1.0 + 0.9 + 0.81 + 0.729), 1e-14));

  in.q_p = 0.0;
  in.lambda0_dist = 3.0;
  const auto g = dual_envelope(in, 4);
  for (long n = 1; n <= 4; ++n) CHECK_THAT(g[n - 1], WithinRel(std::pow(0.9, n) * 9.0, 1e-14));

  in.lambda0_dist = 0.0;
  for (double v : primal_envelope(in, 5)) CHECK(v == 0.0);

  // hand substitution: n = 1 uses q_d^0
  EnvelopeInputs h{0.5, 0.5, 1.0, 1.0, 1.0, 1.0, 0.1, 2};
  const double Kh = envelope_constant(h);
  const auto p = primal_envelope(h, 2);
  CHECK_THAT(p[0], WithinRel(2.0 * 0.25 + std::sqrt(1.0 + Kh), 1e-14));
  CHECK_THAT(p[1], WithinRel(2.0 * 0.25 + std::sqrt(0.5 + Kh * 1.5), 1e-14));
}

TEST_CASE("measured primal rate") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::vector<double> r{0.2, nan, 0.64, 0.1};
  CHECK(measured_primal_rate(r) == 0.64);
  CHECK_THAT(measured_primal_rate(r, 2), WithinRel(0.8, 1e-14));
  CHECK(measured_primal_rate(std::vector<double>{nan}) == 0.0);
}

TEST_CASE("bound terms by hand") {
  RelaxOptions o;
  o.xi = 0.875;
  const RelaxedProblem P = build_relaxation(one_var_instance(), o);
  const auto b = total_suboptimality_bound(P, 1.0);
  CHECK_THAT(b.relaxation_term, WithinAbs(0.5 * 1.0 * (1.0 * 2.0 + 1.0), 1e-15));
  CHECK_THAT(b.rounding_term, WithinAbs(0.5, 1e-15));
  const double reg = 1.0 * P.lambda_radius * std::sqrt(0.1 / 0.2) + 0.05 * P.r;
  CHECK_THAT(b.regularization_term, WithinAbs(reg, 1e-15));
  CHECK_THAT(b.total, WithinAbs(1.5 + 0.5 + reg, 1e-14));

  // no integer costs: the rounding term vanishes
  const RelaxedProblem Q = build_relaxation(one_var_instance(0.0), o);
  CHECK(total_suboptimality_bound(Q, 1.0).rounding_term == 0.0);

  // joint small-regularization limit along delta = alpha^2
  RelaxedProblem S = P;
  double prev = regularization_gap_bound(P);
  for (double a : {1e-2, 1e-4, 1e-8, 1e-12}) {
    S.alpha = a;
    S.delta = a * a;
    CHECK(regularization_gap_bound(S) < prev);
    prev = regularization_gap_bound(S);
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("tightened LP optimum on the one-variable instance") {
  RelaxOptions o;
  o.xi = 0.875;
  o.phi = 0.25;
  const RelaxedProblem P = build_relaxation(one_var_instance(-1.0), o);
  const auto t = relaxed_lp_optimum(P);
  REQUIRE(t.status == LpStatus::Optimal);
  CHECK_THAT(t.z[0], WithinAbs((6.75 - 0.25) / 2.0, 1e-12));
  const auto u = relaxed_lp_optimum(P, false);
  CHECK_THAT(u.z[0], WithinAbs(3.375, 1e-12));
}

TEST_CASE("regularization gap is within its bound") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MilpInstance m = random_granular(RandomSpec{}, 700 + seed);
    const RelaxedProblem P = build_relaxation(m, tuned_options(m));
    const SaddleSolution sol = solve(P);
    const auto lp = relaxed_lp_optimum(P);
    REQUIRE(lp.status == LpStatus::Optimal);
    CHECK(std::abs(dot(P.c, sol.z_hat) - lp.objective) <= regularization_gap_bound(P));
  }
}

TEST_CASE("envelope violations are reported with their epoch") {
  RelaxOptions o;
  o.xi = 0.875;
  const RelaxedProblem P = build_relaxation(one_var_instance(), o);
  std::vector<TraceRecord> recs(3);
  for (long k = 0; k < 3; ++k) {
    recs[k].tick = k + 1;
    recs[k].epoch = k + 1;
  }
  recs[1].dist_primal = 1e6;
  recs[2].dist_dual = 1e6;
  const std::vector<double> ratios{0.5, 0.5, 0.5};
  const double beta = default_steps(P).beta;
  const BoundsReport rep = evaluate_bounds(P, recs, ratios, 0.0, beta, 1.0, true);
  REQUIRE(rep.violations.size() == 2);
  CHECK(rep.violations[0].epoch == 2);
  CHECK(rep.violations[0].which == "primal");
  CHECK(rep.violations[1].epoch == 3);
  CHECK(rep.violations[1].which == "dual");
  CHECK(rep.sigma_source == "user");
  CHECK(rep.q_d < 1.0);
  CHECK(rep.dual_envelope.size() == 3);
  for (double v : {rep.phi, rep.lambda_radius, rep.reg_gap_bound, rep.total_bound, rep.q_d}) CHECK(v >= 0.0);
}
