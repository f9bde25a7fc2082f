#include <catch_amalgamated.hpp>

#include <random>

#include "granmilp/lp_simplex.hpp"
#include "support/instances.hpp"

using namespace granmilp;
using namespace granmilp::testing;
using Catch::Matchers::WithinAbs;

TEST_CASE("small linear programs by hand") {
  // max x + y s.t. x + 2y <= 4, 3x + y <= 6 on [0, 10]^2: vertex (1.6, 1.2)
  const auto A = dense_real(2, 2, {1, 2, 3, 1});
  const std::vector<double> c{-1.0, -1.0}, rhs{4.0, 6.0};
  const auto r = solve_lp(c, A, rhs, Box({0.0, 0.0}, {10.0, 10.0}));
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK_THAT(r.z[0], WithinAbs(1.6, 1e-12));
  CHECK_THAT(r.z[1], WithinAbs(1.2, 1e-12));
  CHECK_THAT(r.objective, WithinAbs(-2.8, 1e-12));

  // only the box binds, with negative lower bounds
  const auto b = solve_lp(std::vector<double>{1.0, -2.0}, A, std::vector<double>{100.0, 100.0},
                          Box({-3.0, -1.0}, {1.0, 2.0}));
  REQUIRE(b.status == LpStatus::Optimal);
  CHECK_THAT(b.z[0], WithinAbs(-3.0, 1e-12));
  CHECK_THAT(b.z[1], WithinAbs(2.0, 1e-12));

  // rows with a negative shifted right-hand side need phase one
  const auto C = dense_real(1, 1, {-1.0});
  const auto p1 = solve_lp(std::vector<double>{1.0}, C, std::vector<double>{-2.0}, Box({0.0}, {5.0}));
  REQUIRE(p1.status == LpStatus::Optimal);
  CHECK_THAT(p1.z[0], WithinAbs(2.0, 1e-12));
}

TEST_CASE("infeasible systems are detected") {
  const auto A = dense_real(2, 1, {1.0, -1.0});
  CHECK(solve_lp(std::vector<double>{1.0}, A, std::vector<double>{-1.0, -1.0}, Box({-5.0}, {5.0})).status ==
        LpStatus::Infeasible);
  const auto B = dense_real(1, 1, {1.0});
  CHECK(solve_lp(std::vector<double>{1.0}, B, std::vector<double>{-3.0}, Box({0.0}, {1.0})).status ==
        LpStatus::Infeasible);
  CHECK_THROWS_AS(solve_lp(std::vector<double>{1.0, 2.0}, B, std::vector<double>{1.0}, Box({0.0}, {1.0})), Error);
}

TEST_CASE("optimum beats every sampled feasible point") {
  std::mt19937_64 gen(123);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int solved = 0;
  for (int t = 0; t < 40; ++t) {
    const std::size_t d = 6, p = 5;
    std::vector<double> a(p * d), c(d), rhs(p);
    for (auto& v : a) v = u(gen);
    for (auto& v : c) v = u(gen);
    for (auto& v : rhs) v = 0.5 + 0.5 * u(gen);
    const auto A = dense_real(p, d, a);
    const Box box(std::vector<double>(d, -1.0), std::vector<double>(d, 1.0));
    const auto r = solve_lp(c, A, rhs, box);
    REQUIRE(r.status == LpStatus::Optimal);  // z = 0 is feasible
    ++solved;
    REQUIRE(box.contains(r.z, 1e-12));
    for (std::size_t j = 0; j < p; ++j) REQUIRE(A.row_dot(j, r.z) <= rhs[j] + 1e-9);
    std::vector<double> z(d);
    for (int s = 0; s < 20000; ++s) {
      for (auto& v : z) v = u(gen);
      bool ok = true;
      for (std::size_t j = 0; j < p && ok; ++j) ok = A.row_dot(j, z) <= rhs[j];
      if (ok) REQUIRE(r.objective <= dot(c, z) + 1e-9);
    }
  }
  CHECK(solved == 40);
}

TEST_CASE("two-dimensional optimum matches vertex enumeration") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const std::size_t p = 4;
    std::vector<double> a(2 * p), rhs(p);
    for (auto& v : a) v = u(gen);
    for (auto& v : rhs) v = 0.2 + u(gen) * 0.1 + 0.3;
    const std::vector<double> c{u(gen), u(gen)};
    // box edges as extra rows for the enumeration
    std::vector<std::array<double, 3>> rows;
    for (std::size_t j = 0; j < p; ++j) rows.push_back({a[2 * j], a[2 * j + 1], rhs[j]});
    rows.push_back({1, 0, 1});
    rows.push_back({-1, 0, 1});
    rows.push_back({0, 1, 1});
    rows.push_back({0, -1, 1});
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t k = i + 1; k < rows.size(); ++k) {
        const double det = rows[i][0] * rows[k][1] - rows[i][1] * rows[k][0];
        if (std::abs(det) < 1e-12) continue;
        const double x = (rows[i][2] * rows[k][1] - rows[i][1] * rows[k][2]) / det;
        const double y = (rows[i][0] * rows[k][2] - rows[i][2] * rows[k][0]) / det;
        bool ok = true;
        for (const auto& r : rows) ok = ok && r[0] * x + r[1] * y <= r[2] + 1e-12;
        if (ok) best = std::min(best, c[0] * x + c[1] * y);
      }
    const auto r = solve_lp(c, dense_real(p, 2, a), rhs, Box({-1.0, -1.0}, {1.0, 1.0}));
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK_THAT(r.objective, WithinAbs(best, 1e-9));
  }
}
