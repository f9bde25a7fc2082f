#pragma once

// Instance factories shared by the unit tests and the acceptance suite.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "granmilp/milp.hpp"
#include "granmilp/relaxation.hpp"
#include "granmilp/sparse.hpp"

namespace granmilp::testing {

inline CsrMatrix<double> dense_real(std::size_t r, std::size_t c, std::vector<double> v) {
  return CsrMatrix<double>::from_dense(r, c, v);
}

inline CsrMatrix<std::int64_t> dense_int(std::size_t r, std::size_t c, std::vector<std::int64_t> v) {
  return CsrMatrix<std::int64_t>::from_dense(r, c, v);
}

/// min y  s.t. 2y <= 7.5, y in {0..3}
inline MilpInstance one_var_instance(double cost = 1.0) {
  MilpInstance m;
  m.d = {cost};
  m.E = CsrMatrix<double>(1, 0);
  m.F = dense_int(1, 1, {2});
  m.h = {7.5};
  m.y_lo = {0};
  m.y_hi = {3};
  return m;
}

/// y1 + y2 <= 1 and -y1 - y2 <= -1 with binary y: no interior for any enlargement.
inline MilpInstance empty_interior_instance() {
  MilpInstance m;
  m.d = {1.0, 1.0};
  m.E = CsrMatrix<double>(2, 0);
  m.F = dense_int(2, 2, {1, 1, -1, -1});
  m.h = {1.0, -1.0};
  m.y_lo = {0, 0};
  m.y_hi = {1, 1};
  return m;
}

/// y <= 0 with y in {0, 1}.
inline MilpInstance pinned_instance() {
  MilpInstance m;
  m.d = {-1.0};
  m.E = CsrMatrix<double>(1, 0);
  m.F = dense_int(1, 1, {1});
  m.h = {0.0};
  m.y_lo = {0};
  m.y_hi = {1};
  return m;
}

/// Purely continuous instance: the relaxation is then exactly
/// min c'z s.t. A z <= h over the box, with no enlargement terms.
inline MilpInstance continuous_instance(std::vector<double> c, std::size_t rows, std::vector<double> A,
                                        std::vector<double> h, std::vector<double> lo, std::vector<double> hi) {
  MilpInstance m;
  const std::size_t n = c.size();
  m.a = std::move(c);
  m.E = dense_real(rows, n, std::move(A));
  m.F = CsrMatrix<std::int64_t>(rows, 0);
  m.h = std::move(h);
  m.x_lo = std::move(lo);
  m.x_hi = std::move(hi);
  return m;
}

struct RandomSpec {
  std::size_t n = 4;       // continuous variables
  std::size_t m = 6;       // integer variables
  std::size_t p = 5;       // coupling rows
  double density = 0.5;
  double min_slack = 0.3;  // slack of each row at the generating point, beyond rounding needs
  double max_slack = 1.0;
};

/// Random MILP built around an interior point of the enlarged inner parallel
/// set at xi = 0.9: every row is satisfied there with slack in
/// [min_slack, max_slack] after the floor and enlargement terms, so the
/// instance is granular by construction.
inline MilpInstance random_granular(const RandomSpec& spec, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_int_distribution<int> width(1, 3);
  std::uniform_int_distribution<int> offset(-2, 1);

  MilpInstance m;
  m.a.resize(spec.n);
  m.d.resize(spec.m);
  for (auto& v : m.a) v = normal(gen);
  for (auto& v : m.d) v = normal(gen);
  for (std::size_t i = 0; i < spec.n; ++i) {
    m.x_lo.push_back(-1.0 - 2.0 * unit(gen));
    m.x_hi.push_back(1.0 + 2.0 * unit(gen));
  }
  for (std::size_t j = 0; j < spec.m; ++j) {
    const int lo = offset(gen);
    m.y_lo.push_back(lo);
    m.y_hi.push_back(lo + width(gen));
  }

  // About half the rows are purely integer so that the gcd rule applies.
  std::vector<double> E(spec.p * spec.n, 0.0);
  std::vector<std::int64_t> F(spec.p * spec.m, 0);
  for (std::size_t r = 0; r < spec.p; ++r) {
    const bool pure = spec.n == 0 || unit(gen) < 0.5;
    bool any = false;
    while (!any) {
      for (std::size_t j = 0; j < spec.m; ++j)
        if (unit(gen) < spec.density) {
          F[r * spec.m + j] = coef(gen);
          any = any || F[r * spec.m + j] != 0;
        }
      if (!pure)
        for (std::size_t i = 0; i < spec.n; ++i)
          if (unit(gen) < spec.density) {
            E[r * spec.n + i] = std::round(4.0 * (2.0 * unit(gen) - 1.0) * 2.0) / 4.0;
            any = any || E[r * spec.n + i] != 0.0;
          }
    }
  }
  m.E = CsrMatrix<double>::from_dense(spec.p, spec.n, E);
  m.F = CsrMatrix<std::int64_t>::from_dense(spec.p, spec.m, F);

  const double xi = 0.9;
  std::vector<double> z0;
  for (std::size_t i = 0; i < spec.n; ++i) z0.push_back(0.5 * (m.x_lo[i] + m.x_hi[i]));
  for (std::size_t j = 0; j < spec.m; ++j) z0.push_back(0.5 * (m.y_lo[j] + m.y_hi[j]));
  const CsrMatrix<double> A = hstack(m.E, m.F.cast<double>());
  m.h.resize(spec.p);
  for (std::size_t r = 0; r < spec.p; ++r) {
    const double rho = m.F.row_norm1(r);
    const double slack = spec.min_slack + (spec.max_slack - spec.min_slack) * unit(gen);
    // Adding omega covers the floor; the enlargement xi*omega only helps.
    double omega = 0.0;
    if (m.E.empty_row(r)) {
      std::int64_t g = 0;
      for (auto v : m.F.row_vals(r)) g = std::gcd(g, v < 0 ? -v : v);
      omega = static_cast<double>(g);
    }
    m.h[r] = A.row_dot(r, z0) + 0.5 * rho + slack + omega * (1.0 - xi);
  }
  return m;
}

/// xi used for generated instances: at least the generator's 0.9.
inline double test_xi(const MilpInstance& m) { return std::max(0.9, default_xi(granularity(m).xi_e)); }

/// Options whose dual regularization makes the tightening constant equal to
/// `phi_fraction` of the best Slater margin, so the tightened set keeps an interior.
inline RelaxOptions tuned_options(const MilpInstance& m, double alpha = 0.1, double phi_fraction = 0.3) {
  RelaxOptions o;
  o.xi = test_xi(m);
  o.alpha = alpha;
  o.phi = 0.0;
  const RelaxedProblem probe = build_relaxation(m, o);
  const double ratio = phi_fraction * probe.untightened_margin * probe.untightened_margin /
                       (probe.max_row_norm * slater_numerator(probe, probe.slater_point));
  o.delta = 2.0 * alpha * ratio * ratio;
  o.phi.reset();
  return o;
}

}  // namespace granmilp::testing
