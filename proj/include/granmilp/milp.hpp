#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "granmilp/errors.hpp"
#include "granmilp/sparse.hpp"

namespace granmilp {

/// minimize a'x + d'y  s.t.  E x + F y <= h,  y_lo <= y <= y_hi (y integer),
/// x in the box [x_lo, x_hi].
struct MilpInstance {
  std::vector<double> a;
  std::vector<double> d;
  CsrMatrix<double> E;
  CsrMatrix<std::int64_t> F;
  std::vector<double> h;
  std::vector<std::int64_t> y_lo;
  std::vector<std::int64_t> y_hi;
  std::vector<double> x_lo;
  std::vector<double> x_hi;

  [[nodiscard]] std::size_t n() const { return a.size(); }
  [[nodiscard]] std::size_t m() const { return d.size(); }
  [[nodiscard]] std::size_t p() const { return h.size(); }

  /// Throws Error(Validation) naming the first inconsistency found.
  void validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::Validation, msg); };
    const std::size_t nn = n(), mm = m(), pp = p();
    if (E.rows != pp || E.cols != nn)
      fail("E has shape " + std::to_string(E.rows) + "x" + std::to_string(E.cols) + ", expected " +
           std::to_string(pp) + "x" + std::to_string(nn));
    if (F.rows != pp || F.cols != mm)
      fail("F has shape " + std::to_string(F.rows) + "x" + std::to_string(F.cols) + ", expected " +
           std::to_string(pp) + "x" + std::to_string(mm));
    if (y_lo.size() != mm || y_hi.size() != mm) fail("y_lo/y_hi must have length m");
    if (x_lo.size() != nn || x_hi.size() != nn) fail("x_lo/x_hi must have length n");
    for (std::size_t j = 0; j < mm; ++j)
      if (y_lo[j] > y_hi[j]) fail("y_lo > y_hi at index " + std::to_string(j));
    for (std::size_t j = 0; j < nn; ++j)
      if (!(x_lo[j] <= x_hi[j]) || !std::isfinite(x_lo[j]) || !std::isfinite(x_hi[j]))
        fail("x box empty or unbounded at index " + std::to_string(j));
    for (double v : h)
      if (!std::isfinite(v)) fail("h has a non-finite entry");
  }
};

struct GranularityData {
  std::vector<std::int64_t> omega;
  std::vector<double> b_floor;
  std::vector<std::int64_t> rho;
  double xi_e = 0.0;
};

/// Per-row gcd of |F| entries for rows without continuous variables, else 0.
inline std::vector<std::int64_t> compute_omega(const MilpInstance& milp) {
  std::vector<std::int64_t> omega(milp.p(), 0);
  for (std::size_t i = 0; i < milp.p(); ++i) {
    if (!milp.E.empty_row(i)) continue;
    std::int64_t g = 0;
    for (auto v : milp.F.row_vals(i)) g = std::gcd(g, v < 0 ? -v : v);
    omega[i] = g;
  }
  return omega;
}

/// Largest multiple of omega_i not exceeding h_i; h_i itself when omega_i == 0.
inline std::vector<double> floor_omega(std::span<const double> h, std::span<const std::int64_t> omega) {
  std::vector<double> out(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (omega[i] == 0) {
      out[i] = h[i];
    } else {
      const auto w = static_cast<double>(omega[i]);
      out[i] = w * std::floor(h[i] / w);
    }
  }
  return out;
}

inline double compute_xi_e(std::span<const double> h, std::span<const std::int64_t> omega,
                           std::span<const double> b_floor) {
  double xi = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i)
    if (omega[i] != 0) xi = std::max(xi, (h[i] - b_floor[i]) / static_cast<double>(omega[i]));
  return xi;
}

inline std::vector<std::int64_t> row_abs_sums(const CsrMatrix<std::int64_t>& F) {
  std::vector<std::int64_t> rho(F.rows, 0);
  for (std::size_t i = 0; i < F.rows; ++i)
    for (auto v : F.row_vals(i)) rho[i] += v < 0 ? -v : v;
  return rho;
}

inline GranularityData granularity(const MilpInstance& milp) {
  GranularityData g;
  g.omega = compute_omega(milp);
  g.b_floor = floor_omega(milp.h, g.omega);
  g.rho = row_abs_sums(milp.F);
  g.xi_e = compute_xi_e(milp.h, g.omega, g.b_floor);
  return g;
}

struct RoundedPoint {
  std::vector<double> x;
  std::vector<std::int64_t> y;
};

/// Nearest integer with ties toward -infinity.
inline std::int64_t round_half_down(double v) { return static_cast<std::int64_t>(std::ceil(v - 0.5)); }

/// Keeps the first n entries, rounds the trailing m entries.
inline RoundedPoint round_solution(std::span<const double> z, std::size_t n, std::size_t m) {
  if (z.size() != n + m) throw Error(ErrorKind::Validation, "round_solution: length is not n + m");
  RoundedPoint out;
  out.x.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
  out.y.resize(m);
  for (std::size_t j = 0; j < m; ++j) out.y[j] = round_half_down(z[n + j]);
  return out;
}

enum class ViolationKind { Constraint, IntegerLower, IntegerUpper, BoxLower, BoxUpper };

struct Violation {
  ViolationKind kind;
  std::size_t index;
  double amount;

  [[nodiscard]] std::string describe() const {
    const char* names[] = {"row", "y_lo", "y_hi", "x_lo", "x_hi"};
    return std::string(names[static_cast<int>(kind)]) + "[" + std::to_string(index) +
           "] violated by " + std::to_string(amount);
  }
};

struct FeasibilityReport {
  std::vector<double> row_margins;  // h_i - (E x + F y)_i
  std::vector<Violation> violations;
  bool feasible = true;

  [[nodiscard]] double min_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : row_margins) m = std::min(m, v);
    return m;
  }
};

inline double milp_cost(const MilpInstance& milp, const RoundedPoint& pt) {
  double s = dot(milp.a, pt.x);
  for (std::size_t j = 0; j < milp.m(); ++j) s += milp.d[j] * static_cast<double>(pt.y[j]);
  return s;
}

inline FeasibilityReport check_feasibility_milp(const MilpInstance& milp, const RoundedPoint& pt,
                                                double tol = 1e-9) {
  FeasibilityReport rep;
  rep.row_margins.resize(milp.p());
  std::vector<double> yd(pt.y.begin(), pt.y.end());
  for (std::size_t i = 0; i < milp.p(); ++i) {
    const double lhs = milp.E.row_dot(i, pt.x) + milp.F.row_dot(i, yd);
    rep.row_margins[i] = milp.h[i] - lhs;
    if (lhs > milp.h[i] + tol) rep.violations.push_back({ViolationKind::Constraint, i, lhs - milp.h[i]});
  }
  for (std::size_t j = 0; j < milp.m(); ++j) {
    if (pt.y[j] < milp.y_lo[j])
      rep.violations.push_back({ViolationKind::IntegerLower, j, static_cast<double>(milp.y_lo[j] - pt.y[j])});
    if (pt.y[j] > milp.y_hi[j])
      rep.violations.push_back({ViolationKind::IntegerUpper, j, static_cast<double>(pt.y[j] - milp.y_hi[j])});
  }
  for (std::size_t j = 0; j < milp.n(); ++j) {
    if (pt.x[j] < milp.x_lo[j] - tol) rep.violations.push_back({ViolationKind::BoxLower, j, milp.x_lo[j] - pt.x[j]});
    if (pt.x[j] > milp.x_hi[j] + tol) rep.violations.push_back({ViolationKind::BoxUpper, j, pt.x[j] - milp.x_hi[j]});
  }
  rep.feasible = rep.violations.empty();
  return rep;
}

}  // namespace granmilp
