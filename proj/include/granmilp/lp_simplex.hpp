#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "granmilp/errors.hpp"
#include "granmilp/geometry.hpp"
#include "granmilp/sparse.hpp"

namespace granmilp {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> z;
  double objective = 0.0;
  long pivots = 0;
};

namespace detail {

/// Dense tableau; row 0..rows-1 constraints, last row the reduced costs.
/// Column `cols` holds the right-hand side.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0) {}
  double& at(std::size_t r, std::size_t c) { return t_[r * (cols_ + 1) + c]; }
  [[nodiscard]] double at(std::size_t r, std::size_t c) const { return t_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> t_;
};

/// Minimizes the objective row over columns [0, active_cols) with Bland's rule.
inline LpStatus run_simplex(Tableau& T, std::vector<std::size_t>& basis, std::size_t active_cols, long& pivots,
                            long max_pivots, double eps) {
  const std::size_t obj = T.rows();
  while (pivots < max_pivots) {
    std::size_t enter = active_cols;
    for (std::size_t c = 0; c < active_cols; ++c)
      if (T.at(obj, c) < -eps) {
        enter = c;
        break;
      }
    if (enter == active_cols) return LpStatus::Optimal;
    std::size_t leave = T.rows();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < T.rows(); ++r) {
      const double a = T.at(r, enter);
      if (a > eps) {
        const double ratio = T.rhs(r) / a;
        if (ratio < best - 1e-12 || (std::abs(ratio - best) <= 1e-12 && basis[r] < basis[leave])) {
          best = ratio;
          leave = r;
        }
      }
    }
    if (leave == T.rows()) return LpStatus::Unbounded;
    T.pivot(leave, enter);
    basis[leave] = enter;
    ++pivots;
  }
  return LpStatus::IterationLimit;
}

}  // namespace detail

/// min c'z  s.t.  A z <= rhs,  box.lo <= z <= box.hi, by the two-phase
/// tableau simplex on the shifted variables w = z - lo.
inline LpResult solve_lp(std::span<const double> c, const CsrMatrix<double>& A, std::span<const double> rhs,
                         const Box& box, long max_pivots = 200000) {
  const std::size_t d = c.size(), p = A.rows;
  if (A.cols != d || rhs.size() != p || box.size() != d) throw Error(ErrorKind::Validation, "solve_lp: dimension mismatch");
  const std::size_t rows = p + d;
  // Columns: w (d), slacks (rows), artificials (rows).
  const std::size_t ncols = d + 2 * rows;
  detail::Tableau T(rows, ncols);
  std::vector<std::size_t> basis(rows);
  const double eps = 1e-10;

  const auto Alo = A.multiply(box.lo);
  for (std::size_t r = 0; r < rows; ++r) {
    double g;
    if (r < p) {
      const auto cols = A.row_cols(r);
      const auto vals = A.row_vals(r);
      for (std::size_t k = 0; k < cols.size(); ++k) T.at(r, cols[k]) = vals[k];
      g = rhs[r] - Alo[r];
    } else {
      T.at(r, r - p) = 1.0;
      g = box.hi[r - p] - box.lo[r - p];
    }
    T.at(r, d + r) = 1.0;
    if (g < 0.0) {
      for (std::size_t col = 0; col < d + rows; ++col) T.at(r, col) = -T.at(r, col);
      g = -g;
      T.at(r, d + rows + r) = 1.0;
      basis[r] = d + rows + r;
    } else {
      basis[r] = d + r;
    }
    T.rhs(r) = g;
  }

  // Phase one: minimize the sum of artificials still in the basis.
  const std::size_t obj = rows;
  bool need_phase_one = false;
  for (std::size_t r = 0; r < rows; ++r)
    if (basis[r] >= d + rows) {
      need_phase_one = true;
      for (std::size_t col = 0; col <= ncols; ++col)
        if (col < d + rows || col == ncols) T.at(obj, col) -= T.at(r, col);
    }
  LpResult res;
  if (need_phase_one) {
    const auto st = detail::run_simplex(T, basis, d + rows, res.pivots, max_pivots, eps);
    if (st == LpStatus::IterationLimit) {
      res.status = st;
      return res;
    }
    if (-T.rhs(obj) > 1e-8) {
      res.status = LpStatus::Infeasible;
      return res;
    }
    // Drive remaining artificials (at zero) out of the basis where possible.
    for (std::size_t r = 0; r < rows; ++r) {
      if (basis[r] < d + rows) continue;
      for (std::size_t col = 0; col < d + rows; ++col)
        if (std::abs(T.at(r, col)) > 1e-9) {
          T.pivot(r, col);
          basis[r] = col;
          break;
        }
    }
  }

  for (std::size_t col = 0; col <= ncols; ++col) T.at(obj, col) = 0.0;
  for (std::size_t j = 0; j < d; ++j) T.at(obj, j) = c[j];
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t b = basis[r];
    if (b < d && c[b] != 0.0) {
      const double f = c[b];
      for (std::size_t col = 0; col <= ncols; ++col) T.at(obj, col) -= f * T.at(r, col);
    }
  }
  const auto st = detail::run_simplex(T, basis, d + rows, res.pivots, max_pivots, eps);
  res.status = st;
  if (st != LpStatus::Optimal) return res;
  res.z = box.lo;
  for (std::size_t r = 0; r < rows; ++r)
    if (basis[r] < d) res.z[basis[r]] += T.rhs(r);
  project_box_inplace(res.z, box);
  res.objective = dot(c, res.z);
  return res;
}

}  // namespace granmilp
