#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace granmilp {

/// Compressed sparse row matrix. Explicit zeros are dropped on construction,
/// so the stored pattern is the structural nonzero pattern.
template <class T>
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col_idx;
  std::vector<T> values;

  CsrMatrix() = default;
  CsrMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), row_ptr(r + 1, 0) {}

  /// Builds from coordinate triplets; duplicates are summed.
  static CsrMatrix from_triplets(std::size_t r, std::size_t c,
                                 std::span<const std::size_t> ri,
                                 std::span<const std::size_t> ci,
                                 std::span<const T> v) {
    if (ri.size() != ci.size() || ri.size() != v.size())
      throw std::invalid_argument("triplet arrays differ in length");
    std::vector<std::tuple<std::size_t, std::size_t, T>> t;
    t.reserve(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (ri[k] >= r || ci[k] >= c)
        throw std::out_of_range("triplet index (" + std::to_string(ri[k]) + "," +
                                std::to_string(ci[k]) + ") outside shape");
      t.emplace_back(ri[k], ci[k], v[k]);
    }
    std::stable_sort(t.begin(), t.end(), [](const auto& x, const auto& y) {
      return std::tie(std::get<0>(x), std::get<1>(x)) < std::tie(std::get<0>(y), std::get<1>(y));
    });
    CsrMatrix m(r, c);
    std::size_t k = 0;
    while (k < t.size()) {
      auto [i, j, acc] = t[k];
      ++k;
      while (k < t.size() && std::get<0>(t[k]) == i && std::get<1>(t[k]) == j) {
        acc += std::get<2>(t[k]);
        ++k;
      }
      if (acc != T{}) {
        m.col_idx.push_back(j);
        m.values.push_back(acc);
        ++m.row_ptr[i + 1];
      }
    }
    for (std::size_t i = 0; i < r; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
    return m;
  }

  static CsrMatrix from_dense(std::size_t r, std::size_t c, std::span<const T> dense) {
    std::vector<std::size_t> ri, ci;
    std::vector<T> v;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        if (dense[i * c + j] != T{}) {
          ri.push_back(i);
          ci.push_back(j);
          v.push_back(dense[i * c + j]);
        }
    return from_triplets(r, c, ri, ci, v);
  }

  [[nodiscard]] std::size_t nnz() const { return values.size(); }

  [[nodiscard]] std::span<const std::size_t> row_cols(std::size_t i) const {
    return {col_idx.data() + row_ptr[i], row_ptr[i + 1] - row_ptr[i]};
  }
  [[nodiscard]] std::span<const T> row_vals(std::size_t i) const {
    return {values.data() + row_ptr[i], row_ptr[i + 1] - row_ptr[i]};
  }

  [[nodiscard]] double row_dot(std::size_t i, std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      s += static_cast<double>(values[k]) * x[col_idx[k]];
    return s;
  }

  /// out = M x
  void multiply(std::span<const double> x, std::span<double> out) const {
    for (std::size_t i = 0; i < rows; ++i) out[i] = row_dot(i, x);
  }
  [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const {
    std::vector<double> out(rows);
    multiply(x, out);
    return out;
  }

  [[nodiscard]] CsrMatrix transpose() const {
    CsrMatrix t(cols, rows);
    for (std::size_t k = 0; k < nnz(); ++k) ++t.row_ptr[col_idx[k] + 1];
    for (std::size_t j = 0; j < cols; ++j) t.row_ptr[j + 1] += t.row_ptr[j];
    t.col_idx.resize(nnz());
    t.values.resize(nnz());
    std::vector<std::size_t> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
        const std::size_t dst = next[col_idx[k]]++;
        t.col_idx[dst] = i;
        t.values[dst] = values[k];
      }
    return t;
  }

  template <class U>
  [[nodiscard]] CsrMatrix<U> cast() const {
    CsrMatrix<U> m(rows, cols);
    m.row_ptr = row_ptr;
    m.col_idx = col_idx;
    m.values.assign(values.begin(), values.end());
    return m;
  }

  [[nodiscard]] double row_norm2(std::size_t i) const {
    double s = 0.0;
    for (auto v : row_vals(i)) s += static_cast<double>(v) * static_cast<double>(v);
    return std::sqrt(s);
  }

  [[nodiscard]] double row_norm1(std::size_t i) const {
    double s = 0.0;
    for (auto v : row_vals(i)) s += std::abs(static_cast<double>(v));
    return s;
  }

  /// Induced infinity norm: largest absolute row sum.
  [[nodiscard]] double inf_norm() const {
    double best = 0.0;
    for (std::size_t i = 0; i < rows; ++i) best = std::max(best, row_norm1(i));
    return best;
  }

  [[nodiscard]] bool empty_row(std::size_t i) const { return row_ptr[i] == row_ptr[i + 1]; }
};

/// [left | right] with matching row counts.
inline CsrMatrix<double> hstack(const CsrMatrix<double>& left, const CsrMatrix<double>& right) {
  if (left.rows != right.rows) throw std::invalid_argument("hstack: row count mismatch");
  CsrMatrix<double> m(left.rows, left.cols + right.cols);
  for (std::size_t i = 0; i < left.rows; ++i) {
    for (std::size_t k = left.row_ptr[i]; k < left.row_ptr[i + 1]; ++k) {
      m.col_idx.push_back(left.col_idx[k]);
      m.values.push_back(left.values[k]);
    }
    for (std::size_t k = right.row_ptr[i]; k < right.row_ptr[i + 1]; ++k) {
      m.col_idx.push_back(left.cols + right.col_idx[k]);
      m.values.push_back(right.values[k]);
    }
    m.row_ptr[i + 1] = m.col_idx.size();
  }
  return m;
}

/// Largest singular value by power iteration on M^T M. Deterministic start
/// vector; stops on relative change below `tol`.
inline double spectral_norm(const CsrMatrix<double>& m, int max_iter = 2000, double tol = 1e-13) {
  if (m.nnz() == 0) return 0.0;
  const CsrMatrix<double> mt = m.transpose();
  std::vector<double> v(m.cols), w(m.rows), u(m.cols);
  for (std::size_t j = 0; j < m.cols; ++j) v[j] = 1.0 + 1e-3 * static_cast<double>(j % 7);
  double est = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    double nv = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (nv == 0.0) return 0.0;
    for (auto& x : v) x /= nv;
    m.multiply(v, w);
    mt.multiply(w, u);
    const double next = std::sqrt(std::sqrt(std::inner_product(u.begin(), u.end(), u.begin(), 0.0)));
    v.swap(u);
    if (it > 3 && std::abs(next - est) <= tol * next) {
      est = next;
      break;
    }
    est = next;
  }
  return est;
}

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double norm1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double distance2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace granmilp
