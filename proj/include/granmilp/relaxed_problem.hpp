#pragma once

#include <cstddef>
#include <vector>

#include "granmilp/geometry.hpp"
#include "granmilp/milp.hpp"
#include "granmilp/sparse.hpp"

namespace granmilp {

/// The enlarged-inner-parallel-set LP with regularization and tightening
/// constants. Variables are z = (x, y); rows read A z <= b + nu - phi.
struct RelaxedProblem {
  MilpInstance milp;
  GranularityData gran;

  std::vector<double> c;
  CsrMatrix<double> A;
  CsrMatrix<double> At;
  std::vector<double> b;
  std::vector<double> nu;
  double xi = 0.0;
  Box z_box;

  std::vector<double> slater_point;
  double untightened_margin = 0.0;  // min_j (b_j + nu_j - A_j zbar)
  double alpha = 0.0;
  double delta = 0.0;
  double phi = 0.0;
  bool phi_fixed = false;           // phi came from the caller, not the tightening lemma
  double phi_inflation = 0.0;
  double lambda_radius = 0.0;
  double r = 0.0;
  double norm_A = 0.0;              // spectral norm
  double max_row_norm = 0.0;

  [[nodiscard]] std::size_t n() const { return milp.n(); }
  [[nodiscard]] std::size_t m() const { return milp.m(); }
  [[nodiscard]] std::size_t dim() const { return c.size(); }
  [[nodiscard]] std::size_t rows() const { return b.size(); }

  /// Right-hand side b + nu - phi of the tightened rows.
  [[nodiscard]] std::vector<double> tightened_rhs() const {
    std::vector<double> out(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) out[j] = b[j] + nu[j] - phi;
    return out;
  }

  /// Recomputes the derived matrix data after A changes.
  void refresh_matrix_data() {
    At = A.transpose();
    norm_A = spectral_norm(A);
    max_row_norm = 0.0;
    for (std::size_t j = 0; j < A.rows; ++j) max_row_norm = std::max(max_row_norm, A.row_norm2(j));
  }
};

}  // namespace granmilp
