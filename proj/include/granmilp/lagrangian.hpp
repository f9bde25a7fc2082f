#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "granmilp/errors.hpp"
#include "granmilp/geometry.hpp"
#include "granmilp/relaxed_problem.hpp"

namespace granmilp {

/// max over the box of the Euclidean norm, attained at a corner.
inline double radius_r(const Box& box) {
  double s = 0.0;
  for (std::size_t i = 0; i < box.size(); ++i)
    s += std::max(box.lo[i] * box.lo[i], box.hi[i] * box.hi[i]);
  return std::sqrt(s);
}

/// c'zbar + (alpha/2)|zbar|^2 + |c| r
inline double slater_numerator(const RelaxedProblem& P, std::span<const double> zbar) {
  const double nz = norm2(zbar);
  return dot(P.c, zbar) + 0.5 * P.alpha * nz * nz + norm2(P.c) * P.r;
}

/// min_j (b_j + nu_j - shift - A_j z); +inf without rows.
inline double row_margin(const RelaxedProblem& P, std::span<const double> z, double shift) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < P.rows(); ++j) best = std::min(best, P.b[j] + P.nu[j] - shift - P.A.row_dot(j, z));
  return best;
}

/// Worst-case constraint violation of the untightened regularized saddle point.
inline double phi_bound(const RelaxedProblem& P, std::span<const double> zbar) {
  if (P.rows() == 0) return 0.0;
  const double margin = row_margin(P, zbar, 0.0);
  if (!(margin > 0.0))
    throw Error(ErrorKind::NonpositiveMargin, "reference point violates a constraint (margin " +
                                                  std::to_string(margin) + ")");
  return P.max_row_norm * (slater_numerator(P, zbar) / margin) * std::sqrt(P.delta / (2.0 * P.alpha));
}

/// 1-norm cap on the optimal multipliers, using the tightened margins.
inline double lambda_radius(const RelaxedProblem& P, std::span<const double> zbar) {
  if (P.rows() == 0) return 0.0;
  const double margin = row_margin(P, zbar, P.phi);
  if (!(margin > 0.0))
    throw Error(ErrorKind::NonpositiveMargin, "reference point violates a tightened constraint (margin " +
                                                  std::to_string(margin) + ")");
  return std::max(0.0, slater_numerator(P, zbar) / margin);
}

/// c'z + (alpha/2)|z|^2 + lambda'(Az - b - nu + phi) - (delta/2)|lambda|^2
inline double eval_L(const RelaxedProblem& P, std::span<const double> z, std::span<const double> lambda) {
  const double nz = norm2(z), nl = norm2(lambda);
  double coupling = 0.0;
  for (std::size_t j = 0; j < P.rows(); ++j)
    coupling += lambda[j] * (P.A.row_dot(j, z) - P.b[j] - P.nu[j] + P.phi);
  return dot(P.c, z) + 0.5 * P.alpha * nz * nz + coupling - 0.5 * P.delta * nl * nl;
}

/// Partial gradient in z at one coordinate: c_i + alpha z_i + (A' lambda)_i.
inline double grad_z_coord(const RelaxedProblem& P, std::size_t i, double zi, std::span<const double> lambda) {
  return P.c[i] + P.alpha * zi + P.At.row_dot(i, lambda);
}

/// Partial gradient in lambda at one row: A_j z - b_j - nu_j + phi - delta lambda_j.
inline double grad_lambda_coord(const RelaxedProblem& P, std::size_t j, std::span<const double> z, double lj) {
  return P.A.row_dot(j, z) - P.b[j] - P.nu[j] + P.phi - P.delta * lj;
}

inline std::vector<double> grad_z(const RelaxedProblem& P, std::span<const double> z, std::span<const double> lambda) {
  std::vector<double> g(P.dim());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = grad_z_coord(P, i, z[i], lambda);
  return g;
}

inline std::vector<double> grad_lambda(const RelaxedProblem& P, std::span<const double> z,
                                       std::span<const double> lambda) {
  std::vector<double> g(P.rows());
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = grad_lambda_coord(P, j, z, lambda[j]);
  return g;
}

/// argmin over Z of L(., lambda); separable, so a clamp of the stationary point.
inline std::vector<double> best_response(const RelaxedProblem& P, std::span<const double> lambda) {
  std::vector<double> z(P.dim());
  for (std::size_t i = 0; i < z.size(); ++i)
    z[i] = clamp_to(-(P.c[i] + P.At.row_dot(i, lambda)) / P.alpha, P.z_box.lo[i], P.z_box.hi[i]);
  return z;
}

/// Largest violation max_j (A_j z - b_j - nu_j + shift)_+ .
inline double max_violation(const RelaxedProblem& P, std::span<const double> z, double shift = 0.0) {
  double worst = 0.0;
  for (std::size_t j = 0; j < P.rows(); ++j)
    worst = std::max(worst, P.A.row_dot(j, z) - P.b[j] - P.nu[j] + shift);
  return worst;
}

}  // namespace granmilp
