#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "granmilp/errors.hpp"
#include "granmilp/geometry.hpp"
#include "granmilp/lagrangian.hpp"
#include "granmilp/milp.hpp"
#include "granmilp/relaxed_problem.hpp"

namespace granmilp {

struct SlaterOptions {
  double margin = 1e-6;
  int max_iters = 10000;
};

struct SlaterResult {
  std::vector<double> point;
  double margin = 0.0;  // min_j (rhs_j - A_j z)
};

/// Searches for z in the box with A z < rhs strictly, by projected subgradient
/// descent on z -> max_j (A_j z - rhs_j). Coordinates from `first_strict` on
/// must also lie strictly inside the box (by `opts.margin`). The whole budget
/// is spent so that the returned point has as large a margin as the method
/// reaches; the best iterate seen is returned.
inline SlaterResult find_slater_point(const CsrMatrix<double>& A, std::span<const double> rhs, const Box& box,
                                      std::size_t first_strict = 0, SlaterOptions opts = {}) {
  if (A.cols != box.size() || A.rows != rhs.size())
    throw Error(ErrorKind::Validation, "find_slater_point: dimension mismatch");
  std::vector<double> lo = box.lo, hi = box.hi;
  for (std::size_t i = first_strict; i < lo.size(); ++i) {
    if (hi[i] - lo[i] <= 2.0 * opts.margin)
      throw SlaterInfeasible(box.center(), -std::numeric_limits<double>::infinity(),
                             "box has no interior in coordinate " + std::to_string(i));
    lo[i] += opts.margin;
    hi[i] -= opts.margin;
  }
  const Box search(lo, hi);
  std::vector<double> z = search.center();
  if (A.rows == 0) return {z, std::numeric_limits<double>::infinity()};

  std::vector<double> row_norm(A.rows);
  for (std::size_t j = 0; j < A.rows; ++j) row_norm[j] = A.row_norm2(j);
  double width = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) width = std::max(width, hi[i] - lo[i]);
  const double s0 = width > 0.0 ? 0.5 * width : 1.0;

  auto evaluate = [&](std::span<const double> v, std::size_t& argmax) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < A.rows; ++j) {
      const double g = A.row_dot(j, v) - rhs[j];
      if (g > worst) {
        worst = g;
        argmax = j;
      }
    }
    return worst;
  };

  std::size_t jmax = 0;
  double f = evaluate(z, jmax);
  SlaterResult best{z, -f};
  for (int k = 1; k <= opts.max_iters; ++k) {
    if (row_norm[jmax] == 0.0) break;  // the binding row is constant in z
    const double step = s0 / std::sqrt(static_cast<double>(k)) / row_norm[jmax];
    const auto cols = A.row_cols(jmax);
    const auto vals = A.row_vals(jmax);
    for (std::size_t t = 0; t < cols.size(); ++t)
      z[cols[t]] = clamp_to(z[cols[t]] - step * vals[t], search.lo[cols[t]], search.hi[cols[t]]);
    f = evaluate(z, jmax);
    if (-f > best.margin) best = {z, -f};
  }
  // Many nearly independent binding rows starve the subgradient method. Fall
  // back to cyclic projections onto the shifted halfspaces and the box, which
  // reach the intersection whenever it is nonempty.
  for (double tau = 0.25; best.margin < opts.margin && tau >= 0.25 * opts.margin; tau *= 0.25) {
    z = best.point;
    for (int sweep = 0; sweep < 200; ++sweep) {
      bool moved = false;
      for (std::size_t j = 0; j < A.rows; ++j) {
        if (row_norm[j] == 0.0) continue;
        const double excess = A.row_dot(j, z) - rhs[j] + tau * row_norm[j];
        if (excess <= 0.0) continue;
        moved = true;
        const double t = excess / (row_norm[j] * row_norm[j]);
        const auto cols = A.row_cols(j);
        const auto vals = A.row_vals(j);
        for (std::size_t c = 0; c < cols.size(); ++c)
          z[cols[c]] = clamp_to(z[cols[c]] - t * vals[c], search.lo[cols[c]], search.hi[cols[c]]);
      }
      f = evaluate(z, jmax);
      if (-f > best.margin) best = {z, -f};
      if (!moved || best.margin >= opts.margin) break;
    }
  }
  if (!(best.margin >= opts.margin))
    throw SlaterInfeasible(best.point, best.margin,
                           "no strictly feasible point found; best margin " + std::to_string(best.margin));
  return best;
}

/// Convenience form taking b, nu and phi separately: rows A z < b + nu - phi.
inline SlaterResult find_slater_point(const CsrMatrix<double>& A, std::span<const double> b,
                                      std::span<const double> nu, double phi, const Box& box,
                                      std::size_t first_strict = 0, SlaterOptions opts = {}) {
  std::vector<double> rhs(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) rhs[j] = b[j] + nu[j] - phi;
  return find_slater_point(A, rhs, box, first_strict, opts);
}

inline double default_xi(double xi_e) { return std::max(xi_e + 0.1 * (1.0 - xi_e), xi_e); }

/// Constraint description of the enlarged inner parallel set at a given xi.
struct InnerSet {
  CsrMatrix<double> A;
  std::vector<double> rhs;  // b + nu
  Box box;
  bool box_empty = false;

  [[nodiscard]] bool contains(std::span<const double> z, double tol = 0.0) const {
    if (box_empty || !box.contains(z, tol)) return false;
    for (std::size_t j = 0; j < A.rows; ++j)
      if (A.row_dot(j, z) > rhs[j] + tol) return false;
    return true;
  }
};

inline InnerSet inner_set(const MilpInstance& milp, const GranularityData& gran, double xi) {
  InnerSet s;
  s.A = hstack(milp.E, milp.F.cast<double>());
  s.rhs.resize(milp.p());
  for (std::size_t j = 0; j < milp.p(); ++j)
    s.rhs[j] = gran.b_floor[j] + xi * static_cast<double>(gran.omega[j]) - 0.5 * static_cast<double>(gran.rho[j]);
  std::vector<double> lo = milp.x_lo, hi = milp.x_hi;
  for (std::size_t j = 0; j < milp.m(); ++j) {
    double l = static_cast<double>(milp.y_lo[j]) + 0.5 - xi;
    double h = static_cast<double>(milp.y_hi[j]) + xi - 0.5;
    if (l > h) {
      s.box_empty = true;
      l = h = 0.5 * (l + h);
    }
    lo.push_back(l);
    hi.push_back(h);
  }
  s.box = Box(std::move(lo), std::move(hi));
  return s;
}

struct RelaxOptions {
  std::optional<double> xi;   // default_xi(xi_e) when unset
  double alpha = 0.1;
  double delta = 0.1;
  std::optional<double> phi;  // replaces the tightening lemma's value when set
  double phi_inflation = 0.0;
  SlaterOptions slater;
};

inline RelaxedProblem build_relaxation(const MilpInstance& milp, const RelaxOptions& opts = {}) {
  milp.validate();
  RelaxedProblem P;
  P.milp = milp;
  P.gran = granularity(milp);
  P.xi = opts.xi.value_or(default_xi(P.gran.xi_e));
  if (!(P.xi >= P.gran.xi_e && P.xi < 1.0))
    throw Error(ErrorKind::XiOutOfRange, "xi = " + std::to_string(P.xi) + " outside [" +
                                             std::to_string(P.gran.xi_e) + ", 1)");
  if (!(opts.alpha > 0.0) || !(opts.delta > 0.0) || !std::isfinite(opts.alpha) || !std::isfinite(opts.delta))
    throw Error(ErrorKind::Validation, "alpha and delta must be positive and finite");
  if (opts.phi && !(*opts.phi >= 0.0)) throw Error(ErrorKind::Validation, "phi must be nonnegative");
  if (!(opts.phi_inflation >= 0.0)) throw Error(ErrorKind::Validation, "phi_inflation must be nonnegative");
  P.alpha = opts.alpha;
  P.delta = opts.delta;

  InnerSet inner = inner_set(milp, P.gran, P.xi);
  if (inner.box_empty)
    throw SlaterInfeasible(inner.box.center(), -std::numeric_limits<double>::infinity(),
                           "integer box is empty after enlargement at xi = " + std::to_string(P.xi));
  P.c = milp.a;
  P.c.insert(P.c.end(), milp.d.begin(), milp.d.end());
  P.A = std::move(inner.A);
  P.b = P.gran.b_floor;
  P.nu.resize(milp.p());
  for (std::size_t j = 0; j < milp.p(); ++j)
    P.nu[j] = P.xi * static_cast<double>(P.gran.omega[j]) - 0.5 * static_cast<double>(P.gran.rho[j]);
  P.z_box = std::move(inner.box);
  P.r = radius_r(P.z_box);
  P.refresh_matrix_data();

  const SlaterResult s = find_slater_point(P.A, P.b, P.nu, 0.0, P.z_box, milp.n(), opts.slater);
  P.slater_point = s.point;
  P.untightened_margin = s.margin;

  P.phi_fixed = opts.phi.has_value();
  P.phi = (opts.phi ? *opts.phi : phi_bound(P, P.slater_point)) + opts.phi_inflation;
  P.phi_inflation = opts.phi_inflation;
  if (P.rows() > 0 && !(P.untightened_margin - P.phi >= opts.slater.margin))
    throw TightenedInfeasible(P.untightened_margin, P.phi);
  P.lambda_radius = lambda_radius(P, P.slater_point);
  return P;
}

struct GranularityCertificate {
  bool granular = false;
  bool slater_at_xi_e = false;  // strict interior already at the minimal enlargement
  double xi_e = 0.0;
  double xi_certified = 0.0;    // smallest probed xi with a strict interior point
  std::vector<double> slater_point;
  double best_margin = -std::numeric_limits<double>::infinity();
};

/// Looks for a strict interior point of the enlarged inner parallel set, first
/// at xi_e and then at two larger enlargements. Integer coordinates must be
/// strictly inside their enlarged bounds, which is impossible at xi_e = 0 for
/// fixed-width boxes, hence the later probes.
inline GranularityCertificate certify_granularity(const MilpInstance& milp, SlaterOptions opts = {}) {
  milp.validate();
  GranularityCertificate cert;
  const GranularityData gran = granularity(milp);
  cert.xi_e = gran.xi_e;
  const double probes[] = {gran.xi_e, 0.5 * (1.0 + gran.xi_e), 1.0 - 0.05 * (1.0 - gran.xi_e)};
  for (double xi : probes) {
    const InnerSet s = inner_set(milp, gran, xi);
    if (s.box_empty) continue;
    try {
      SlaterResult res = find_slater_point(s.A, s.rhs, s.box, milp.n(), opts);
      cert.granular = true;
      cert.slater_at_xi_e = (xi == gran.xi_e);
      cert.xi_certified = xi;
      cert.slater_point = std::move(res.point);
      cert.best_margin = res.margin;
      return cert;
    } catch (const SlaterInfeasible& e) {
      if (e.best_margin() > cert.best_margin) {
        cert.best_margin = e.best_margin();
        cert.slater_point = e.best_point();
      }
    }
  }
  return cert;
}

}  // namespace granmilp
