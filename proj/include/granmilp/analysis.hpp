#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "granmilp/async_sim.hpp"
#include "granmilp/errors.hpp"
#include "granmilp/lagrangian.hpp"
#include "granmilp/lp_simplex.hpp"
#include "granmilp/milp.hpp"
#include "granmilp/relaxed_problem.hpp"

namespace granmilp {

struct OracleResult {
  RoundedPoint z_star;
  double cost = 0.0;
  long enumerated = 0;
};

/// Exhaustive search over the integer box of a pure-integer instance.
inline OracleResult brute_force_milp(const MilpInstance& milp, double max_points = 1e7) {
  milp.validate();
  if (milp.n() > 0) throw Error(ErrorKind::MixedUnsupported, "enumeration needs a pure-integer instance");
  double count = 1.0;
  for (std::size_t j = 0; j < milp.m(); ++j) count *= static_cast<double>(milp.y_hi[j] - milp.y_lo[j] + 1);
  if (count > max_points) throw Error(ErrorKind::TooLarge, "integer box has " + std::to_string(count) + " points");

  const std::size_t m = milp.m();
  std::vector<std::int64_t> y(milp.y_lo);
  std::vector<double> yd(m), lhs(milp.p());
  OracleResult best;
  best.cost = std::numeric_limits<double>::infinity();
  bool found = false;
  while (true) {
    ++best.enumerated;
    for (std::size_t j = 0; j < m; ++j) yd[j] = static_cast<double>(y[j]);
    bool ok = true;
    for (std::size_t i = 0; i < milp.p() && ok; ++i) ok = milp.F.row_dot(i, yd) <= milp.h[i] + 1e-9;
    if (ok) {
      const double cost = dot(milp.d, yd);
      if (cost < best.cost) {
        best.cost = cost;
        best.z_star = {{}, y};
        found = true;
      }
    }
    std::size_t j = 0;
    while (j < m && y[j] == milp.y_hi[j]) {
      y[j] = milp.y_lo[j];
      ++j;
    }
    if (j == m) break;
    ++y[j];
  }
  if (!found) throw Error(ErrorKind::Infeasible, "no integer point satisfies the constraints");
  return best;
}

/// |c| * radius * sqrt(delta / 2 alpha) + alpha r / 2
inline double regularization_gap_bound(const RelaxedProblem& P) {
  return norm2(P.c) * P.lambda_radius * std::sqrt(P.delta / (2.0 * P.alpha)) + 0.5 * P.alpha * P.r;
}

struct SuboptimalityBound {
  double relaxation_term = 0.0;   // LP versus MILP optimum, via the Hoffman constant
  double rounding_term = 0.0;     // |d|_1 / 2
  double regularization_term = 0.0;
  double total = 0.0;
};

inline SuboptimalityBound total_suboptimality_bound(const RelaxedProblem& P, double sigma) {
  SuboptimalityBound b;
  b.relaxation_term = 0.5 * norm2(P.c) * (sigma * P.milp.F.inf_norm() + 1.0);
  b.rounding_term = 0.5 * norm1(P.milp.d);
  b.regularization_term = regularization_gap_bound(P);
  b.total = b.relaxation_term + b.rounding_term + b.regularization_term;
  return b;
}

struct HoffmanEstimate {
  double sigma = 0.0;
  long samples = 0;
  long violating = 0;
};

/// Lower bound on dist(w, {C x <= h}) from dual coordinate ascent on the
/// projection problem; every dual value bounds half the squared distance from below.
inline double projection_distance_lb(const CsrMatrix<double>& C, std::span<const double> h, std::span<const double> w,
                                     int sweeps = 300) {
  const std::size_t p = C.rows;
  std::vector<double> mu(p, 0.0), x(w.begin(), w.end()), rn2(p);
  for (std::size_t j = 0; j < p; ++j) rn2[j] = C.row_norm2(j) * C.row_norm2(j);
  auto dual_value = [&] {
    // g(mu) = -1/2 |C' mu|^2 + mu'(C w - h), with x = w - C' mu.
    double s = 0.0, q = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) q += (w[i] - x[i]) * (w[i] - x[i]);
    for (std::size_t j = 0; j < p; ++j) s += mu[j] * (C.row_dot(j, w) - h[j]);
    return s - 0.5 * q;
  };
  double best = 0.0;
  for (int it = 0; it < sweeps; ++it) {
    double change = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      if (rn2[j] == 0.0) continue;
      const double next = std::max(0.0, mu[j] + (C.row_dot(j, x) - h[j]) / rn2[j]);
      const double step = next - mu[j];
      if (step == 0.0) continue;
      const auto cols = C.row_cols(j);
      const auto vals = C.row_vals(j);
      for (std::size_t k = 0; k < cols.size(); ++k) x[cols[k]] -= step * vals[k];
      mu[j] = next;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-13) break;
  }
  best = std::max(best, dual_value());
  return std::sqrt(2.0 * best);
}

/// Sampled lower estimate of a Hoffman constant for E x + F y <= h, drawn
/// over the instance box widened by one unit per side. The estimate is a
/// running maximum, so a longer run from the same seed never reports less.
inline HoffmanEstimate hoffman_estimate(const MilpInstance& milp, long samples = 10000, std::uint64_t seed = 0) {
  milp.validate();
  const CsrMatrix<double> C = hstack(milp.E, milp.F.cast<double>());
  std::vector<double> lo = milp.x_lo, hi = milp.x_hi;
  for (std::size_t j = 0; j < milp.m(); ++j) {
    lo.push_back(static_cast<double>(milp.y_lo[j]));
    hi.push_back(static_cast<double>(milp.y_hi[j]));
  }
  const Box box(lo, hi);
  const std::vector<double> zero(C.cols, 0.0);
  if (solve_lp(zero, C, milp.h, box).status != LpStatus::Optimal)
    throw Error(ErrorKind::EmptyPolyhedron, "no point of the box satisfies E x + F y <= h");

  std::mt19937_64 gen(seed);
  HoffmanEstimate est;
  std::vector<double> w(C.cols);
  for (long s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = lo[i] - 1.0 + (hi[i] - lo[i] + 2.0) * unit_draw(gen);
    ++est.samples;
    double viol2 = 0.0;
    for (std::size_t j = 0; j < C.rows; ++j) {
      const double v = C.row_dot(j, w) - milp.h[j];
      if (v > 0.0) viol2 += v * v;
    }
    if (viol2 <= 1e-18) continue;
    ++est.violating;
    est.sigma = std::max(est.sigma, projection_distance_lb(C, milp.h, w) / std::sqrt(viol2));
  }
  return est;
}

inline double dual_contraction(double beta, double delta) { return (1.0 - beta * delta) * (1.0 - beta * delta) + beta * beta; }

struct EnvelopeInputs {
  double q_d = 0.0;
  double q_p = 0.0;
  double lambda0_dist = 0.0;  // |lambda(0) - lambda_hat|
  double r = 0.0;
  double norm_A = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  long epoch_gap = 1;         // t_n - t_{n-1} in multiples of B
};

inline double envelope_constant(const EnvelopeInputs& in) {
  const double a2 = in.norm_A * in.norm_A, r2 = in.r * in.r;
  return 4.0 * r2 * in.q_d * in.q_p * in.q_p * a2 + 8.0 * r2 * in.beta * in.beta * in.q_p * a2;
}

/// Squared dual distance bound for epochs n = 1..n_epochs.
inline std::vector<double> dual_envelope(const EnvelopeInputs& in, long n_epochs) {
  std::vector<double> out;
  const double K = envelope_constant(in);
  const double d0 = in.lambda0_dist * in.lambda0_dist;
  double qn = 1.0, partial = 1.0;  // q_d^n and sum_{i=0}^{n} q_d^i
  for (long n = 1; n <= n_epochs; ++n) {
    qn *= in.q_d;
    partial += qn;
    out.push_back(qn * d0 + K * partial);
  }
  return out;
}

/// Primal distance bound for epochs n = 1..n_epochs.
inline std::vector<double> primal_envelope(const EnvelopeInputs& in, long n_epochs) {
  std::vector<double> out;
  const double K = envelope_constant(in);
  const double d0 = in.lambda0_dist * in.lambda0_dist;
  const double lead = 2.0 * std::pow(in.q_p, static_cast<double>(in.epoch_gap)) * in.r;
  double qprev = 1.0, partial = 1.0;  // q_d^{n-1} and sum_{i=0}^{n-1} q_d^i
  for (long n = 1; n <= n_epochs; ++n) {
    if (n > 1) {
      qprev *= in.q_d;
      partial += qprev;
    }
    out.push_back(lead + in.norm_A / in.alpha * std::sqrt(qprev * d0 + K * partial));
  }
  return out;
}

/// Worst per-epoch primal contraction, rescaled to one unit of t.
inline double measured_primal_rate(std::span<const double> ratios, long epoch_gap = 1) {
  double worst = 0.0;
  for (double v : ratios)
    if (std::isfinite(v)) worst = std::max(worst, v);
  return epoch_gap > 1 ? std::pow(worst, 1.0 / static_cast<double>(epoch_gap)) : worst;
}

struct EnvelopeViolation {
  long epoch = 0;
  std::string which;  // "dual" or "primal"
  double measured = 0.0;
  double bound = 0.0;
};

struct BoundsReport {
  double phi = 0.0;
  double lambda_radius = 0.0;
  double reg_gap_bound = 0.0;
  double hoffman_sigma = 0.0;
  std::string sigma_source = "estimate";
  double milp_lp_gap_bound = 0.0;
  double rounding_term = 0.0;
  double total_bound = 0.0;
  double q_d = 0.0;
  double q_p_hat = 0.0;
  double beta = 0.0;
  std::vector<double> dual_envelope;
  std::vector<double> primal_envelope;
  std::vector<double> dual_measured;    // squared distances
  std::vector<double> primal_measured;
  std::vector<EnvelopeViolation> violations;
  std::optional<double> measured_reg_gap;  // |c'zhat - c'z*| when z* is available
  std::optional<double> measured_tightened_violation;  // max_j (A_j zhat - b_j - nu_j + phi)_+
};

/// Evaluates every bound for one run and checks the trace against the envelopes.
inline BoundsReport evaluate_bounds(const RelaxedProblem& P, std::span<const TraceRecord> records,
                                    std::span<const double> primal_ratios, double lambda0_dist, double beta,
                                    double sigma, bool sigma_from_user, long epoch_gap = 1) {
  BoundsReport rep;
  rep.phi = P.phi;
  rep.lambda_radius = P.lambda_radius;
  rep.reg_gap_bound = regularization_gap_bound(P);
  rep.hoffman_sigma = sigma;
  rep.sigma_source = sigma_from_user ? "user" : "estimate";
  const auto tb = total_suboptimality_bound(P, sigma);
  rep.milp_lp_gap_bound = tb.relaxation_term;
  rep.rounding_term = tb.rounding_term;
  rep.total_bound = tb.total;
  rep.beta = beta;
  rep.q_d = dual_contraction(beta, P.delta);
  rep.q_p_hat = measured_primal_rate(primal_ratios, epoch_gap);

  EnvelopeInputs in{rep.q_d, rep.q_p_hat, lambda0_dist, P.r, P.norm_A, P.alpha, beta, epoch_gap};
  const long n = static_cast<long>(records.size());
  rep.dual_envelope = dual_envelope(in, n);
  rep.primal_envelope = primal_envelope(in, n);
  for (long k = 0; k < n; ++k) {
    const auto& rec = records[static_cast<std::size_t>(k)];
    const double d2 = rec.dist_dual * rec.dist_dual;
    rep.dual_measured.push_back(d2);
    rep.primal_measured.push_back(rec.dist_primal);
    if (!(d2 <= rep.dual_envelope[static_cast<std::size_t>(k)]))
      rep.violations.push_back({rec.epoch, "dual", d2, rep.dual_envelope[static_cast<std::size_t>(k)]});
    if (!(rec.dist_primal <= rep.primal_envelope[static_cast<std::size_t>(k)]))
      rep.violations.push_back({rec.epoch, "primal", rec.dist_primal, rep.primal_envelope[static_cast<std::size_t>(k)]});
  }
  return rep;
}

/// Optimum of the relaxed LP over the tightened rows b + nu - phi (what the
/// regularized saddle point approximates), or over b + nu when `tightened` is false.
inline LpResult relaxed_lp_optimum(const RelaxedProblem& P, bool tightened = true) {
  std::vector<double> rhs(P.rows());
  for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] = P.b[j] + P.nu[j] - (tightened ? P.phi : 0.0);
  return solve_lp(P.c, P.A, rhs, P.z_box);
}

}  // namespace granmilp
