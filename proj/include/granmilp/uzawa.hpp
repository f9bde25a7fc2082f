#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "granmilp/errors.hpp"
#include "granmilp/geometry.hpp"
#include "granmilp/lagrangian.hpp"
#include "granmilp/partition.hpp"
#include "granmilp/relaxed_problem.hpp"

namespace granmilp {

struct StepSizes {
  double gamma = 0.0;
  double beta = 0.0;
};

/// Upper limit on the dual step under which the dual contraction argument holds.
inline double beta_limit(double alpha, double delta, double norm_A) {
  return std::min(2.0 * alpha / (norm_A + 2.0 * alpha * delta), 2.0 * delta / (1.0 + delta * delta));
}

/// Also caps beta by 2 alpha / (|A|^2 + 2 alpha delta): with |A| > 1 the
/// first limit alone admits dual steps for which the iteration diverges.
inline StepSizes default_steps(const RelaxedProblem& P, double gamma_scale = 1.0) {
  const double a = P.alpha, d = P.delta, nA = P.norm_A;
  const double cap = std::min(beta_limit(a, d, nA), 2.0 * a / (nA * nA + 2.0 * a * d));
  return {1.0 / (a + nA * gamma_scale), 0.9 * cap};
}

inline void check_steps(const RelaxedProblem& P, StepSizes s) {
  if (!(s.gamma > 0.0) || !std::isfinite(s.gamma))
    throw Error(ErrorKind::StepSizeViolation, "primal step must be positive and finite");
  const double limit = beta_limit(P.alpha, P.delta, P.norm_A);
  if (!(s.beta > 0.0) || !(s.beta < limit))
    throw Error(ErrorKind::StepSizeViolation,
                "dual step " + std::to_string(s.beta) + " outside (0, " + std::to_string(limit) + ")");
}

/// Projects each dual block onto {lambda >= 0, |lambda|_1 <= radius}, or onto
/// the nonnegative orthant when `cap` is false.
inline void project_dual_blocks(std::span<double> lambda, std::span<const IndexRange> blocks, double radius,
                                bool cap) {
  if (!cap) {
    for (double& v : lambda) v = std::max(v, 0.0);
    return;
  }
  for (const auto& blk : blocks) project_capped_simplex_inplace(lambda.subspan(blk.begin, blk.size()), radius);
}

struct SolveSettings {
  StepSizes steps;
  long max_iters = 2'000'000;
  double residual_tol = 1e-10;
  bool cap_dual = true;
  std::vector<IndexRange> dual_blocks;  // empty: a single block over all rows
};

struct SaddleSolution {
  std::vector<double> z_hat;
  std::vector<double> lambda_hat;
  double residual = 0.0;
  long iters = 0;
};

/// Full-vector projected gradient descent-ascent. Each iteration updates z
/// from the current multipliers, then the multipliers from the new z.
class UzawaIterator {
 public:
  UzawaIterator(const RelaxedProblem& P, const SolveSettings& s)
      : P_(P), s_(s), z_(P.dim(), 0.0), lambda_(P.rows(), 0.0), az_(P.rows()), next_z_(P.dim()),
        probe_(P.rows()) {
    blocks_ = s.dual_blocks.empty() && P.rows() > 0 ? std::vector<IndexRange>{{0, P.rows()}} : s.dual_blocks;
    project_box_inplace(z_, P.z_box);
    P.A.multiply(z_, az_);
  }

  [[nodiscard]] std::span<const double> z() const { return z_; }
  [[nodiscard]] std::span<const double> lambda() const { return lambda_; }
  [[nodiscard]] const std::vector<IndexRange>& dual_blocks() const { return blocks_; }

  /// Advances one iteration and returns the fixed-point residual of the
  /// point it started from.
  double step() {
    const double g = s_.steps.gamma, bstep = s_.steps.beta;
    double primal_res = 0.0;
    for (std::size_t i = 0; i < z_.size(); ++i) {
      const double v = clamp_to(z_[i] - g * grad_z_coord(P_, i, z_[i], lambda_), P_.z_box.lo[i], P_.z_box.hi[i]);
      primal_res += (v - z_[i]) * (v - z_[i]);
      next_z_[i] = v;
    }
    // Dual fixed-point residual at the starting point uses the cached A z.
    for (std::size_t j = 0; j < lambda_.size(); ++j)
      probe_[j] = lambda_[j] + bstep * (az_[j] - P_.b[j] - P_.nu[j] + P_.phi - P_.delta * lambda_[j]);
    project_dual_blocks(probe_, blocks_, P_.lambda_radius, s_.cap_dual);
    const double dual_res = distance2(probe_, lambda_);

    z_.swap(next_z_);
    for (std::size_t j = 0; j < lambda_.size(); ++j)
      lambda_[j] += bstep * grad_lambda_coord(P_, j, z_, lambda_[j]);
    project_dual_blocks(lambda_, blocks_, P_.lambda_radius, s_.cap_dual);
    P_.A.multiply(z_, az_);
    return std::sqrt(primal_res) + dual_res;
  }

 private:
  const RelaxedProblem& P_;
  SolveSettings s_;
  std::vector<IndexRange> blocks_;
  std::vector<double> z_, lambda_, az_, next_z_, probe_;
};

/// Fixed-point residual of (z, lambda) under the given steps.
inline double saddle_residual(const RelaxedProblem& P, std::span<const double> z, std::span<const double> lambda,
                              const SolveSettings& s) {
  const auto gz = grad_z(P, z, lambda);
  double pr = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double v = clamp_to(z[i] - s.steps.gamma * gz[i], P.z_box.lo[i], P.z_box.hi[i]);
    pr += (v - z[i]) * (v - z[i]);
  }
  auto probe = grad_lambda(P, z, lambda);
  for (std::size_t j = 0; j < probe.size(); ++j) probe[j] = lambda[j] + s.steps.beta * probe[j];
  const std::vector<IndexRange> whole{{0, P.rows()}};
  project_dual_blocks(probe, s.dual_blocks.empty() ? std::span<const IndexRange>(whole) : s.dual_blocks,
                      P.lambda_radius, s.cap_dual);
  return std::sqrt(pr) + distance2(probe, lambda);
}

using IterateObserver = std::function<void(long, std::span<const double>, std::span<const double>)>;

/// Runs until the residual of the current point is at most the tolerance.
/// The observer, if any, sees every iterate after each step.
inline SaddleSolution solve(const RelaxedProblem& P, const SolveSettings& settings,
                            const IterateObserver& observer = {}) {
  check_steps(P, settings.steps);
  UzawaIterator it(P, settings);
  double res = 0.0;
  for (long k = 0; k < settings.max_iters; ++k) {
    res = it.step();
    if (observer) observer(k + 1, it.z(), it.lambda());
    if (res <= settings.residual_tol) {
      SaddleSolution out{std::vector<double>(it.z().begin(), it.z().end()),
                         std::vector<double>(it.lambda().begin(), it.lambda().end()), 0.0, k + 1};
      out.residual = saddle_residual(P, out.z_hat, out.lambda_hat, settings);
      return out;
    }
  }
  throw NotConverged(std::vector<double>(it.z().begin(), it.z().end()),
                     std::vector<double>(it.lambda().begin(), it.lambda().end()), res, settings.max_iters);
}

inline SaddleSolution solve(const RelaxedProblem& P) {
  SolveSettings s;
  s.steps = default_steps(P);
  return solve(P, s);
}

}  // namespace granmilp
