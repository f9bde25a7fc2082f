#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "granmilp/errors.hpp"
#include "granmilp/geometry.hpp"
#include "granmilp/lagrangian.hpp"
#include "granmilp/milp.hpp"
#include "granmilp/partition.hpp"
#include "granmilp/relaxed_problem.hpp"
#include "granmilp/uzawa.hpp"

namespace granmilp {

struct SimConfig {
  int B = 1;                 // every primal agent computes at least once per B ticks
  double comp_rate = 1.0;    // chance a primal agent computes on a given tick
  double comm_rate = 1.0;    // chance a primal->dual transmission carries fresh values
  std::uint64_t seed = 0;
  long total_ticks = 1000;
  int dual_stride = 1;       // dual updates at every dual_stride-th multiple of B
  StepSizes steps;
  bool verify_invariants = false;
};

struct TraceRecord {
  long tick = 0;
  long epoch = 0;
  double dist_primal = 0.0;
  double dist_dual = 0.0;
  double cost = 0.0;
  bool rounded_feasible = false;
  long msgs_sent = 0;
};

struct SimTrace {
  std::vector<TraceRecord> records;
  // |z(t_n B) - zhat(lambda_{n-1})| / |z(t_{n-1} B) - zhat(lambda_{n-1})| per epoch; NaN when undefined.
  std::vector<double> primal_ratios;
  double lambda0_dist = 0.0;
  std::vector<double> z_final;
  std::vector<double> lambda_final;
  RoundedPoint rounded;
  FeasibilityReport certificate;

  // Schedule data for the staleness report.
  std::vector<std::vector<long>> compute_ticks;                       // per primal agent
  std::map<std::pair<std::size_t, std::size_t>, std::vector<long>> edge_delays;  // per (primal, dual) edge
};

/// Uniform double in [0, 1) from the top 53 bits.
inline double unit_draw(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

/// Independent stream per (kind, agent id) so one agent's draws never shift another's.
inline std::mt19937_64 agent_stream(std::uint64_t seed, std::uint64_t kind, std::uint64_t id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(kind), static_cast<std::uint32_t>(id),
                    static_cast<std::uint32_t>(id >> 32)};
  return std::mt19937_64(seq);
}

using EpochObserver = std::function<void(long tick, std::span<const double> z, std::span<const double> lambda)>;

/// Simulates the block-asynchronous primal-dual method on a logical clock.
inline SimTrace simulate(const RelaxedProblem& P, const BlockPartition& part, const SimConfig& cfg,
                         const SaddleSolution& reference, const EpochObserver& observer = {}) {
  if (reference.z_hat.size() != P.dim() || reference.lambda_hat.size() != P.rows())
    throw Error(ErrorKind::ReferenceMissing, "simulation needs a solved reference saddle point");
  check_steps(P, cfg.steps);
  if (cfg.B < 1 || cfg.dual_stride < 1 || !(cfg.comp_rate > 0.0 && cfg.comp_rate <= 1.0) ||
      !(cfg.comm_rate > 0.0 && cfg.comm_rate <= 1.0) || cfg.total_ticks < 0)
    throw Error(ErrorKind::Validation, "invalid simulation configuration");
  check_cover(part.primal_blocks, P.dim(), "primal");
  if (P.rows() > 0) check_cover(part.dual_blocks, P.rows(), "dual");

  const std::size_t np = part.primal_blocks.size(), nd = part.dual_blocks.size();
  const double gamma = cfg.steps.gamma, beta = cfg.steps.beta;

  std::vector<double> z(P.dim(), 0.0);
  project_box_inplace(z, P.z_box);
  std::vector<double> lambda(P.rows(), 0.0);
  std::vector<std::vector<double>> lambda_copy(np, lambda);  // each primal agent's view
  std::vector<std::vector<double>> z_copy(nd, z);            // each dual agent's view
  std::vector<long> produced(np, -1);                        // tick of each agent's latest block
  std::vector<std::vector<long>> copy_stamp(nd, std::vector<long>(np, -1));
  std::vector<int> idle(np, 0);

  std::vector<std::mt19937_64> compute_rng, comm_rng;
  for (std::size_t i = 0; i < np; ++i) {
    compute_rng.push_back(agent_stream(cfg.seed, 0, i));
    comm_rng.push_back(agent_stream(cfg.seed, 1, i));
  }

  SimTrace trace;
  trace.compute_ticks.assign(np, {});
  trace.lambda0_dist = distance2(lambda, reference.lambda_hat);
  std::vector<double> prev_z = z;
  std::vector<double> prev_br = best_response(P, lambda);

  auto fail = [](const std::string& what) { throw Error(ErrorKind::Validation, "invariant violated: " + what); };

  long epoch = 0;
  for (long k = 0; k < cfg.total_ticks; ++k) {
    for (std::size_t i = 0; i < np; ++i) {
      const bool forced = idle[i] >= cfg.B - 1;
      const bool chosen = unit_draw(compute_rng[i]) < cfg.comp_rate;
      if (!(chosen || forced)) {
        ++idle[i];
        continue;
      }
      idle[i] = 0;
      produced[i] = k;
      trace.compute_ticks[i].push_back(k);
      const auto& blk = part.primal_blocks[i];
      for (std::size_t c = blk.begin; c < blk.end; ++c)
        z[c] = clamp_to(z[c] - gamma * grad_z_coord(P, c, z[c], lambda_copy[i]), P.z_box.lo[c], P.z_box.hi[c]);
      if (cfg.verify_invariants)
        for (std::size_t c = blk.begin; c < blk.end; ++c)
          if (z[c] < P.z_box.lo[c] || z[c] > P.z_box.hi[c]) fail("primal block left its box");
    }

    if ((k + 1) % cfg.B != 0) continue;
    const long t = (k + 1) / cfg.B;
    if (t % cfg.dual_stride != 0) continue;
    ++epoch;
    long msgs = 0;

    for (std::size_t i = 0; i < np; ++i) {
      const auto& blk = part.primal_blocks[i];
      for (auto q : part.primal_to_dual[i]) {
        if (unit_draw(comm_rng[i]) < cfg.comm_rate) {
          std::copy(z.begin() + static_cast<std::ptrdiff_t>(blk.begin), z.begin() + static_cast<std::ptrdiff_t>(blk.end),
                    z_copy[q].begin() + static_cast<std::ptrdiff_t>(blk.begin));
          copy_stamp[q][i] = produced[i];
          ++msgs;
        }
        trace.edge_delays[{i, q}].push_back(k + 1 - copy_stamp[q][i]);
      }
    }

    for (std::size_t q = 0; q < nd; ++q) {
      const auto& blk = part.dual_blocks[q];
      for (std::size_t j = blk.begin; j < blk.end; ++j)
        lambda[j] += beta * grad_lambda_coord(P, j, z_copy[q], lambda[j]);
      project_capped_simplex_inplace(std::span<double>(lambda).subspan(blk.begin, blk.size()), P.lambda_radius);
      if (cfg.verify_invariants) {
        double s = 0.0;
        for (std::size_t j = blk.begin; j < blk.end; ++j) {
          if (lambda[j] < 0.0) fail("negative multiplier");
          s += lambda[j];
        }
        if (s > P.lambda_radius * (1.0 + 1e-12) + 1e-12) fail("dual block exceeds its cap");
      }
    }

    for (std::size_t q = 0; q < nd; ++q) {
      const auto& blk = part.dual_blocks[q];
      for (auto i : part.dual_to_primal[q]) {
        std::copy(lambda.begin() + static_cast<std::ptrdiff_t>(blk.begin),
                  lambda.begin() + static_cast<std::ptrdiff_t>(blk.end),
                  lambda_copy[i].begin() + static_cast<std::ptrdiff_t>(blk.begin));
        ++msgs;
      }
    }
    if (cfg.verify_invariants)
      for (std::size_t i = 0; i < np; ++i)
        for (auto q : part.primal_to_dual[i])
          for (std::size_t j = part.dual_blocks[q].begin; j < part.dual_blocks[q].end; ++j)
            if (lambda_copy[i][j] != lambda[j]) fail("primal agents disagree on multipliers");

    const double num = distance2(z, prev_br), den = distance2(prev_z, prev_br);
    trace.primal_ratios.push_back(den > 1e-14 ? num / den : std::numeric_limits<double>::quiet_NaN());
    prev_z = z;
    prev_br = best_response(P, lambda);

    TraceRecord rec;
    rec.tick = k + 1;
    rec.epoch = epoch;
    rec.dist_primal = distance2(z, reference.z_hat);
    rec.dist_dual = distance2(lambda, reference.lambda_hat);
    rec.cost = dot(P.c, z);
    rec.rounded_feasible = check_feasibility_milp(P.milp, round_solution(z, P.n(), P.m())).feasible;
    rec.msgs_sent = msgs;
    trace.records.push_back(rec);
    if (observer) observer(k + 1, z, lambda);
  }

  trace.z_final = z;
  trace.lambda_final = lambda;
  trace.rounded = round_solution(z, P.n(), P.m());
  trace.certificate = check_feasibility_milp(P.milp, trace.rounded);
  return trace;
}

struct StalenessReport {
  long max_compute_gap = 0;  // longest stretch between an agent's consecutive computations
  long max_edge_delay = 0;   // oldest primal block a dual agent used
  std::map<std::pair<std::size_t, std::size_t>, long> edge_max;
  std::map<long, long> delay_histogram;  // delay -> occurrences over all edges and epochs
};

inline StalenessReport staleness_report(const SimTrace& trace) {
  StalenessReport rep;
  for (const auto& ticks : trace.compute_ticks) {
    long last = -1;
    for (long t : ticks) {
      rep.max_compute_gap = std::max(rep.max_compute_gap, t - last);
      last = t;
    }
  }
  for (const auto& [edge, delays] : trace.edge_delays) {
    long worst = 0;
    for (long d : delays) {
      worst = std::max(worst, d);
      ++rep.delay_histogram[d];
    }
    rep.edge_max[edge] = worst;
    rep.max_edge_delay = std::max(rep.max_edge_delay, worst);
  }
  return rep;
}

/// First epoch from which every later record is rounded-feasible; 0 if the run ends infeasible.
inline long first_feasible_epoch(const SimTrace& trace) {
  long first = 0;
  for (const auto& r : trace.records) {
    if (!r.rounded_feasible) first = 0;
    else if (first == 0) first = r.epoch;
  }
  return first;
}

/// Trace of the synchronous iteration in the simulator's record format: one
/// record per iteration, tick = epoch = iteration count, no messages.
inline SimTrace trace_sync(const RelaxedProblem& P, const SolveSettings& settings, const SaddleSolution& reference,
                           long iterations) {
  if (reference.z_hat.size() != P.dim() || reference.lambda_hat.size() != P.rows())
    throw Error(ErrorKind::ReferenceMissing, "trace needs a solved reference saddle point");
  check_steps(P, settings.steps);
  UzawaIterator it(P, settings);
  SimTrace trace;
  trace.lambda0_dist = distance2(it.lambda(), reference.lambda_hat);
  std::vector<double> prev_z(it.z().begin(), it.z().end());
  std::vector<double> prev_br = best_response(P, it.lambda());
  for (long k = 1; k <= iterations; ++k) {
    it.step();
    const auto z = it.z();
    const double num = distance2(z, prev_br), den = distance2(prev_z, prev_br);
    trace.primal_ratios.push_back(den > 1e-14 ? num / den : std::numeric_limits<double>::quiet_NaN());
    prev_z.assign(z.begin(), z.end());
    prev_br = best_response(P, it.lambda());

    TraceRecord rec;
    rec.tick = k;
    rec.epoch = k;
    rec.dist_primal = distance2(z, reference.z_hat);
    rec.dist_dual = distance2(it.lambda(), reference.lambda_hat);
    rec.cost = dot(P.c, z);
    rec.rounded_feasible = check_feasibility_milp(P.milp, round_solution(z, P.n(), P.m())).feasible;
    trace.records.push_back(rec);
  }
  trace.z_final.assign(it.z().begin(), it.z().end());
  trace.lambda_final.assign(it.lambda().begin(), it.lambda().end());
  trace.rounded = round_solution(trace.z_final, P.n(), P.m());
  trace.certificate = check_feasibility_milp(P.milp, trace.rounded);
  return trace;
}

}  // namespace granmilp
