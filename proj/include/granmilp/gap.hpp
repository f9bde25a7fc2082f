#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "granmilp/async_sim.hpp"
#include "granmilp/errors.hpp"
#include "granmilp/milp.hpp"
#include "granmilp/partition.hpp"
#include "granmilp/relaxation.hpp"
#include "granmilp/uzawa.hpp"

namespace granmilp {

struct GapSpec {
  std::size_t agents = 20;  // rows sum_j y_ij <= 1
  std::size_t tasks = 20;   // rows sum_i t_ij y_ij <= capacity_j
  std::uint64_t seed = 0;
  int weight_lo = 1;
  int weight_hi = 10;
  std::optional<std::vector<double>> capacity;  // default round(0.6 * agents * mean weight)
  double cost_mean = 0.0;
  double cost_stddev = 1.0;
};

/// Assignment rows first, then one capacity row per task. Variable y_ij is
/// column i * tasks + j.
inline MilpInstance generate_gap(const GapSpec& spec) {
  if (spec.agents == 0 || spec.tasks == 0) throw Error(ErrorKind::Validation, "GAP needs at least one agent and task");
  if (spec.weight_lo < 1 || spec.weight_hi < spec.weight_lo) throw Error(ErrorKind::Validation, "bad weight range");
  const std::size_t p = spec.agents, q = spec.tasks, nv = p * q;
  std::mt19937_64 gen(spec.seed);
  std::uniform_int_distribution<int> weight(spec.weight_lo, spec.weight_hi);
  std::normal_distribution<double> cost(spec.cost_mean, spec.cost_stddev);

  std::vector<std::int64_t> t(nv);
  for (auto& v : t) v = weight(gen);
  MilpInstance m;
  m.d.resize(nv);
  for (auto& v : m.d) v = cost(gen);

  std::vector<double> cap;
  if (spec.capacity) {
    cap = *spec.capacity;
    if (cap.size() != q) throw Error(ErrorKind::Validation, "capacity vector must have one entry per task");
  } else {
    const double mean_weight = 0.5 * (spec.weight_lo + spec.weight_hi);
    cap.assign(q, std::round(0.6 * static_cast<double>(p) * mean_weight));
  }
  for (double c : cap)
    if (!(c > 0.0)) throw Error(ErrorKind::Validation, "capacities must be positive");

  std::vector<std::size_t> ri, ci;
  std::vector<std::int64_t> vals;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j) {
      ri.push_back(i);
      ci.push_back(i * q + j);
      vals.push_back(1);
    }
  for (std::size_t j = 0; j < q; ++j)
    for (std::size_t i = 0; i < p; ++i) {
      ri.push_back(p + j);
      ci.push_back(i * q + j);
      vals.push_back(t[i * q + j]);
    }
  m.E = CsrMatrix<double>(p + q, 0);
  m.F = CsrMatrix<std::int64_t>::from_triplets(p + q, nv, ri, ci, vals);
  m.h.assign(p, 1.0);
  m.h.insert(m.h.end(), cap.begin(), cap.end());
  m.y_lo.assign(nv, 0);
  m.y_hi.assign(nv, 1);
  return m;
}

/// Enlargement for GAP: an agent row with `tasks` unit entries only has
/// interior points once xi > (tasks - 1) / (tasks + 1), so the generic
/// default is far too small.
inline double gap_xi(std::size_t tasks) { return 1.0 - 0.1 / static_cast<double>(tasks); }

/// One primal agent per GAP agent (its `tasks` variables); rows split into
/// `dual_agents` contiguous groups.
inline BlockPartition gap_partition(const RelaxedProblem& P, std::size_t agents, std::size_t tasks,
                                    std::size_t dual_agents) {
  std::vector<IndexRange> primal;
  for (std::size_t i = 0; i < agents; ++i) primal.push_back({i * tasks, (i + 1) * tasks});
  return make_partition(P.A, std::move(primal), split_even(P.rows(), dual_agents));
}

/// Worker count from GRANULAR_MILP_THREADS, else the hardware concurrency.
inline unsigned thread_budget() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GRANULAR_MILP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<unsigned>(v);
  }
  return hw;
}

/// Runs independent jobs on at most `workers` threads; results keep job order.
template <class Job>
void parallel_for(std::size_t count, unsigned workers, Job job) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) job(k);
    return;
  }
  std::mutex mu;
  std::size_t next = 0;
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      while (true) {
        std::size_t k;
        {
          std::lock_guard lock(mu);
          if (next >= count || failure) return;
          k = next++;
        }
        try {
          job(k);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct BenchRun {
  std::string label;
  SimConfig sim;               // zero steps mean the defaults for the relaxed problem
  double phi_inflation = 0.0;
};

struct BenchOutcome {
  std::string label;
  BenchRun run;
  StepSizes steps;
  double phi = 0.0;
  long first_feasible_epoch = 0;
  double final_dist_primal = 0.0;
  double final_dist_dual = 0.0;
  double final_cost = 0.0;        // c'z at the last iterate
  double rounded_cost = 0.0;      // MILP objective of the rounded output
  bool final_feasible = false;
  long epochs = 0;
  long ticks_to_tolerance = -1;   // first tick with |z - zhat| <= tolerance, -1 if never
  SimTrace trace;
};

struct BenchSettings {
  RelaxOptions relax;
  std::size_t dual_agents = 14;
  double distance_tolerance = 1e-3;
  SolveSettings reference;  // zero steps mean the defaults
  unsigned threads = 0;     // 0: thread_budget()
  double gamma_scale = 1.0; // primal step 1 / (alpha + |A| * gamma_scale) when steps are defaulted
};

/// Full pipeline per run: relax, tighten, reference solve, simulate, round, certify.
inline std::vector<BenchOutcome> run_experiment(const GapSpec& spec, const std::vector<BenchRun>& runs,
                                                const BenchSettings& settings) {
  const MilpInstance milp = generate_gap(spec);
  std::map<double, std::shared_ptr<const RelaxedProblem>> problems;
  std::map<double, SaddleSolution> references;
  for (const auto& r : runs) {
    if (problems.count(r.phi_inflation)) continue;
    RelaxOptions ro = settings.relax;
    if (!ro.xi) ro.xi = gap_xi(spec.tasks);
    ro.phi_inflation = r.phi_inflation;
    auto P = std::make_shared<const RelaxedProblem>(build_relaxation(milp, ro));
    SolveSettings ss = settings.reference;
    if (ss.steps.gamma == 0.0) ss.steps = default_steps(*P);
    references[r.phi_inflation] = solve(*P, ss);
    problems[r.phi_inflation] = std::move(P);
  }

  std::vector<BenchOutcome> out(runs.size());
  parallel_for(runs.size(), settings.threads ? settings.threads : thread_budget(), [&](std::size_t k) {
    const BenchRun& run = runs[k];
    const RelaxedProblem& P = *problems.at(run.phi_inflation);
    const SaddleSolution& ref = references.at(run.phi_inflation);
    const BlockPartition part = gap_partition(P, spec.agents, spec.tasks, settings.dual_agents);
    SimConfig cfg = run.sim;
    if (cfg.steps.gamma == 0.0) cfg.steps = default_steps(P, settings.gamma_scale);
    BenchOutcome o;
    o.label = run.label;
    o.run = run;
    o.steps = cfg.steps;
    o.phi = P.phi;
    o.trace = simulate(P, part, cfg, ref);
    o.first_feasible_epoch = first_feasible_epoch(o.trace);
    if (!o.trace.records.empty()) {
      const auto& last = o.trace.records.back();
      o.final_dist_primal = last.dist_primal;
      o.final_dist_dual = last.dist_dual;
      o.epochs = last.epoch;
    }
    for (const auto& rec : o.trace.records)
      if (rec.dist_primal <= settings.distance_tolerance) {
        o.ticks_to_tolerance = rec.tick;
        break;
      }
    o.final_cost = dot(P.c, o.trace.z_final);
    o.rounded_cost = milp_cost(P.milp, o.trace.rounded);
    o.final_feasible = o.trace.certificate.feasible;
    out[k] = std::move(o);
  });
  return out;
}

}  // namespace granmilp
