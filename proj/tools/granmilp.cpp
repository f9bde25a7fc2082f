#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "granmilp/analysis.hpp"
#include "granmilp/async_sim.hpp"
#include "granmilp/gap.hpp"
#include "granmilp/io.hpp"
#include "granmilp/partition.hpp"
#include "granmilp/relaxation.hpp"
#include "granmilp/uzawa.hpp"

namespace fs = std::filesystem;
using granmilp::io::Json;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotGranular = 2;
constexpr int kExitEnvelope = 3;

struct Manifest {
  Manifest(std::string cmd, std::vector<std::string> in) : command(std::move(cmd)), inputs(std::move(in)) {}

  std::string command;
  std::vector<std::string> inputs;
  Json config = Json::object();
  std::optional<std::uint64_t> seed;
  std::vector<std::string> artifacts;

  void write(const fs::path& dir) {
    Json j;
    j["tool"] = "granmilp";
    j["version"] = kVersion;
    j["command"] = command;
    j["inputs"] = inputs;
    j["config"] = config;
    j["seed"] = seed ? Json(*seed) : Json(nullptr);
    const fs::path path = dir / ("manifest-" + command + ".json");
    artifacts.push_back(path.generic_string());
    j["artifacts"] = artifacts;
    granmilp::io::write_file(path, granmilp::io::dump(j));
  }
};

void emit(Manifest& man, const fs::path& path, std::string_view content) {
  granmilp::io::write_file(path, content);
  man.artifacts.push_back(path.generic_string());
}

std::string join(std::span<const std::int64_t> v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s + "]";
}

// ---------------------------------------------------------------------------

struct RelaxArgs {
  std::string problem;
  std::optional<double> xi, phi;
  double alpha = 0.1, delta = 0.1, phi_inflation = 0.0;
  std::string out_dir = ".";
};

int cmd_relax(const RelaxArgs& a) {
  Manifest man{"relax", {a.problem}};
  const granmilp::MilpInstance milp = granmilp::io::load_problem(a.problem);
  granmilp::RelaxOptions opts;
  opts.xi = a.xi;
  opts.alpha = a.alpha;
  opts.delta = a.delta;
  opts.phi = a.phi;
  opts.phi_inflation = a.phi_inflation;

  const granmilp::GranularityData gran = granmilp::granularity(milp);
  const granmilp::GranularityCertificate cert = granmilp::certify_granularity(milp, opts.slater);
  std::cout << "omega: " << join(gran.omega) << "\n";
  std::cout << "xi_e: " << granmilp::io::format_real(gran.xi_e) << "\n";

  Json report;
  report["omega"] = gran.omega;
  report["xi_e"] = gran.xi_e;
  report["granular_by_slater"] = cert.granular;
  report["xi_certified"] = cert.granular ? Json(cert.xi_certified) : Json(nullptr);
  report["best_margin"] = granmilp::io::number(cert.best_margin);
  report["slater_point"] = granmilp::io::numbers(cert.slater_point);

  man.config = Json{{"xi", a.xi ? Json(*a.xi) : Json(nullptr)},
                    {"alpha", a.alpha},
                    {"delta", a.delta},
                    {"phi", a.phi ? Json(*a.phi) : Json(nullptr)},
                    {"phi_inflation", a.phi_inflation},
                    {"slater_margin", opts.slater.margin},
                    {"slater_iters", opts.slater.max_iters}};
  const fs::path dir = a.out_dir;
  try {
    const granmilp::RelaxedProblem P = granmilp::build_relaxation(milp, opts);
    report["xi"] = P.xi;
    report["phi"] = P.phi;
    report["lambda_radius"] = granmilp::io::number(P.lambda_radius);
    report["untightened_margin"] = P.untightened_margin;
    std::cout << "xi: " << granmilp::io::format_real(P.xi) << "\n";
    std::cout << "phi: " << granmilp::io::format_real(P.phi) << "\n";
    std::cout << "lambda_radius: " << granmilp::io::format_real(P.lambda_radius) << "\n";
    std::cout << "slater margin: " << granmilp::io::format_real(P.untightened_margin) << "\n";
    emit(man, dir / "relaxed.json", granmilp::io::dump(granmilp::io::relaxed_to_json(P, opts)));
    emit(man, dir / "granularity.json", granmilp::io::dump(report));
    man.write(dir);
    return kExitOk;
  } catch (const granmilp::SlaterInfeasible& e) {
    std::cerr << "not granular: " << e.what() << "\n";
    std::cout << "best margin: " << granmilp::io::format_real(e.best_margin()) << "\n";
    report["best_margin"] = granmilp::io::number(e.best_margin());
  } catch (const granmilp::TightenedInfeasible& e) {
    std::cerr << e.what() << "\n";
    std::cout << "best margin: " << granmilp::io::format_real(e.margin() - e.phi()) << "\n";
    report["best_margin"] = e.margin() - e.phi();
  }
  emit(man, dir / "granularity.json", granmilp::io::dump(report));
  man.write(dir);
  return kExitNotGranular;
}

// ---------------------------------------------------------------------------

struct SimArgs {
  std::optional<double> gamma, beta;
  int B = 1;
  double comp_rate = 1.0, comm_rate = 1.0;
  std::uint64_t seed = 0;
  std::optional<long> iters;
};

struct SolveArgs {
  std::string relaxed;
  std::string mode = "sync";
  SimArgs sim;
  std::optional<std::size_t> primal_agents, dual_agents;
  std::string out_dir = ".";
};

granmilp::StepSizes resolve_steps(const granmilp::RelaxedProblem& P, const SimArgs& s) {
  granmilp::StepSizes st = granmilp::default_steps(P);
  if (s.gamma) st.gamma = *s.gamma;
  if (s.beta) st.beta = *s.beta;
  return st;
}

int cmd_solve(const SolveArgs& a) {
  Manifest man{"solve", {a.relaxed}};
  const auto loaded = granmilp::io::load_relaxed(a.relaxed);
  const granmilp::RelaxedProblem& P = loaded.problem;
  const granmilp::StepSizes steps = resolve_steps(P, a.sim);

  granmilp::SolveSettings ref_settings;
  ref_settings.steps = granmilp::default_steps(P);
  const granmilp::SaddleSolution ref = granmilp::solve(P, ref_settings);

  granmilp::SimTrace trace;
  granmilp::io::RunSummary run;
  run.mode = a.mode;
  run.gamma = steps.gamma;
  run.beta = steps.beta;
  run.reference_residual = ref.residual;
  run.reference_iters = ref.iters;
  Json cfg{{"mode", a.mode}, {"gamma", steps.gamma}, {"beta", steps.beta}};
  if (a.mode == "sync") {
    granmilp::SolveSettings s;
    s.steps = steps;
    long iters = a.sim.iters.value_or(0);
    if (!a.sim.iters) iters = steps.gamma == ref_settings.steps.gamma && steps.beta == ref_settings.steps.beta
                                  ? ref.iters
                                  : granmilp::solve(P, s).iters;
    trace = granmilp::trace_sync(P, s, ref, iters);
    run.epoch_gap = 1;
    cfg["iters"] = iters;
  } else if (a.mode == "async") {
    granmilp::SimConfig sc;
    sc.B = a.sim.B;
    sc.comp_rate = a.sim.comp_rate;
    sc.comm_rate = a.sim.comm_rate;
    sc.seed = a.sim.seed;
    sc.total_ticks = a.sim.iters.value_or(10000);
    sc.steps = steps;
    const std::size_t np = std::min(a.primal_agents.value_or(P.dim()), P.dim());
    const std::size_t nd = std::min(a.dual_agents.value_or(P.rows()), P.rows());
    if (np == 0 || (P.rows() > 0 && nd == 0)) throw granmilp::Error(granmilp::ErrorKind::Validation, "agent counts must be positive");
    const granmilp::BlockPartition part =
        granmilp::make_partition(P.A, granmilp::split_even(P.dim(), np), granmilp::split_even(P.rows(), nd));
    trace = granmilp::simulate(P, part, sc, ref);
    run.epoch_gap = 1;
    cfg["B"] = sc.B;
    cfg["comp_rate"] = sc.comp_rate;
    cfg["comm_rate"] = sc.comm_rate;
    cfg["ticks"] = sc.total_ticks;
    cfg["primal_agents"] = np;
    cfg["dual_agents"] = nd;
    man.seed = sc.seed;
  } else {
    throw granmilp::Error(granmilp::ErrorKind::Validation, "--mode must be sync or async");
  }
  run.lambda0_dist = trace.lambda0_dist;
  run.primal_ratios = trace.primal_ratios;
  man.config = cfg;

  const fs::path dir = a.out_dir;
  emit(man, dir / "trace.csv", granmilp::io::trace_to_csv(trace.records));
  emit(man, dir / "solution.json", granmilp::io::dump(granmilp::io::solution_to_json(P, trace, ref, run)));
  emit(man, dir / "plot.svg", granmilp::io::trace_svg("solve (" + a.mode + ")", trace.records));
  man.write(dir);

  std::cout << "rounded cost: " << granmilp::io::format_real(granmilp::milp_cost(P.milp, trace.rounded)) << "\n";
  std::cout << "rounded output " << (trace.certificate.feasible ? "feasible" : "INFEASIBLE") << "\n";
  for (const auto& v : trace.certificate.violations) std::cout << "  " << v.describe() << "\n";
  if (!trace.records.empty())
    std::cout << "final distance to saddle point: " << granmilp::io::format_real(trace.records.back().dist_primal) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  std::string trace, relaxed;
  std::optional<std::string> solution;
  std::optional<double> sigma;
  long samples = 10000;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

int cmd_analyze(const AnalyzeArgs& a) {
  const fs::path solution_path = a.solution ? fs::path(*a.solution) : fs::path(a.trace).parent_path() / "solution.json";
  Manifest man{"analyze", {a.trace, a.relaxed, solution_path.generic_string()}};
  const auto records = granmilp::io::load_trace(a.trace);
  const auto loaded = granmilp::io::load_relaxed(a.relaxed);
  const granmilp::RelaxedProblem& P = loaded.problem;
  const Json sol = granmilp::io::parse_json_text(granmilp::io::read_file(solution_path));
  const granmilp::io::RunSummary run = granmilp::io::run_summary_from_json(sol);
  if (run.primal_ratios.size() != records.size())
    throw granmilp::ParseError("trace has " + std::to_string(records.size()) + " rows but the solution lists " +
                               std::to_string(run.primal_ratios.size()) + " epochs");

  double sigma = 0.0;
  if (a.sigma) {
    if (!(*a.sigma > 0.0)) throw granmilp::Error(granmilp::ErrorKind::Validation, "--sigma must be positive");
    sigma = *a.sigma;
  } else {
    sigma = granmilp::hoffman_estimate(P.milp, a.samples, a.seed).sigma;
  }
  granmilp::BoundsReport rep = granmilp::evaluate_bounds(P, records, run.primal_ratios, run.lambda0_dist, run.beta,
                                                         sigma, a.sigma.has_value(), run.epoch_gap);
  std::vector<double> z_hat;
  for (const auto& v : sol.at("reference").at("z_hat")) z_hat.push_back(v.get<double>());
  if (z_hat.size() == P.dim()) {
    rep.measured_tightened_violation = granmilp::max_violation(P, z_hat, P.phi);
    const granmilp::LpResult lp = granmilp::relaxed_lp_optimum(P);
    if (lp.status == granmilp::LpStatus::Optimal) rep.measured_reg_gap = std::abs(granmilp::dot(P.c, z_hat) - lp.objective);
  }

  man.config = Json{{"sigma", a.sigma ? Json(*a.sigma) : Json(nullptr)}, {"samples", a.samples}};
  man.seed = a.seed;
  const fs::path dir = a.out_dir;
  emit(man, dir / "bounds.json", granmilp::io::dump(granmilp::io::bounds_to_json(rep)));
  {
    std::vector<double> epochs;
    for (const auto& r : records) epochs.push_back(static_cast<double>(r.epoch));
    std::vector<granmilp::io::Series> ser{{"dual_squared", rep.dual_measured, true},
                                         {"dual_squared_envelope", rep.dual_envelope, true},
                                         {"primal", rep.primal_measured, true},
                                         {"primal_envelope", rep.primal_envelope, true}};
    emit(man, dir / "envelopes.svg", granmilp::io::line_chart_svg("distance envelopes", "epoch", epochs, ser));
  }
  man.write(dir);

  std::cout << "sigma (" << rep.sigma_source << "): " << granmilp::io::format_real(sigma) << "\n";
  std::cout << "total suboptimality bound: " << granmilp::io::format_real(rep.total_bound) << "\n";
  std::cout << "q_d: " << granmilp::io::format_real(rep.q_d) << "  q_p (measured): " << granmilp::io::format_real(rep.q_p_hat) << "\n";
  if (!rep.violations.empty()) {
    for (const auto& v : rep.violations)
      std::cerr << v.which << " envelope violated at epoch " << v.epoch << ": " << granmilp::io::format_real(v.measured)
                << " > " << granmilp::io::format_real(v.bound) << "\n";
    return kExitEnvelope;
  }
  std::cout << "all envelopes hold\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::size_t agents = 20, tasks = 20, dual_agents = 14;
  std::uint64_t instance_seed = 7;
  std::uint64_t seed = 1;
  double alpha = 1.0, delta = 0.1;
  std::optional<double> phi = 0.25, xi;
  double gamma_scale = 50.0;
  std::optional<double> gamma, beta;
  int B = 5;
  long iters = 100000;
  std::vector<double> comm_rates{1.0, 0.75, 0.5, 0.1};
  std::vector<double> comp_rates{1.0, 0.75, 0.5, 0.1};
  std::vector<double> phi_inflations{0.0, 0.1, 0.2, 0.4};
  bool lemma_phi = false;
  std::string out_dir = ".";
};

std::string rate_label(const char* kind, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%g", kind, v);
  return buf;
}

int cmd_bench_gap(const BenchArgs& a) {
  Manifest man("bench-gap", {});
  granmilp::GapSpec spec;
  spec.agents = a.agents;
  spec.tasks = a.tasks;
  spec.seed = a.instance_seed;

  granmilp::BenchSettings bs;
  bs.relax.alpha = a.alpha;
  bs.relax.delta = a.delta;
  bs.relax.xi = a.xi;
  if (!a.lemma_phi) bs.relax.phi = a.phi;
  bs.dual_agents = a.dual_agents;
  bs.gamma_scale = a.gamma_scale;

  std::vector<granmilp::BenchRun> runs;
  auto base = [&] {
    granmilp::BenchRun r;
    r.sim.B = a.B;
    r.sim.total_ticks = a.iters;
    r.sim.seed = a.seed;
    return r;
  };
  for (double v : a.comm_rates) {
    auto r = base();
    r.label = rate_label("comm", v);
    r.sim.comm_rate = v;
    runs.push_back(r);
  }
  for (double v : a.comp_rates) {
    auto r = base();
    r.label = rate_label("comp", v);
    r.sim.comp_rate = v;
    runs.push_back(r);
  }
  for (double v : a.phi_inflations) {
    auto r = base();
    r.label = rate_label("phi_inflation", v);
    r.phi_inflation = v;
    runs.push_back(r);
  }
  if (a.gamma || a.beta) {
    // Explicit steps need the relaxed problem for whichever of the two is defaulted.
    granmilp::RelaxOptions ro = bs.relax;
    if (!ro.xi) ro.xi = granmilp::gap_xi(spec.tasks);
    for (auto& r : runs) {
      ro.phi_inflation = r.phi_inflation;
      const granmilp::RelaxedProblem P = granmilp::build_relaxation(granmilp::generate_gap(spec), ro);
      r.sim.steps = granmilp::default_steps(P, a.gamma_scale);
      if (a.gamma) r.sim.steps.gamma = *a.gamma;
      if (a.beta) r.sim.steps.beta = *a.beta;
    }
  }

  const auto out = granmilp::run_experiment(spec, runs, bs);

  man.seed = a.seed;
  man.config = Json{{"agents", a.agents},
                    {"tasks", a.tasks},
                    {"dual_agents", a.dual_agents},
                    {"instance_seed", a.instance_seed},
                    {"alpha", a.alpha},
                    {"delta", a.delta},
                    {"phi", a.lemma_phi || !a.phi ? Json(nullptr) : Json(*a.phi)},
                    {"xi", granmilp::io::number(a.xi.value_or(granmilp::gap_xi(a.tasks)))},
                    {"gamma_scale", a.gamma_scale},
                    {"B", a.B},
                    {"ticks", a.iters},
                    {"comm_rates", a.comm_rates},
                    {"comp_rates", a.comp_rates},
                    {"phi_inflations", a.phi_inflations},
                    {"distance_tolerance", bs.distance_tolerance}};

  const fs::path dir = a.out_dir;
  std::string csv = "label,comm_rate,comp_rate,phi_inflation,phi,gamma,beta,first_feasible_epoch,ticks_to_tolerance,"
                    "final_dist_primal,final_dist_dual,final_cost,rounded_cost,final_feasible\n";
  Json summary = Json::array();
  for (const auto& o : out) {
    using granmilp::io::format_real;
    csv += o.label + ',' + format_real(o.run.sim.comm_rate) + ',' + format_real(o.run.sim.comp_rate) + ',' +
           format_real(o.run.phi_inflation) + ',' + format_real(o.phi) + ',' + format_real(o.steps.gamma) + ',' +
           format_real(o.steps.beta) + ',' + std::to_string(o.first_feasible_epoch) + ',' +
           std::to_string(o.ticks_to_tolerance) + ',' + format_real(o.final_dist_primal) + ',' +
           format_real(o.final_dist_dual) + ',' + format_real(o.final_cost) + ',' + format_real(o.rounded_cost) + ',' +
           (o.final_feasible ? "1" : "0") + '\n';
    summary.push_back(Json{{"label", o.label},
                           {"comm_rate", o.run.sim.comm_rate},
                           {"comp_rate", o.run.sim.comp_rate},
                           {"phi_inflation", o.run.phi_inflation},
                           {"phi", o.phi},
                           {"gamma", o.steps.gamma},
                           {"beta", o.steps.beta},
                           {"first_feasible_epoch", o.first_feasible_epoch},
                           {"ticks_to_tolerance", o.ticks_to_tolerance},
                           {"final_dist_primal", o.final_dist_primal},
                           {"final_dist_dual", o.final_dist_dual},
                           {"final_cost", o.final_cost},
                           {"rounded_cost", o.rounded_cost},
                           {"final_feasible", o.final_feasible}});
    emit(man, dir / "traces" / (o.label + ".csv"), granmilp::io::trace_to_csv(o.trace.records));
    emit(man, dir / "traces" / (o.label + ".svg"), granmilp::io::trace_svg(o.label, o.trace.records));
  }
  emit(man, dir / "summary.csv", csv);
  emit(man, dir / "summary.json", granmilp::io::dump(summary));
  man.write(dir);

  std::cout << csv;
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct OracleArgs {
  std::string problem;
  double max_points = 1e7;
  std::string out_dir = ".";
};

int cmd_oracle(const OracleArgs& a) {
  Manifest man{"oracle", {a.problem}};
  const granmilp::MilpInstance milp = granmilp::io::load_problem(a.problem);
  const granmilp::OracleResult res = granmilp::brute_force_milp(milp, a.max_points);
  man.config = Json{{"max_points", a.max_points}};
  Json j{{"cost", res.cost}, {"y", res.z_star.y}, {"enumerated", res.enumerated}};
  const fs::path dir = a.out_dir;
  emit(man, dir / "oracle.json", granmilp::io::dump(j));
  man.write(dir);
  std::cout << "optimal cost: " << granmilp::io::format_real(res.cost) << "\n";
  std::cout << "y: " << join(res.z_star.y) << "\n";
  return kExitOk;
}

void add_sim_flags(CLI::App* sub, SimArgs& s) {
  sub->add_option("--gamma", s.gamma, "primal step");
  sub->add_option("--beta", s.beta, "dual step");
  sub->add_option("--B", s.B, "partial asynchrony bound in ticks")->check(CLI::PositiveNumber);
  sub->add_option("--comp-rate", s.comp_rate, "per-tick chance a primal agent computes")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--comm-rate", s.comm_rate, "chance a primal transmission is fresh")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--seed", s.seed, "schedule seed");
  sub->add_option("--iters", s.iters, "sync: iterations to trace; async: ticks");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Granularity-based MILP relaxation with (a)synchronous saddle-point solving"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RelaxArgs relax;
  auto* r = app.add_subcommand("relax", "build the tightened relaxation and certify granularity");
  r->add_option("problem", relax.problem, "problem JSON")->required();
  r->add_option("--xi", relax.xi, "enlargement in [xi_e, 1)");
  r->add_option("--alpha", relax.alpha, "primal regularization");
  r->add_option("--delta", relax.delta, "dual regularization");
  r->add_option("--phi", relax.phi, "fixed tightening instead of the bound");
  r->add_option("--phi-inflation", relax.phi_inflation, "added to the tightening");
  r->add_option("--out-dir", relax.out_dir);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "compute the regularized saddle point and round it");
  s->add_option("relaxed", solve.relaxed, "relaxed.json from relax")->required();
  s->add_option("--mode", solve.mode)->check(CLI::IsMember({"sync", "async"}));
  add_sim_flags(s, solve.sim);
  s->add_option("--primal-agents", solve.primal_agents, "async: primal blocks (default one per variable)");
  s->add_option("--dual-agents", solve.dual_agents, "async: dual blocks (default one per row)");
  s->add_option("--out-dir", solve.out_dir);

  AnalyzeArgs analyze;
  auto* an = app.add_subcommand("analyze", "evaluate bounds and check the convergence envelopes");
  an->add_option("trace", analyze.trace, "trace.csv from solve")->required();
  an->add_option("relaxed", analyze.relaxed, "relaxed.json")->required();
  an->add_option("--solution", analyze.solution, "solution.json (default: next to the trace)");
  an->add_option("--sigma", analyze.sigma, "Hoffman constant override");
  an->add_option("--samples", analyze.samples, "samples for the Hoffman estimate");
  an->add_option("--seed", analyze.seed, "sampling seed");
  an->add_option("--out-dir", analyze.out_dir);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench-gap", "generalized assignment benchmark sweeps");
  b->add_option("--agents", bench.agents);
  b->add_option("--tasks", bench.tasks);
  b->add_option("--dual-agents", bench.dual_agents);
  b->add_option("--instance-seed", bench.instance_seed);
  b->add_option("--seed", bench.seed, "schedule seed shared by all runs");
  b->add_option("--xi", bench.xi);
  b->add_option("--alpha", bench.alpha);
  b->add_option("--delta", bench.delta);
  b->add_option("--phi", bench.phi, "fixed tightening");
  b->add_flag("--lemma-phi", bench.lemma_phi, "use the tightening bound instead of --phi");
  b->add_option("--gamma-scale", bench.gamma_scale, "default primal step 1/(alpha + scale*|A|)");
  b->add_option("--gamma", bench.gamma);
  b->add_option("--beta", bench.beta);
  b->add_option("--B", bench.B)->check(CLI::PositiveNumber);
  b->add_option("--iters", bench.iters, "ticks per run");
  b->add_option("--comm-rate", bench.comm_rates, "comma-separated sweep")->delimiter(',');
  b->add_option("--comp-rate", bench.comp_rates, "comma-separated sweep")->delimiter(',');
  b->add_option("--phi-inflation", bench.phi_inflations, "comma-separated sweep")->delimiter(',');
  b->add_option("--out-dir", bench.out_dir);

  OracleArgs oracle;
  auto* o = app.add_subcommand("oracle", "brute-force optimum of a small pure-integer problem");
  o->add_option("problem", oracle.problem)->required();
  o->add_option("--max-points", oracle.max_points);
  o->add_option("--out-dir", oracle.out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*r) return cmd_relax(relax);
    if (*s) return cmd_solve(solve);
    if (*an) return cmd_analyze(analyze);
    if (*b) return cmd_bench_gap(bench);
    if (*o) return cmd_oracle(oracle);
  } catch (const granmilp::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const granmilp::SlaterInfeasible& e) {
    std::cerr << "error: " << e.what() << "\nbest margin: " << granmilp::io::format_real(e.best_margin()) << "\n";
    return kExitNotGranular;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
