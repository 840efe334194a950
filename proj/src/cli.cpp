#include "dspdhg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "dspdhg/instances.hpp"
#include "dspdhg/problem_io.hpp"
#include "dspdhg/restart.hpp"

namespace dspdhg::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

SaddleProblem load_problem(const ProblemSource& src) {
  const int sources = (!src.problem_path.empty() ? 1 : 0) + (!src.libsvm_path.empty() ? 1 : 0) +
                      (src.mpc ? 1 : 0);
  if (sources != 1)
    throw std::invalid_argument("exactly one problem source is required (problem file, libsvm, or mpc)");
  if (!src.problem_path.empty()) return read_problem_file(src.problem_path);
  if (!src.libsvm_path.empty()) return build_svm(load_libsvm(src.libsvm_path), src.svm_c);
  return build_mpc(src.mpc_seed, src.mpc_nx, src.mpc_nu, src.mpc_horizon);
}

RestartPolicy parse_restart(const std::string& s) {
  if (s == "none") return RestartPolicy::none();
  if (s.rfind("fixed:", 0) == 0) {
    const long K = std::stol(s.substr(6));
    return RestartPolicy::fixed(K);
  }
  if (s == "adaptive") return RestartPolicy::adaptive();
  if (s.rfind("adaptive:", 0) == 0) return RestartPolicy::adaptive(std::stod(s.substr(9)));
  throw std::invalid_argument("unknown restart policy '" + s + "' (none | fixed:<K> | adaptive[:<f>])");
}

StepMode parse_step_mode(const std::string& s) {
  if (s == "practical") return StepMode::practical;
  if (s == "certified") return StepMode::certified;
  throw std::invalid_argument("unknown step mode '" + s + "' (practical | certified)");
}

void apply_method(const std::string& method, double& p, double& q) {
  if (method == "pdhg") {
    p = 1.0;
    q = 1.0;
  } else if (method == "spdhg") {
    p = 1.0;
  } else if (method != "dspdhg") {
    throw std::invalid_argument("unknown method '" + method + "' (pdhg | spdhg | dspdhg)");
  }
}

struct PreparedRun {
  SamplingPlan plan;
  NormReport norms;
  StepSizes steps;
  RestartPolicy policy;
  RunOptions options;
  std::shared_ptr<ReferencePoint> reference;  // stable address for the gap center
};

PreparedRun prepare(const SaddleProblem& problem, const RunConfig& cfg) {
  PreparedRun prep;
  double p = cfg.p;
  double q = cfg.q;
  apply_method(cfg.method, p, q);
  prep.plan = make_sampling_plan(problem.A.col_blocks(), problem.A.row_blocks(), p, q, cfg.seed);
  prep.norms = compute_norms(problem.A, prep.plan.r, prep.plan.s, cfg.enum_budget);
  prep.steps = compute_stepsizes(prep.norms, prep.plan.p, prep.plan.q, parse_step_mode(cfg.step_mode));
  prep.policy = parse_restart(cfg.restart);

  prep.options.budget = cfg.budget;
  prep.options.relkkt_target = cfg.target;
  prep.options.cadence = cfg.cadence;
  prep.options.refresh_interval = cfg.refresh_interval;
  prep.options.ref_step = 1.0 / prep.norms.lambda;
  prep.options.reference_objective = cfg.ref_objective;
  prep.options.smoothed_gap_mu = cfg.smoothed_gap_mu;

  if (!cfg.reference_path.empty()) {
    prep.reference = std::make_shared<ReferencePoint>(read_reference_file(cfg.reference_path));
    if (static_cast<int>(prep.reference->z.x.size()) != problem.A.cols() ||
        static_cast<int>(prep.reference->z.y.size()) != problem.A.rows())
      throw std::invalid_argument("reference point dimensions do not match the problem");
    if (!prep.options.reference_objective)
      prep.options.reference_objective = prep.reference->objective;
    prep.options.smoothed_gap_center = &prep.reference->z;
  }
  if (!cfg.init_path.empty()) {
    const ReferencePoint init = read_reference_file(cfg.init_path);
    if (static_cast<int>(init.z.x.size()) != problem.A.cols() ||
        static_cast<int>(init.z.y.size()) != problem.A.rows())
      throw std::invalid_argument("init point dimensions do not match the problem");
    prep.options.x0 = init.z.x;
    prep.options.y0 = init.z.y;
  }
  return prep;
}

void write_csv(std::ostream& out, const SaddleProblem& problem, const RunConfig& cfg,
               const PreparedRun& prep, const RunResult& result) {
  const bool has_infeas = !problem.f.empty();
  const bool has_rel_error = prep.options.reference_objective.has_value() && has_infeas;
  const bool has_sg = prep.options.smoothed_gap_mu.has_value();

  out << "# run log\n";
  out << "# problem = " << problem.name << "\n";
  out << "# rows = " << problem.A.rows() << ", cols = " << problem.A.cols()
      << ", nnz = " << problem.A.nnz() << ", row_blocks = " << problem.A.row_blocks()
      << ", col_blocks = " << problem.A.col_blocks() << "\n";
  out << "# method = " << cfg.method << ", step_mode = " << cfg.step_mode << ", restart = "
      << cfg.restart << "\n";
  out << "# p_requested = " << fmt(cfg.p) << ", q_requested = " << fmt(cfg.q) << "\n";
  out << "# s = " << prep.plan.s << ", r = " << prep.plan.r << ", p = " << fmt(prep.plan.p)
      << ", q = " << fmt(prep.plan.q) << "\n";
  out << "# tau = " << fmt(prep.steps.tau) << ", sigma = " << fmt(prep.steps.sigma)
      << ", gamma1_sq = " << fmt(prep.steps.gamma1_sq) << ", gamma2_sq = "
      << fmt(prep.steps.gamma2_sq) << "\n";
  out << "# lambda = " << fmt(prep.norms.lambda) << " (exact = " << prep.norms.lambda_exact
      << "), lambda_r = " << fmt(prep.norms.lambda_r) << " (exact = " << prep.norms.lambda_r_exact
      << "), lambda_rs = " << fmt(prep.norms.lambda_rs) << " (exact = "
      << prep.norms.lambda_rs_exact << "), power_iterations = " << prep.norms.iterations_used
      << "\n";
  out << "# seed = " << cfg.seed << ", budget = " << fmt(cfg.budget) << ", target = "
      << fmt(cfg.target) << ", cadence = " << fmt(cfg.cadence) << ", refresh_interval = "
      << cfg.refresh_interval << ", enum_budget = " << cfg.enum_budget << "\n";
  out << "# init = " << (cfg.init_path.empty() ? std::string("zero") : cfg.init_path) << "\n";
  out << "# reference_objective = "
      << (prep.options.reference_objective ? fmt(*prep.options.reference_objective)
                                           : std::string("none"))
      << "\n";
  out << "# smoothed_gap_mu = "
      << (has_sg ? fmt(*prep.options.smoothed_gap_mu) : std::string("none")) << ", center = "
      << (prep.options.smoothed_gap_center != nullptr ? "reference" : "iterate") << "\n";
  out << "# kkt_ref_step = " << fmt(prep.options.ref_step) << "\n";
  out << "# cost unit = one matvec plus one adjoint matvec; an iteration charges touched_nnz / "
         "(2 nnz); a restart charges 1 for its cache rebuild\n";

  out << "cost_units,iteration,epoch,relkkt";
  if (has_rel_error) out << ",rel_error";
  if (has_infeas) out << ",infeasibility";
  if (has_sg) out << ",smoothed_gap";
  out << ",wall_seconds,restart\n";

  char wall[32];
  for (const IterationRecord& rec : result.records) {
    out << fmt(rec.cost_units) << "," << rec.iteration << "," << rec.epoch << ","
        << fmt(rec.relkkt);
    if (has_rel_error) out << "," << (rec.rel_error ? fmt(*rec.rel_error) : std::string());
    if (has_infeas) out << "," << (rec.infeasibility ? fmt(*rec.infeasibility) : std::string());
    if (has_sg) out << "," << (rec.smoothed_gap ? fmt(*rec.smoothed_gap) : std::string());
    std::snprintf(wall, sizeof(wall), "%.6f", rec.wall_seconds);
    out << "," << wall << "," << (rec.restart ? 1 : 0) << "\n";
  }
}

ReferencePoint solve_reference(const SaddleProblem& problem, double tol, double budget,
                               std::int64_t enum_budget) {
  const SamplingPlan plan =
      make_sampling_plan(problem.A.col_blocks(), problem.A.row_blocks(), 1.0, 1.0, 0);
  const NormReport norms = compute_norms(problem.A, plan.r, plan.s, enum_budget);
  const StepSizes steps = compute_stepsizes(norms, 1.0, 1.0, StepMode::practical);

  RunOptions options;
  options.budget = budget;
  options.relkkt_target = tol;
  options.cadence = 1.0;
  options.ref_step = 1.0 / norms.lambda;
  const RunResult result =
      run_solver(problem, steps, plan, RestartPolicy::adaptive(0.8), options);

  ReferencePoint ref;
  ref.z = result.final_point;
  ref.relkkt = result.final_relkkt;
  ref.certified = result.reached_target;
  const ObjectiveReport obj = primal_objective(problem, ref.z.x);
  ref.objective = obj.value ? *obj.value : saddle_value(problem, ref.z.x, ref.z.y);
  return ref;
}

double cost_to_threshold(const RunResult& result, double threshold, bool use_rel_error) {
  if (!(threshold > 0.0)) return kInf;
  for (const IterationRecord& rec : result.records) {
    const double v = use_rel_error ? (rec.rel_error ? *rec.rel_error : kInf) : rec.relkkt;
    if (v <= threshold) return rec.cost_units;
  }
  return kInf;
}

double nearest_rank(std::vector<double> v, double frac) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const std::size_t rank = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(frac * static_cast<double>(n))));
  return v[std::min(rank, n) - 1];
}

}  // namespace

int solve_command(const RunConfig& cfg, std::ostream& report) {
  SaddleProblem problem;
  PreparedRun prep;
  try {
    problem = load_problem(cfg.source);
    prep = prepare(problem, cfg);
  } catch (const std::exception& e) {
    report << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  RunResult result;
  try {
    result = run_solver(problem, prep.steps, prep.plan, prep.policy, prep.options);
  } catch (const std::exception& e) {
    report << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }

  try {
    if (cfg.out_csv.empty()) {
      write_csv(std::cout, problem, cfg, prep, result);
    } else {
      std::ofstream out(cfg.out_csv);
      if (!out) throw std::runtime_error("cannot write " + cfg.out_csv);
      write_csv(out, problem, cfg, prep, result);
    }
  } catch (const std::exception& e) {
    report << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  report << "solve: " << problem.name << " method=" << cfg.method << " restart=" << cfg.restart
         << " cost=" << fmt(result.cost_units) << " iterations=" << result.iterations
         << " epochs=" << result.epochs << " relkkt=" << fmt(result.final_relkkt) << "\n";
  if (cfg.target > 0.0 && !result.reached_target) {
    report << "target " << fmt(cfg.target) << " not reached within budget\n";
    return kExitBudget;
  }
  return kExitOk;
}

int compare_command(const CompareConfig& cfg, std::ostream& report) {
  SaddleProblem problem;
  try {
    problem = load_problem(cfg.base.source);
    if (cfg.methods.empty() || cfg.restarts.empty() || cfg.seeds.empty())
      throw std::invalid_argument("compare needs nonempty methods, restarts and seeds");
    for (const std::string& m : cfg.methods) {
      double p = 1, q = 1;
      apply_method(m, p, q);
    }
    for (const std::string& r : cfg.restarts) parse_restart(r);
  } catch (const std::exception& e) {
    report << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::optional<double> ref_obj = cfg.base.ref_objective;
  try {
    if (!ref_obj && !cfg.base.reference_path.empty())
      ref_obj = read_reference_file(cfg.base.reference_path).objective;
    if (!ref_obj && cfg.rel_error_target > 0.0) {
      const ReferencePoint ref = solve_reference(
          problem, std::min(1e-10, 1e-3 * cfg.rel_error_target), 200000.0, cfg.base.enum_budget);
      ref_obj = ref.objective;
      report << "computed reference objective = " << fmt(ref.objective)
             << " (relkkt = " << fmt(ref.relkkt) << ", certified = " << ref.certified << ")\n";
    }
  } catch (const std::exception& e) {
    report << "numerical failure: reference solve: " << e.what() << "\n";
    return kExitNumerical;
  }

  struct Cell {
    std::string method, restart;
    std::uint64_t seed;
    double cost_kkt = kInf, cost_rel = kInf, final_relkkt = kInf, final_rel = kInf;
    std::uint64_t iterations = 0;
    int epochs = 0;
    bool failed = false;
  };
  std::vector<Cell> cells;
  int failures = 0;

  for (const std::string& method : cfg.methods) {
    for (const std::string& restart : cfg.restarts) {
      for (std::uint64_t seed : cfg.seeds) {
        RunConfig cc = cfg.base;
        cc.method = method;
        cc.restart = restart;
        cc.seed = seed;
        cc.ref_objective = ref_obj;
        std::string tag = restart;
        std::replace(tag.begin(), tag.end(), ':', '-');
        cc.out_csv = cfg.out_dir + "/" + method + "_" + tag + "_seed" + std::to_string(seed) + ".csv";

        Cell cell{method, restart, seed};
        try {
          const PreparedRun prep = prepare(problem, cc);
          const RunResult result = run_solver(problem, prep.steps, prep.plan, prep.policy,
                                              prep.options);
          std::ofstream out(cc.out_csv);
          if (!out) throw std::runtime_error("cannot write " + cc.out_csv);
          write_csv(out, problem, cc, prep, result);
          cell.cost_kkt = cost_to_threshold(result, cfg.base.target, false);
          cell.cost_rel = cost_to_threshold(result, cfg.rel_error_target, true);
          cell.final_relkkt = result.final_relkkt;
          const auto& last = result.records.back();
          cell.final_rel = last.rel_error ? *last.rel_error : kInf;
          cell.iterations = result.iterations;
          cell.epochs = result.epochs;
        } catch (const std::exception& e) {
          cell.failed = true;
          ++failures;
          report << "cell " << method << "/" << restart << "/seed" << seed
                 << " failed: " << e.what() << "\n";
        }
        cells.push_back(cell);
      }
    }
  }
  if (failures == static_cast<int>(cells.size())) {
    report << "numerical failure: every cell failed\n";
    return kExitNumerical;
  }

  const std::string table_path = cfg.out_dir + "/comparison.csv";
  std::ofstream out(table_path);
  if (!out) {
    report << "config error: cannot write " << table_path << "\n";
    return kExitConfig;
  }
  out << "# compare table\n";
  out << "# problem = " << problem.name << "\n";
  out << "# budget = " << fmt(cfg.base.budget) << ", kkt_target = " << fmt(cfg.base.target)
      << ", rel_error_target = " << fmt(cfg.rel_error_target) << ", reference_objective = "
      << (ref_obj ? fmt(*ref_obj) : std::string("none")) << "\n";
  out << "method,restart,seed,cost_to_kkt,cost_to_rel_error,final_relkkt,final_rel_error,"
         "iterations,epochs,status\n";

  auto emit_cell = [&out](const Cell& c) {
    out << c.method << "," << c.restart << "," << c.seed << "," << fmt(c.cost_kkt) << ","
        << fmt(c.cost_rel) << "," << fmt(c.final_relkkt) << "," << fmt(c.final_rel) << ","
        << c.iterations << "," << c.epochs << "," << (c.failed ? "failed" : "ok") << "\n";
  };
  for (const std::string& method : cfg.methods) {
    for (const std::string& restart : cfg.restarts) {
      std::vector<double> ck, cr, fk;
      for (const Cell& c : cells)
        if (c.method == method && c.restart == restart) {
          emit_cell(c);
          if (!c.failed) {
            ck.push_back(c.cost_kkt);
            cr.push_back(c.cost_rel);
            fk.push_back(c.final_relkkt);
          }
        }
      if (ck.empty()) continue;
      out << method << "," << restart << ",median," << fmt(nearest_rank(ck, 0.5)) << ","
          << fmt(nearest_rank(cr, 0.5)) << "," << fmt(nearest_rank(fk, 0.5)) << ",,,,summary\n";
      out << method << "," << restart << ",iqr,"
          << fmt(nearest_rank(ck, 0.75) - nearest_rank(ck, 0.25)) << ","
          << fmt(nearest_rank(cr, 0.75) - nearest_rank(cr, 0.25)) << ","
          << fmt(nearest_rank(fk, 0.75) - nearest_rank(fk, 0.25)) << ",,,,summary\n";
    }
  }
  report << "compare: wrote " << table_path << " (" << cells.size() << " cells, " << failures
         << " failed)\n";
  return kExitOk;
}

int reference_command(const ReferenceConfig& cfg, std::ostream& report) {
  SaddleProblem problem;
  try {
    problem = load_problem(cfg.source);
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  } catch (const std::exception& e) {
    report << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  ReferencePoint ref;
  try {
    ref = solve_reference(problem, cfg.tol, cfg.budget, cfg.enum_budget);
  } catch (const std::exception& e) {
    report << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }

  try {
    if (cfg.out_path.empty()) {
      write_reference(std::cout, ref);
    } else {
      write_reference_file(cfg.out_path, ref);
    }
  } catch (const std::exception& e) {
    report << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  report << "reference: " << problem.name << " objective = " << fmt(ref.objective)
         << " relkkt = " << fmt(ref.relkkt) << " certified = " << ref.certified << "\n";
  return ref.certified ? kExitOk : kExitBudget;
}

int gen_mpc_command(const GenMpcConfig& cfg, std::ostream& report) {
  try {
    const SaddleProblem problem = build_mpc(cfg.seed, cfg.nx, cfg.nu, cfg.horizon);
    if (cfg.out_path.empty()) {
      write_problem(std::cout, problem);
    } else {
      write_problem_file(cfg.out_path, problem);
    }
    report << "generated " << problem.name << " (rows = " << problem.A.rows()
           << ", cols = " << problem.A.cols() << ", nnz = " << problem.A.nnz() << ")\n";
  } catch (const std::exception& e) {
    report << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

int norms_command(const NormsConfig& cfg, std::ostream& report) {
  try {
    const SaddleProblem problem = load_problem(cfg.source);
    const SamplingPlan plan =
        make_sampling_plan(problem.A.col_blocks(), problem.A.row_blocks(), cfg.p, cfg.q, 0);
    const NormReport norms = compute_norms(problem.A, plan.r, plan.s, cfg.enum_budget);
    report << "problem = " << problem.name << "\n";
    report << "rows = " << problem.A.rows() << ", cols = " << problem.A.cols()
           << ", nnz = " << problem.A.nnz() << ", row_blocks = " << problem.A.row_blocks()
           << ", col_blocks = " << problem.A.col_blocks() << "\n";
    report << "r = " << plan.r << ", s = " << plan.s << " (p = " << fmt(plan.p)
           << ", q = " << fmt(plan.q) << ")\n";
    report << "lambda = " << fmt(norms.lambda) << " exact = " << norms.lambda_exact << "\n";
    report << "lambda_r = " << fmt(norms.lambda_r) << " exact = " << norms.lambda_r_exact << "\n";
    report << "lambda_rs = " << fmt(norms.lambda_rs) << " exact = " << norms.lambda_rs_exact
           << "\n";
    report << "power_iterations = " << norms.iterations_used << "\n";
  } catch (const std::exception& e) {
    report << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace dspdhg::cli
