#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dspdhg/cli.hpp"

namespace cli = dspdhg::cli;

namespace {

void add_source_flags(CLI::App* cmd, cli::ProblemSource& src) {
  auto* problem = cmd->add_option("--problem", src.problem_path, "problem file to load");
  auto* libsvm =
      cmd->add_option("--libsvm", src.libsvm_path, "LIBSVM dataset; builds the dual SVM instance");
  auto* mpc = cmd->add_flag("--mpc", src.mpc, "build a synthetic MPC instance in memory");
  problem->excludes(libsvm)->excludes(mpc);
  libsvm->excludes(mpc);
  cmd->add_option("--svm-c", src.svm_c, "SVM penalty parameter")->needs(libsvm);
  cmd->add_option("--mpc-nx", src.mpc_nx, "MPC state dimension")->needs(mpc);
  cmd->add_option("--mpc-nu", src.mpc_nu, "MPC input dimension")->needs(mpc);
  cmd->add_option("--mpc-horizon", src.mpc_horizon, "MPC horizon length")->needs(mpc);
  cmd->add_option("--mpc-seed", src.mpc_seed, "MPC generator seed")->needs(mpc);
}

void add_run_flags(CLI::App* cmd, cli::RunConfig& cfg) {
  cmd->add_option("--method", cfg.method, "pdhg | spdhg | dspdhg");
  cmd->add_option("-p,--p", cfg.p, "primal block sampling probability (dspdhg)");
  cmd->add_option("-q,--q", cfg.q, "dual block sampling probability (spdhg, dspdhg)");
  cmd->add_option("--step-mode", cfg.step_mode, "practical | certified");
  cmd->add_option("--budget", cfg.budget, "cost budget in matvec-pair units");
  cmd->add_option("--target", cfg.target, "stop once relkkt falls below this (0 = run out budget)");
  cmd->add_option("--cadence", cfg.cadence, "cost units between log rows");
  cmd->add_option("--refresh-interval", cfg.refresh_interval,
                  "iterations between cached-product rebuilds");
  cmd->add_option("--enum-budget", cfg.enum_budget,
                  "max subset pairs enumerated for the sampled-submatrix norms");
  cmd->add_option("--reference", cfg.reference_path,
                  "reference-point file: enables rel_error and centers the smoothed gap");
  cmd->add_option("--init", cfg.init_path, "reference-point file used as the starting point");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"block-coordinate primal-dual solver for convex-concave saddle-point problems"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI file");

  cli::RunConfig run_cfg;
  double run_ref_obj = 0.0, run_sg_mu = 0.0;
  auto* solve = app.add_subcommand("solve", "run one configuration and log its trajectory as CSV");
  add_source_flags(solve, run_cfg.source);
  add_run_flags(solve, run_cfg);
  solve->add_option("--restart", run_cfg.restart, "none | fixed:<K> | adaptive[:<factor>]");
  solve->add_option("--seed", run_cfg.seed, "sampling seed");
  auto* solve_ref_obj =
      solve->add_option("--ref-objective", run_ref_obj, "known optimal objective for rel_error");
  auto* solve_sg_mu =
      solve->add_option("--smoothed-gap-mu", run_sg_mu, "log the smoothed gap at this mu");
  solve->add_option("--out", run_cfg.out_csv, "CSV output path (default: stdout)");

  cli::CompareConfig cmp_cfg;
  double cmp_ref_obj = 0.0;
  auto* compare =
      app.add_subcommand("compare", "sweep methods x restarts x seeds and tabulate the costs");
  add_source_flags(compare, cmp_cfg.base.source);
  add_run_flags(compare, cmp_cfg.base);
  compare->add_option("--methods", cmp_cfg.methods, "methods to sweep")->delimiter(',');
  compare->add_option("--restarts", cmp_cfg.restarts, "restart policies to sweep")->delimiter(',');
  compare->add_option("--seeds", cmp_cfg.seeds, "sampling seeds to sweep")->delimiter(',');
  compare->add_option("--rel-error-target", cmp_cfg.rel_error_target,
                      "tabulate the cost of reaching this relative objective error");
  auto* cmp_ref_obj_opt = compare->add_option("--ref-objective", cmp_ref_obj,
                                              "known optimal objective for rel_error");
  compare->add_option("--out-dir", cmp_cfg.out_dir, "directory for the per-run and table CSVs");

  cli::ReferenceConfig ref_cfg;
  auto* reference = app.add_subcommand(
      "reference", "solve to high accuracy with restarted deterministic steps and save the point");
  add_source_flags(reference, ref_cfg.source);
  reference->add_option("--tol", ref_cfg.tol, "relkkt tolerance to certify");
  reference->add_option("--budget", ref_cfg.budget, "cost budget in matvec-pair units");
  reference->add_option("--enum-budget", ref_cfg.enum_budget, "norm enumeration cap");
  reference->add_option("--out", ref_cfg.out_path, "reference-point output path (default: stdout)");

  cli::GenMpcConfig mpc_cfg;
  auto* gen_mpc = app.add_subcommand("gen-mpc", "generate a synthetic MPC instance file");
  gen_mpc->add_option("--nx", mpc_cfg.nx, "state dimension");
  gen_mpc->add_option("--nu", mpc_cfg.nu, "input dimension");
  gen_mpc->add_option("--horizon", mpc_cfg.horizon, "horizon length");
  gen_mpc->add_option("--seed", mpc_cfg.seed, "generator seed");
  gen_mpc->add_option("--out", mpc_cfg.out_path, "problem output path (default: stdout)");

  cli::NormsConfig norms_cfg;
  auto* norms = app.add_subcommand("norms", "estimate the full and sampled-submatrix norms");
  add_source_flags(norms, norms_cfg.source);
  norms->add_option("-p,--p", norms_cfg.p, "primal block sampling probability");
  norms->add_option("-q,--q", norms_cfg.q, "dual block sampling probability");
  norms->add_option("--enum-budget", norms_cfg.enum_budget, "norm enumeration cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitConfig;
  }

  if (solve_ref_obj->count() > 0) run_cfg.ref_objective = run_ref_obj;
  if (solve_sg_mu->count() > 0) run_cfg.smoothed_gap_mu = run_sg_mu;
  if (cmp_ref_obj_opt->count() > 0) cmp_cfg.base.ref_objective = cmp_ref_obj;

  if (solve->parsed()) return cli::solve_command(run_cfg, std::cerr);
  if (compare->parsed()) return cli::compare_command(cmp_cfg, std::cerr);
  if (reference->parsed()) return cli::reference_command(ref_cfg, std::cerr);
  if (gen_mpc->parsed()) return cli::gen_mpc_command(mpc_cfg, std::cerr);
  if (norms->parsed()) return cli::norms_command(norms_cfg, std::cout);
  return cli::kExitConfig;
}
