#include "dspdhg/restart.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace dspdhg {

EpochConstants epoch_constants(double p, double q, double tau, double sigma, double lambda) {
  if (!(p > 0.0) || p > 1.0 || !(q > 0.0) || q > 1.0)
    throw std::invalid_argument("epoch_constants: probabilities must lie in (0, 1]");
  if (!(tau > 0.0) || !(sigma > 0.0) || !(lambda >= 0.0))
    throw std::invalid_argument("epoch_constants: need tau, sigma > 0 and lambda >= 0");
  EpochConstants c;
  c.alpha = std::max(1.0 / p - 1.0, 1.0 / q - 1.0);
  const double root = std::sqrt(tau * sigma) * lambda;
  c.gamma4_sq = (1.0 / std::sqrt(p) - std::sqrt(p)) * std::sqrt(q) * root;
  c.gamma5_sq = std::sqrt(p) * (1.0 / std::sqrt(q) - std::sqrt(q)) * root;
  c.beta = std::max(c.gamma4_sq, c.gamma5_sq);
  return c;
}

long min_epoch_length(const EpochConstants& c, double gamma1_sq) {
  if (!c.mu || !c.zeta)
    throw std::invalid_argument("min_epoch_length: growth constants mu and zeta are required");
  if (!(*c.mu > 0.0) || !(*c.zeta > 0.0))
    throw std::invalid_argument("min_epoch_length: mu and zeta must be positive");
  if (!(gamma1_sq < 0.5))
    throw std::invalid_argument("min_epoch_length: gamma1^2 must be below 1/2");
  const double k1 = (4.0 + 2.0 * c.beta) / *c.mu;
  const double k2 = (100.0 / *c.zeta) *
                    (c.alpha * *c.zeta + 5.0 * c.beta + 2.0 + 1.0 / (1.0 - 2.0 * gamma1_sq));
  const double k3 = 400.0 * c.beta / *c.zeta;
  return std::max(1L, static_cast<long>(std::ceil(std::max({k1, k2, k3}))));
}

namespace {

double checkpoint_relkkt(const SaddleProblem& problem, const DspdhgSolver& solver,
                         const RunOptions& options, IterationRecord& rec) {
  const PrimalDualPoint z = solver.current_point();
  if (!all_finite(z.x) || !all_finite(z.y))
    throw std::runtime_error("run_solver: iterate lost finiteness");
  rec.relkkt = kkt_residual(problem, z, options.ref_step);
  if (!std::isfinite(rec.relkkt)) throw std::runtime_error("run_solver: KKT residual is not finite");

  if (!problem.f.empty()) {
    const ObjectiveReport obj = primal_objective(problem, z.x);
    rec.infeasibility = obj.infeasibility;
    if (options.reference_objective && obj.value)
      rec.rel_error = std::fabs(*obj.value - *options.reference_objective) /
                      (1.0 + std::fabs(*options.reference_objective));
  }
  if (options.smoothed_gap_mu) {
    const PrimalDualPoint& center =
        options.smoothed_gap_center != nullptr ? *options.smoothed_gap_center : z;
    rec.smoothed_gap = smoothed_gap(problem, solver.metric(), z, center, *options.smoothed_gap_mu);
  }
  return rec.relkkt;
}

}  // namespace

RunResult run_solver(const SaddleProblem& problem, const StepSizes& steps,
                     const SamplingPlan& plan, const RestartPolicy& policy,
                     const RunOptions& options) {
  if (!(options.ref_step > 0.0))
    throw std::invalid_argument("run_solver: ref_step must be positive");
  if (!(options.budget >= 0.0) || !(options.cadence > 0.0))
    throw std::invalid_argument("run_solver: budget must be >= 0 and cadence > 0");
  if (policy.kind == RestartPolicy::Kind::fixed_k && policy.K < 1)
    throw std::invalid_argument("run_solver: fixed restart length must be >= 1");
  if (policy.kind == RestartPolicy::Kind::adaptive_kkt &&
      (!(policy.factor > 0.0) || policy.factor >= 1.0))
    throw std::invalid_argument("run_solver: adaptive restart factor must lie in (0, 1)");

  DspdhgSolver solver(problem, steps, plan, options.refresh_interval);
  if (!options.x0.empty() || !options.y0.empty()) {
    Vec x0 = options.x0.empty() ? Vec(static_cast<std::size_t>(problem.A.cols()), 0.0) : options.x0;
    Vec y0 = options.y0.empty() ? Vec(static_cast<std::size_t>(problem.A.rows()), 0.0) : options.y0;
    solver.restart_from(x0, y0);
  }

  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&t_start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };

  RunResult out;
  auto emit = [&](bool restart_flag) {
    IterationRecord rec;
    rec.cost_units = solver.cost_units();
    rec.iteration = solver.iteration();
    rec.epoch = solver.state().epoch;
    const double relkkt = checkpoint_relkkt(problem, solver, options, rec);
    rec.wall_seconds = elapsed();
    rec.restart = restart_flag;
    out.records.push_back(rec);
    return relkkt;
  };

  double relkkt_now = emit(false);
  double epoch_start_relkkt = relkkt_now;
  std::uint64_t epoch_start_iter = 0;
  bool reached = options.relkkt_target > 0.0 && relkkt_now <= options.relkkt_target;

  double next_checkpoint = options.cadence;
  while (!reached && solver.cost_units() < options.budget) {
    solver.step();

    bool restarted = false;
    if (policy.kind == RestartPolicy::Kind::fixed_k &&
        solver.iteration() - epoch_start_iter >= static_cast<std::uint64_t>(policy.K)) {
      const PrimalDualPoint avg = solver.ergodic_average();
      solver.restart_from(avg.x, avg.y);
      solver.add_cost(1.0);
      solver.bump_epoch();
      epoch_start_iter = solver.iteration();
      restarted = true;
    }

    const bool at_checkpoint =
        solver.cost_units() >= next_checkpoint || solver.cost_units() >= options.budget;
    if (!at_checkpoint && !restarted) continue;

    if (policy.kind == RestartPolicy::Kind::adaptive_kkt && at_checkpoint) {
      // Two candidate restart points: the current iterate and the running
      // ergodic average. A restart fires when the better of the two improves
      // on the residual held at the last restart, and resumes from that point.
      const PrimalDualPoint avg = solver.ergodic_average();
      const double avg_kkt = kkt_residual(problem, avg, options.ref_step);
      const PrimalDualPoint cur = solver.current_point();
      const double cur_kkt = kkt_residual(problem, cur, options.ref_step);
      const double best_kkt = std::min(avg_kkt, cur_kkt);
      if (best_kkt <= policy.factor * epoch_start_relkkt) {
        const PrimalDualPoint& best = avg_kkt <= cur_kkt ? avg : cur;
        solver.restart_from(best.x, best.y);
        solver.add_cost(1.0);
        solver.bump_epoch();
        epoch_start_relkkt = best_kkt;
        epoch_start_iter = solver.iteration();
        restarted = true;
      }
    }

    relkkt_now = emit(restarted);
    while (next_checkpoint <= solver.cost_units()) next_checkpoint += options.cadence;
    if (options.relkkt_target > 0.0 && relkkt_now <= options.relkkt_target) reached = true;
  }

  out.final_point = solver.current_point();
  out.final_ergodic = solver.ergodic_average();
  out.final_relkkt = out.records.back().relkkt;
  out.cost_units = solver.cost_units();
  out.iterations = solver.iteration();
  out.epochs = solver.state().epoch + 1;
  out.reached_target = reached;
  return out;
}

RunResult run(const SaddleProblem& problem, const StepSizes& steps, const SamplingPlan& plan,
              const RunOptions& options) {
  return run_solver(problem, steps, plan, RestartPolicy::none(), options);
}

}  // namespace dspdhg
