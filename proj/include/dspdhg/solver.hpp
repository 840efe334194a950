#pragma once

#include <cstdint>
#include <vector>

#include "dspdhg/diagnostics.hpp"
#include "dspdhg/problem.hpp"
#include "dspdhg/sampling.hpp"
#include "dspdhg/vectors.hpp"

namespace dspdhg {

enum class StepMode { practical, certified };

// Primal/dual step sizes together with the contraction factors they induce:
//   gamma1^2 = lambda_rs p^{-1/2} q^{-1/2} (tau sigma)^{1/2}
//   gamma2^2 = lambda_r  p^{1/2}  q^{-1/2} (tau sigma)^{1/2}
//
// practical: sigma = 0.99 q / lambda_rs, tau = 0.99 p / lambda_rs.
// certified: the practical pair scaled by min(0.499/gamma1^2, 0.5/gamma2^2, 1)
// so that gamma1^2 < 1/2 and gamma2^2 <= 1/2 hold.
struct StepSizes {
  double tau = 0.0;
  double sigma = 0.0;
  double gamma1_sq = 0.0;
  double gamma2_sq = 0.0;
  StepMode mode = StepMode::practical;
};

StepSizes compute_stepsizes(const NormReport& norms, double p, double q, StepMode mode);

// Per-iteration state and caches. Ax, ATy and ATybar = A^T (y + dy/q) are
// maintained incrementally; dy = y^k - y^{k-1} and at_dy = A^T dy live in
// sparse accumulators so an iteration touches only sampled nonzeros.
struct SolverState {
  Vec x;
  Vec y;
  SparseAccumulator dy;
  std::vector<int> dy_blocks;
  Vec ax;
  Vec aty;
  Vec atybar;
  SparseAccumulator at_dy;
  std::uint64_t k = 0;
  Vec ergodic_x;
  Vec ergodic_y;
  std::uint64_t ergodic_count = 0;
  double cost_units = 0.0;
  int epoch = 0;
  double last_refresh_drift = 0.0;
};

// Full-pass probe quantities for one realized step: the virtual updates
// xhat/yhat a deterministic full sweep would produce, and the residuals
//   u = xhat - xbar,   v = yhat - y - (y_new - y)/q,
// which average to zero over the sampling.
struct ProbeResult {
  Vec xhat;
  Vec yhat;
  Vec u;
  Vec v;
};

class DspdhgSolver {
 public:
  // refresh_interval: every that many iterations the caches are recomputed
  // from scratch (0 disables refreshes).
  DspdhgSolver(const SaddleProblem& problem, const StepSizes& steps, const SamplingPlan& plan,
               int refresh_interval = 1000);

  // One iteration: sample S, prox the sampled primal blocks, extrapolate
  // through the caches, sample T, prox the sampled dual blocks, update dy.
  void step();

  // step() plus the virtual full updates; costs a full pass.
  ProbeResult step_with_probe();

  // Replaces the iterate, clears dy and the ergodic accumulators, and
  // rebuilds all caches with fresh products. The iteration counter is kept
  // so sampling streams continue instead of repeating.
  void restart_from(std::span<const double> x, std::span<const double> y);

  // Recomputes caches in place and records the drift they had accumulated.
  void refresh_caches();

  PrimalDualPoint ergodic_average() const;
  PrimalDualPoint current_point() const { return {state_.x, state_.y}; }
  WeightedMetric metric() const;

  const SolverState& state() const { return state_; }
  const SaddleProblem& problem() const { return *problem_; }
  const StepSizes& steps() const { return steps_; }
  const SamplingPlan& plan() const { return sampler_.plan(); }
  double cost_units() const { return state_.cost_units; }
  std::uint64_t iteration() const { return state_.k; }
  void bump_epoch() { ++state_.epoch; }
  void add_cost(double units) { state_.cost_units += units; }

 private:
  void primal_half(std::span<const int> S, std::int64_t& touched);
  void dual_half(std::span<const int> T, std::int64_t& touched);
  void finish_step(std::int64_t touched);

  const SaddleProblem* problem_;
  StepSizes steps_;
  SubsetSampler sampler_;
  int refresh_interval_;

  SolverState state_;
  SparseAccumulator w_;  // sum_j A^j dx_j of the current iteration
  SparseAccumulator u_;  // sum_i A_i^T dy_i of the current iteration
  std::vector<char> dy_block_mark_;
  Vec scratch_in_, scratch_out_;
};

}  // namespace dspdhg
