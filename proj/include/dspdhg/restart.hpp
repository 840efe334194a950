#pragma once

#include <optional>
#include <vector>

#include "dspdhg/records.hpp"
#include "dspdhg/solver.hpp"

namespace dspdhg {

// Restart schedule. fixed_k restarts from the ergodic average every K
// iterations; adaptive_kkt restarts when the ergodic average's relative KKT
// residual has dropped below factor times its value at the epoch start
// (checked at logging checkpoints, where the needed matvecs happen anyway).
struct RestartPolicy {
  enum class Kind { none, fixed_k, adaptive_kkt };
  Kind kind = Kind::none;
  long K = 0;
  double factor = 0.8;

  static RestartPolicy none() { return {}; }
  static RestartPolicy fixed(long K) { return {Kind::fixed_k, K, 0.8}; }
  static RestartPolicy adaptive(double factor = 0.8) { return {Kind::adaptive_kkt, 0, factor}; }
};

// Constants controlling how long an epoch must be for the restarted method's
// per-epoch contraction:
//   alpha     = max(1/p - 1, 1/q - 1)
//   gamma4^2  = (p^{-1/2} - p^{1/2}) q^{1/2} (tau sigma)^{1/2} ||A||
//   gamma5^2  = p^{1/2} (q^{-1/2} - q^{1/2}) (tau sigma)^{1/2} ||A||
//   beta      = max(gamma4^2, gamma5^2)
struct EpochConstants {
  double alpha = 0.0;
  double gamma4_sq = 0.0;
  double gamma5_sq = 0.0;
  double beta = 0.0;
  std::optional<double> mu;    // smoothed quadratic growth modulus, if known
  std::optional<double> zeta;  // growth-to-gap factor, if known
};

EpochConstants epoch_constants(double p, double q, double tau, double sigma, double lambda);

// Smallest epoch length K with
//   K >= max( (4 + 2 beta)/mu,
//             (100/zeta) (alpha zeta + 5 beta + 2 + 1/(1 - 2 gamma1^2)),
//             400 beta / zeta ).
// Requires mu and zeta to be present and gamma1^2 < 1/2.
long min_epoch_length(const EpochConstants& c, double gamma1_sq);

// Driver options. Cost budget and checkpoint cadence are in cost units;
// relkkt_target = 0 disables early stopping. Diagnostics at checkpoints are
// measurement overhead and are not charged to cost_units; restart cache
// rebuilds are charged one unit (a matvec/adjoint pair).
struct RunOptions {
  double budget = 100.0;
  double relkkt_target = 0.0;
  double cadence = 1.0;
  int refresh_interval = 1000;
  double ref_step = 0.0;  // prox step inside the KKT residual; must be set
  std::optional<double> reference_objective;
  std::optional<double> smoothed_gap_mu;
  const PrimalDualPoint* smoothed_gap_center = nullptr;  // defaults to the iterate
  Vec x0, y0;  // empty = zeros
};

struct RunResult {
  std::vector<IterationRecord> records;
  PrimalDualPoint final_point;
  PrimalDualPoint final_ergodic;
  double final_relkkt = 0.0;
  double cost_units = 0.0;
  std::uint64_t iterations = 0;
  int epochs = 0;
  bool reached_target = false;
};

// Unified driver; RestartPolicy::none() reproduces the plain method
// bit-for-bit. Throws std::runtime_error if the iterates lose finiteness.
RunResult run_solver(const SaddleProblem& problem, const StepSizes& steps,
                     const SamplingPlan& plan, const RestartPolicy& policy,
                     const RunOptions& options);

// Plain (non-restarted) run.
RunResult run(const SaddleProblem& problem, const StepSizes& steps, const SamplingPlan& plan,
              const RunOptions& options);

}  // namespace dspdhg
