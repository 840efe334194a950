#include "dspdhg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dspdhg {

StepSizes compute_stepsizes(const NormReport& norms, double p, double q, StepMode mode) {
  if (!(p > 0.0) || p > 1.0 || !(q > 0.0) || q > 1.0)
    throw std::invalid_argument("compute_stepsizes: probabilities must lie in (0, 1]");
  if (!(norms.lambda_rs > 0.0) || !(norms.lambda_r > 0.0))
    throw std::invalid_argument("compute_stepsizes: norms must be positive (zero matrix?)");

  StepSizes st;
  st.mode = mode;
  st.sigma = 0.99 * q / norms.lambda_rs;
  st.tau = 0.99 * p / norms.lambda_rs;
  const double root = std::sqrt(st.tau * st.sigma);
  st.gamma1_sq = norms.lambda_rs / std::sqrt(p * q) * root;
  st.gamma2_sq = norms.lambda_r * std::sqrt(p / q) * root;

  if (mode == StepMode::certified) {
    // gamma^2 scales linearly when tau and sigma shrink together.
    const double rho =
        std::min({0.499 / st.gamma1_sq, 0.5 / st.gamma2_sq, 1.0});
    st.tau *= rho;
    st.sigma *= rho;
    st.gamma1_sq *= rho;
    st.gamma2_sq *= rho;
  }
  return st;
}

DspdhgSolver::DspdhgSolver(const SaddleProblem& problem, const StepSizes& steps,
                           const SamplingPlan& plan, int refresh_interval)
    : problem_(&problem), steps_(steps), sampler_(plan), refresh_interval_(refresh_interval) {
  const BlockMatrix& A = problem.A;
  if (plan.m != A.col_blocks() || plan.n != A.row_blocks())
    throw std::invalid_argument("DspdhgSolver: sampling plan block counts do not match the problem");
  if (!(steps.tau > 0.0) || !(steps.sigma > 0.0))
    throw std::invalid_argument("DspdhgSolver: step sizes must be positive");
  if (A.nnz() == 0) throw std::invalid_argument("DspdhgSolver: coupling matrix is zero");

  state_.x.assign(static_cast<std::size_t>(A.cols()), 0.0);
  state_.y.assign(static_cast<std::size_t>(A.rows()), 0.0);
  state_.dy.resize(A.rows());
  state_.ax.assign(static_cast<std::size_t>(A.rows()), 0.0);
  state_.aty.assign(static_cast<std::size_t>(A.cols()), 0.0);
  state_.atybar.assign(static_cast<std::size_t>(A.cols()), 0.0);
  state_.at_dy.resize(A.cols());
  state_.ergodic_x.assign(static_cast<std::size_t>(A.cols()), 0.0);
  state_.ergodic_y.assign(static_cast<std::size_t>(A.rows()), 0.0);

  w_.resize(A.rows());
  u_.resize(A.cols());
  dy_block_mark_.assign(static_cast<std::size_t>(A.row_blocks()), 0);
  const int scratch =
      std::max(A.col_partition().max_block_size(), A.row_partition().max_block_size());
  scratch_in_.resize(static_cast<std::size_t>(scratch));
  scratch_out_.resize(static_cast<std::size_t>(scratch));
}

WeightedMetric DspdhgSolver::metric() const {
  return {steps_.tau, steps_.sigma, sampler_.plan().p, sampler_.plan().q};
}

void DspdhgSolver::primal_half(std::span<const int> S, std::int64_t& touched) {
  const BlockMatrix& A = problem_->A;
  const BlockPartition& cp = A.col_partition();
  const double tau = steps_.tau;
  for (int j : S) {
    const int b = cp.begin(j);
    const int d = cp.size(j);
    for (int i = 0; i < d; ++i) scratch_in_[i] = state_.x[b + i] - tau * state_.atybar[b + i];
    problem_->g[j].prox(tau, std::span<const double>(scratch_in_.data(), d),
                        std::span<double>(scratch_out_.data(), d));
    for (int i = 0; i < d; ++i) {
      scratch_in_[i] = scratch_out_[i] - state_.x[b + i];  // reused as the block delta
      state_.x[b + i] = scratch_out_[i];
    }
    A.accumulate_col_block(j, scratch_in_.data(), 1.0, w_);
    touched += A.col_block_nnz(j);
  }
  for (int r : w_.touched()) state_.ax[r] += w_.values()[r];
}

void DspdhgSolver::dual_half(std::span<const int> T, std::int64_t& touched) {
  const BlockMatrix& A = problem_->A;
  const BlockPartition& rp = A.row_partition();
  const double sigma = steps_.sigma;
  const double p = sampler_.plan().p;
  const double q = sampler_.plan().q;
  const double extrap = 1.0 / p - 1.0;

  // dy becomes y^{k+1} - y^k from here on.
  state_.dy.clear();
  for (int i : state_.dy_blocks) dy_block_mark_[i] = 0;
  state_.dy_blocks.clear();

  for (int i : T) {
    const int b = rp.begin(i);
    const int d = rp.size(i);
    for (int k = 0; k < d; ++k) {
      const int r = b + k;
      // A xbar = A x^{k+1} + (1/p - 1) * (current primal deltas' products)
      scratch_in_[k] = state_.y[r] + sigma * (state_.ax[r] + extrap * w_[r]);
    }
    problem_->fstar[i].prox(sigma, std::span<const double>(scratch_in_.data(), d),
                            std::span<double>(scratch_out_.data(), d));
    bool moved = false;
    for (int k = 0; k < d; ++k) {
      const double dyk = scratch_out_[k] - state_.y[b + k];
      scratch_in_[k] = dyk;  // reused as the block delta
      if (dyk != 0.0) {
        state_.dy.add(b + k, dyk);
        moved = true;
      }
      state_.y[b + k] = scratch_out_[k];
    }
    if (moved && !dy_block_mark_[i]) {
      dy_block_mark_[i] = 1;
      state_.dy_blocks.push_back(i);
    }
    A.accumulate_row_block_transpose(i, scratch_in_.data(), 1.0, u_);
    touched += A.row_block_nnz(i);
  }

  // ATybar tracks A^T (y + dy/q): add the new deltas with weight 1 + 1/q,
  // remove the previous iteration's dy contribution.
  const double c_new = 1.0 + 1.0 / q;
  const double c_old = 1.0 / q;
  for (int c : u_.touched()) {
    state_.aty[c] += u_[c];
    state_.atybar[c] += c_new * u_[c];
  }
  for (int c : state_.at_dy.touched()) state_.atybar[c] -= c_old * state_.at_dy[c];
  state_.at_dy.swap(u_);
  u_.clear();  // now holds the stale buffer
}

void DspdhgSolver::finish_step(std::int64_t touched) {
  w_.clear();
  axpy(1.0, state_.x, state_.ergodic_x);
  axpy(1.0, state_.y, state_.ergodic_y);
  ++state_.ergodic_count;
  state_.cost_units += static_cast<double>(touched) / (2.0 * static_cast<double>(problem_->A.nnz()));
  ++state_.k;
  if (refresh_interval_ > 0 && state_.k % static_cast<std::uint64_t>(refresh_interval_) == 0)
    refresh_caches();
}

void DspdhgSolver::step() {
  std::int64_t touched = 0;
  primal_half(sampler_.primal(state_.k), touched);
  dual_half(sampler_.dual(state_.k), touched);
  finish_step(touched);
}

ProbeResult DspdhgSolver::step_with_probe() {
  const BlockMatrix& A = problem_->A;
  const BlockPartition& cp = A.col_partition();
  const BlockPartition& rp = A.row_partition();
  const double tau = steps_.tau;
  const double sigma = steps_.sigma;
  const double p = sampler_.plan().p;
  const double q = sampler_.plan().q;

  ProbeResult res;

  // Virtual primal full update from the pre-step state.
  res.xhat.resize(state_.x.size());
  for (int j = 0; j < cp.count(); ++j) {
    const int b = cp.begin(j);
    const int d = cp.size(j);
    for (int i = 0; i < d; ++i) scratch_in_[i] = state_.x[b + i] - tau * state_.atybar[b + i];
    problem_->g[j].prox(tau, std::span<const double>(scratch_in_.data(), d),
                        std::span<double>(&res.xhat[b], static_cast<std::size_t>(d)));
  }

  const Vec x_prev = state_.x;
  const Vec y_prev = state_.y;

  std::int64_t touched = 0;
  const auto S = sampler_.primal(state_.k);
  std::vector<char> in_s(static_cast<std::size_t>(cp.count()), 0);
  for (int j : S) in_s[j] = 1;
  primal_half(S, touched);

  // Realized extrapolation xbar = x_prev + (x_new - x_prev)/p on sampled
  // blocks; its product with A is ax + (1/p - 1) w.
  Vec xbar = x_prev;
  for (int j = 0; j < cp.count(); ++j) {
    if (!in_s[j]) continue;
    for (int c = cp.begin(j); c < cp.end(j); ++c)
      xbar[c] = x_prev[c] + (state_.x[c] - x_prev[c]) / p;
  }
  Vec axbar(state_.ax.size());
  const double extrap = 1.0 / p - 1.0;
  for (std::size_t r = 0; r < axbar.size(); ++r) axbar[r] = state_.ax[r] + extrap * w_[static_cast<int>(r)];

  // Virtual dual full update at the realized xbar.
  res.yhat.resize(state_.y.size());
  for (int i = 0; i < rp.count(); ++i) {
    const int b = rp.begin(i);
    const int d = rp.size(i);
    for (int k = 0; k < d; ++k) scratch_in_[k] = y_prev[b + k] + sigma * axbar[b + k];
    problem_->fstar[i].prox(sigma, std::span<const double>(scratch_in_.data(), d),
                            std::span<double>(&res.yhat[b], static_cast<std::size_t>(d)));
  }

  dual_half(sampler_.dual(state_.k), touched);

  res.u.resize(state_.x.size());
  for (std::size_t c = 0; c < res.u.size(); ++c) res.u[c] = res.xhat[c] - xbar[c];
  res.v.resize(state_.y.size());
  for (std::size_t r = 0; r < res.v.size(); ++r)
    res.v[r] = res.yhat[r] - y_prev[r] - state_.dy[static_cast<int>(r)] / q;

  finish_step(touched);
  return res;
}

void DspdhgSolver::restart_from(std::span<const double> x, std::span<const double> y) {
  const BlockMatrix& A = problem_->A;
  if (static_cast<int>(x.size()) != A.cols() || static_cast<int>(y.size()) != A.rows())
    throw std::invalid_argument("restart_from: dimension mismatch");
  std::copy(x.begin(), x.end(), state_.x.begin());
  std::copy(y.begin(), y.end(), state_.y.begin());
  state_.dy.clear();
  for (int i : state_.dy_blocks) dy_block_mark_[i] = 0;
  state_.dy_blocks.clear();
  state_.at_dy.clear();
  A.matvec(state_.x, state_.ax);
  A.rmatvec(state_.y, state_.aty);
  state_.atybar = state_.aty;
  std::fill(state_.ergodic_x.begin(), state_.ergodic_x.end(), 0.0);
  std::fill(state_.ergodic_y.begin(), state_.ergodic_y.end(), 0.0);
  state_.ergodic_count = 0;
}

void DspdhgSolver::refresh_caches() {
  const BlockMatrix& A = problem_->A;
  const BlockPartition& rp = A.row_partition();
  const Vec fresh_ax = A.matvec(state_.x);
  const Vec fresh_aty = A.rmatvec(state_.y);

  SparseAccumulator fresh_atdy;
  fresh_atdy.resize(A.cols());
  for (int i : state_.dy_blocks)
    A.accumulate_row_block_transpose(i, state_.dy.values().data() + rp.begin(i), 1.0, fresh_atdy);

  Vec fresh_atybar = fresh_aty;
  const double c = 1.0 / sampler_.plan().q;
  for (int j : fresh_atdy.touched()) fresh_atybar[j] += c * fresh_atdy[j];

  auto rel_drift = [](const Vec& a, const Vec& b) {
    double scale = 1.0;
    for (double v : b) scale = std::max(scale, std::fabs(v));
    return max_abs_diff(a, b) / scale;
  };
  state_.last_refresh_drift = std::max({rel_drift(state_.ax, fresh_ax),
                                        rel_drift(state_.aty, fresh_aty),
                                        rel_drift(state_.atybar, fresh_atybar)});

  state_.ax = fresh_ax;
  state_.aty = fresh_aty;
  state_.atybar = fresh_atybar;
  state_.at_dy.swap(fresh_atdy);
}

PrimalDualPoint DspdhgSolver::ergodic_average() const {
  if (state_.ergodic_count == 0) return current_point();
  PrimalDualPoint z{state_.ergodic_x, state_.ergodic_y};
  const double inv = 1.0 / static_cast<double>(state_.ergodic_count);
  scale(inv, z.x);
  scale(inv, z.y);
  return z;
}

}  // namespace dspdhg
