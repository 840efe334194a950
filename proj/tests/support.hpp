#pragma once

// Independent reference implementations and tiny-instance oracles used by the
// unit and acceptance tests. Everything here recomputes from scratch (dense
// algebra, enumeration, grid search) so it shares no code path with the
// incremental machinery under test.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dspdhg/instances.hpp"
#include "dspdhg/problem.hpp"
#include "dspdhg/sampling.hpp"
#include "dspdhg/solver.hpp"

namespace testsupport {

Eigen::MatrixXd to_dense(const dspdhg::BlockMatrix& A);
Eigen::VectorXd to_eigen(const dspdhg::Vec& v);
dspdhg::Vec from_eigen(const Eigen::VectorXd& v);

// Hand-rolled prox formulas, re-derived per atom kind.
dspdhg::Vec oracle_prox(const dspdhg::ProxAtom& atom, const dspdhg::Vec& v, double t);

// argmin over a uniform grid of value(u) + (1/2t)(u - v)^2.
double grid_prox_1d(const std::function<double(double)>& value, double v, double t, double lo,
                    double hi, int points);

// Full-vector reference iteration. Shares the library's subset streams (the
// sampler is validated separately) but recomputes both products densely every
// step instead of maintaining incremental caches.
class DenseReference {
 public:
  DenseReference(const dspdhg::SaddleProblem& problem, const dspdhg::StepSizes& steps,
                 const dspdhg::SamplingPlan& plan);

  void step();
  void restart_from(const dspdhg::PrimalDualPoint& z);  // resets extrapolation, keeps k

  dspdhg::PrimalDualPoint point() const;
  dspdhg::PrimalDualPoint ergodic() const;
  std::uint64_t iteration() const { return k_; }

 private:
  const dspdhg::SaddleProblem* prob_;
  Eigen::MatrixXd A_;
  dspdhg::StepSizes st_;
  double p_ = 1.0, q_ = 1.0;
  dspdhg::SubsetSampler sampler_;
  Eigen::VectorXd x_, y_, ybar_;
  Eigen::VectorXd esum_x_, esum_y_;
  long ecount_ = 0;
  std::uint64_t k_ = 0;
};

// g = half x^2 against f = |.| (fstar = indicator of [-1, 1]) coupled by
// A = [1]; unique saddle point (0, 0).
dspdhg::SaddleProblem tiny_scalar_problem();

// Mixed-atom instance with every prox finite, for solver and metric tests.
dspdhg::SaddleProblem random_problem(std::uint64_t seed, int m_blocks, int n_blocks,
                                     int max_block_dim, double density);

// Planted-hyperplane classification data with sparse features in [-1, 1].
dspdhg::LibsvmDataset synth_dataset(std::uint64_t seed, int samples, int features, double density);

// Soft-margin SVM optimum by enumerating the 3^n bound patterns of the dual
// box QP (n <= ~8). Strong duality makes the dual value the primal optimum.
struct SvmOracle {
  double objective = 0.0;
  Eigen::VectorXd w;
  double bias = 0.0;
  Eigen::VectorXd alpha;
};
std::optional<SvmOracle> svm_enumeration_oracle(const dspdhg::LibsvmDataset& data, double C);

// Condensed-control projected gradient for the MPC instance; exact when the
// state boxes end up inactive (reported via state_box_margin > 0).
struct MpcOracle {
  double objective = 0.0;
  dspdhg::Vec primal;          // (x_1..x_T, u_0..u_{T-1})
  double state_box_margin = 0.0;
  double grad_map_norm = 0.0;  // fixed-point residual of the projected step
};
MpcOracle mpc_condensed_oracle(const dspdhg::MpcSpec& spec, int iterations);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);
double median(std::vector<double> v);

// Fresh path under the system temp directory; parent directories created.
std::string temp_path(const std::string& name);

}  // namespace testsupport
