#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dspdhg/problem.hpp"

namespace dspdhg {

// Sparse binary-classification dataset: one sample per row, labels in
// {-1, +1}, features stored as (0-based index, value) pairs.
struct LibsvmDataset {
  int dim = 0;  // feature count (max index seen)
  std::vector<std::vector<std::pair<int, double>>> samples;
  std::vector<int> labels;
};

// LIBSVM text format: "label idx:val idx:val ..." with 1-based indices.
// Labels may be any two distinct values; the smaller maps to -1. Parse
// errors report the offending line.
LibsvmDataset load_libsvm(const std::string& path);
void save_libsvm(const LibsvmDataset& data, const std::string& path);

// Soft-margin SVM with intercept as the saddle problem
//   min_{w,d} (1/2)||w||^2 + C sum_i max(0, 1 - b_i (a_i^T w + d)).
// Row i of A is (b_i a_i^T, b_i); primal blocks are single coordinates
// (features then intercept), dual blocks single samples, and the dual atoms
// are the hinge conjugates: linear term over [-C, 0].
SaddleProblem build_svm(const LibsvmDataset& data, double C);

// Synthetic control instance: random stable linear dynamics, diagonal state
// cost with a fixed fraction of active coordinates, box-constrained states
// and controls.
struct MpcSpec {
  int n_x = 0;
  int n_u = 0;
  int horizon = 0;
  std::uint64_t seed = 0;
  std::vector<double> a_sys;  // n_x * n_x, row-major
  std::vector<double> b_sys;  // n_x * n_u, row-major
  std::vector<double> h;      // diagonal state cost, 70% nonzero
  double r_weight = 0.1;      // uniform control cost weight
  std::vector<double> x_bar;  // state box half-widths
  std::vector<double> u_bar;  // control box half-widths
  std::vector<double> x_init;
};

// Draws a system from the seed: A_sys = 0.5 I + N(0, 0.1^2) entries,
// redrawn until the spectral radius is below one (at most 1000 attempts),
// B_sys ~ N(0,1), h ~ U(0,10) with round(0.3 n_x) entries zeroed, state
// boxes U(1,2), control boxes U(0,0.1), x_init componentwise within half
// the state box.
MpcSpec make_mpc_spec(std::uint64_t seed, int n_x, int n_u, int horizon);

// Stacks the variables (x_1..x_T, u_0..u_{T-1}) into per-stage blocks. Dual
// block t enforces x_{t+1} - A_sys x_t - B_sys u_t = c_t with c_0 = A_sys
// x_init and c_t = 0 otherwise; the dual atoms are the linear conjugates of
// those equality indicators. Stage costs are x^T diag(h) x + r ||u||^2 over
// the boxes.
SaddleProblem build_mpc(const MpcSpec& spec);

SaddleProblem build_mpc(std::uint64_t seed, int n_x, int n_u, int horizon);

}  // namespace dspdhg
