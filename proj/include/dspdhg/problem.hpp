#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dspdhg/block_matrix.hpp"
#include "dspdhg/prox.hpp"
#include "dspdhg/vectors.hpp"

namespace dspdhg {

struct PrimalDualPoint {
  Vec x;
  Vec y;
};

// min_x max_y  sum_j g_j(x_j) + <A x, y> - sum_i f*_i(y_i)
//
// g has one atom per primal (column) block, fstar one per dual (row) block.
// f optionally carries the primal-side functions f_i for objective and
// constraint-violation reporting; it plays no role in the iterations.
struct SaddleProblem {
  BlockMatrix A;
  std::vector<ProxAtom> g;
  std::vector<ProxAtom> fstar;
  std::vector<ProxAtom> f;  // empty when unavailable
  std::string name;
};

// Validates block/atom dimension agreement and spot-checks every atom's prox
// against first-order optimality on random probes. Throws on failure.
void validate_problem(const SaddleProblem& problem);

SaddleProblem make_problem(BlockMatrix A, std::vector<ProxAtom> g, std::vector<ProxAtom> fstar,
                           std::vector<ProxAtom> f = {}, std::string name = "");

// Lagrangian-form value g(x) + <Ax, y> - f*(y); +-inf when an indicator is
// violated. Precomputed products may be supplied to skip the matvecs.
double saddle_value(const SaddleProblem& problem, std::span<const double> x,
                    std::span<const double> y, const Vec* ax_hint = nullptr);

// Gap kernel: saddle_value(xbar, y) - saddle_value(x, ybar). Returns nullopt
// when the difference is inf - inf (undefined), never a silent NaN.
std::optional<double> gap_kernel(const SaddleProblem& problem, const PrimalDualPoint& zbar,
                                 const PrimalDualPoint& z);

// Scaled fixed-point residual of the prox steps at step ref_step, normalized
// by 1 + ||x|| + ||y||.
double kkt_residual(const SaddleProblem& problem, const PrimalDualPoint& z, double ref_step);

struct ObjectiveReport {
  std::optional<double> value;  // absent when the problem carries no f atoms
  double infeasibility = 0.0;   // Euclidean aggregate of box violations of (Ax)_i
};

// Primal objective sum_i f_i((Ax)_i) + sum_j g_j(x_j). Indicator boxes inside
// f are evaluated at the projection of (Ax)_i onto the box so the reported
// value stays finite; their violation is returned separately.
ObjectiveReport primal_objective(const SaddleProblem& problem, std::span<const double> x);

}  // namespace dspdhg
