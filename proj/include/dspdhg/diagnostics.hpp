#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dspdhg/problem.hpp"
#include "dspdhg/vectors.hpp"

namespace dspdhg {

// Uniform step/probability weights entering every weighted norm:
// ||x||^2 weighted by 1/(tau p) and ||y||^2 by 1/(sigma q).
struct WeightedMetric {
  double tau = 1.0;
  double sigma = 1.0;
  double p = 1.0;
  double q = 1.0;
};

// ||z||_V^2 = ||x||^2 / (tau p) + ||y||^2 / (sigma q).
double v_norm_sq(const WeightedMetric& m, std::span<const double> x, std::span<const double> y);

// Drift functional of an increment pair (dx, dy_prev):
//   (1/4) ||dx||^2/(tau p) + (1/4) ||dy||^2/(sigma q) + <A dx, dy> / (p q).
double lyapunov_V(const WeightedMetric& m, const BlockMatrix& A, std::span<const double> dx,
                  std::span<const double> dy_prev);

// Iteration-indexed functional of a test point z = (x, y) given the dual
// increment dy_k of the current iterate:
//   (1/2) ||x||^2/(tau p) + (1/2) ||y||^2/(sigma q)
//   + (1/4) ||dy_k||^2/(sigma q) - <A x, dy_k> / q.
double lyapunov_Vk(const WeightedMetric& m, const BlockMatrix& A, std::span<const double> x,
                   std::span<const double> y, std::span<const double> dy_k);

// Smoothed gap sup_z { gap_kernel(zbar, z) - (mu/2) ||z - zdot||_V^2 },
// evaluated exactly blockwise through the prox maps. Can be +inf when zbar
// itself violates an indicator.
double smoothed_gap(const SaddleProblem& problem, const WeightedMetric& m,
                    const PrimalDualPoint& zbar, const PrimalDualPoint& zdot, double mu);

// Max of gap_kernel(zbar, .) over a finite candidate set; undefined values
// are skipped, and nullopt is returned when nothing defined remains.
std::optional<double> restricted_gap(const SaddleProblem& problem, const PrimalDualPoint& zbar,
                                     const std::vector<PrimalDualPoint>& candidates);

}  // namespace dspdhg
