#pragma once

#include <cstdint>
#include <optional>

namespace dspdhg {

// One logging checkpoint of a run. cost_units is the normalized work axis:
// one unit equals one full matvec plus one full adjoint matvec, so a
// stochastic iteration contributes (touched nonzeros) / (2 nnz).
struct IterationRecord {
  double cost_units = 0.0;
  std::uint64_t iteration = 0;
  int epoch = 0;
  double relkkt = 0.0;
  std::optional<double> rel_error;
  std::optional<double> infeasibility;
  std::optional<double> smoothed_gap;
  double wall_seconds = 0.0;
  bool restart = false;
};

}  // namespace dspdhg
