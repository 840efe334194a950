#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "dspdhg/problem.hpp"

namespace dspdhg {

// Plain-text problem container: [meta], [partitions], one atom per line in
// [g] / [fstar] / [f], then the coupling matrix as an embedded Matrix Market
// payload under [A]. Deterministic byte-for-byte for a given problem.
void write_problem(std::ostream& out, const SaddleProblem& problem);
void write_problem_file(const std::string& path, const SaddleProblem& problem);
SaddleProblem read_problem(std::istream& in);
SaddleProblem read_problem_file(const std::string& path);

// Reference solution: objective, residual, certification flag and the point.
struct ReferencePoint {
  PrimalDualPoint z;
  double objective = 0.0;
  double relkkt = 0.0;
  bool certified = false;
};

void write_reference(std::ostream& out, const ReferencePoint& ref);
void write_reference_file(const std::string& path, const ReferencePoint& ref);
ReferencePoint read_reference(std::istream& in);
ReferencePoint read_reference_file(const std::string& path);

}  // namespace dspdhg
