#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dspdhg/vectors.hpp"

namespace dspdhg {

// Separable convex atom with a closed-form proximal map. One atom owns one
// block; parameter vectors, where present, match the block dimension.
//
//   zero               0
//   half_square        (1/2) ||v||^2
//   diag_quadratic     sum_i w_i v_i^2,            w_i >= 0
//   linear_over_box    <c, v> + ind[lo, hi](v)
//   diag_quad_over_box sum_i w_i v_i^2 + ind[lo, hi](v)
//   hinge              scale * sum_i max(0, 1 - v_i), scale >= 0
class ProxAtom {
 public:
  enum class Kind { zero, half_square, diag_quadratic, linear_over_box, diag_quad_over_box, hinge };

  static ProxAtom zero(int dim);
  static ProxAtom half_square(int dim);
  static ProxAtom diag_quadratic(Vec w);
  static ProxAtom linear_over_box(Vec c, Vec lo, Vec hi);
  static ProxAtom diag_quad_over_box(Vec w, Vec lo, Vec hi);
  static ProxAtom hinge(int dim, double scale);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Vec& w() const { return w_; }
  const Vec& c() const { return c_; }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }
  double scale() const { return scale_; }

  // out = argmin_u  value(u) + ||u - v||^2 / (2 t),  exact per coordinate.
  void prox(double t, std::span<const double> v, std::span<double> out) const;
  Vec prox(double t, std::span<const double> v) const;

  // Function value at v; +inf when v leaves the box by more than slack.
  double eval(std::span<const double> v, double slack = 1e-12) const;

  bool has_box() const {
    return kind_ == Kind::linear_over_box || kind_ == Kind::diag_quad_over_box;
  }
  // Squared Euclidean distance of v to the box (0 for atoms without one).
  double box_distance_sq(std::span<const double> v) const;
  // Value at the Euclidean projection of v onto the box; equals eval(v) for
  // box-free atoms and for box-feasible v. Always finite.
  double eval_projected(std::span<const double> v) const;

  std::string kind_name() const;

 private:
  ProxAtom(Kind kind, int dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  int dim_;
  Vec w_, c_, lo_, hi_;
  double scale_ = 0.0;
};

// Verifies first-order optimality of the prox output against a handful of
// random feasible perturbations; throws on failure. Used as a construction
// self-check for problem atoms.
void check_prox_first_order(const ProxAtom& atom, double t, std::span<const double> v,
                            int probes, std::uint64_t seed, double tol = 1e-9);

}  // namespace dspdhg
