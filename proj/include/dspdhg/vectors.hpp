#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace dspdhg {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_sq(std::span<const double> a) { return dot(a, a); }

inline double norm2(std::span<const double> a) { return std::sqrt(norm_sq(a)); }

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

inline bool all_finite(std::span<const double> a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

// Dense scatter target that remembers which entries were written, so the
// nonzero support can be visited and cleared in time proportional to its size.
class SparseAccumulator {
 public:
  void resize(int n) {
    value_.assign(static_cast<std::size_t>(n), 0.0);
    marked_.assign(static_cast<std::size_t>(n), 0);
    touched_.clear();
  }

  void add(int i, double v) {
    if (!marked_[i]) {
      marked_[i] = 1;
      touched_.push_back(i);
    }
    value_[i] += v;
  }

  double operator[](int i) const { return value_[i]; }
  const Vec& values() const { return value_; }
  std::span<const int> touched() const { return touched_; }
  bool empty() const { return touched_.empty(); }

  void clear() {
    for (int i : touched_) {
      value_[i] = 0.0;
      marked_[i] = 0;
    }
    touched_.clear();
  }

  void swap(SparseAccumulator& other) {
    value_.swap(other.value_);
    marked_.swap(other.marked_);
    touched_.swap(other.touched_);
  }

 private:
  Vec value_;
  std::vector<char> marked_;
  std::vector<int> touched_;
};

}  // namespace dspdhg
