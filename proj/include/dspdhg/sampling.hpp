#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dspdhg/rng.hpp"

namespace dspdhg {

// Which side of an iteration a subset draw belongs to. Primal and dual draws
// at the same iteration come from independent streams.
enum class SampleSide : std::uint64_t { primal = 0, dual = 1 };

// Realized sampling layout: s of m primal blocks and r of n dual blocks per
// iteration, each uniform over fixed-cardinality subsets. The realized
// probabilities p = s/m and q = r/n are what every step-size and diagnostic
// formula consumes.
struct SamplingPlan {
  int m = 0;  // primal block count
  int n = 0;  // dual block count
  int s = 0;
  int r = 0;
  double p = 0.0;
  double q = 0.0;
  std::uint64_t seed = 0;
};

// Rounds requested probabilities to realizable cardinalities, with at least
// one block per side.
SamplingPlan make_sampling_plan(int m, int n, double p_requested, double q_requested,
                                std::uint64_t seed);

// Uniformly random k-subset of {0, ..., universe-1}, ascending. Partial
// Fisher-Yates on a scratch permutation.
std::vector<int> draw_subset(RngStream& rng, int universe, int k);

// Reusable-buffer sampler addressed by (seed, iteration, side): any
// iteration's draw can be reproduced without replaying the ones before it.
class SubsetSampler {
 public:
  explicit SubsetSampler(const SamplingPlan& plan);

  // Subsets are ascending; spans stay valid until the next draw on the same
  // side.
  std::span<const int> primal(std::uint64_t iteration);
  std::span<const int> dual(std::uint64_t iteration);

  const SamplingPlan& plan() const { return plan_; }

 private:
  std::span<const int> draw(std::uint64_t iteration, SampleSide side, std::vector<int>& perm,
                            std::vector<int>& out, int universe, int k);

  SamplingPlan plan_;
  std::vector<int> perm_m_, perm_n_;
  std::vector<int> out_s_, out_r_;
};

}  // namespace dspdhg
