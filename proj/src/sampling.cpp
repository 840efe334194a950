#include "dspdhg/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dspdhg {

SamplingPlan make_sampling_plan(int m, int n, double p_requested, double q_requested,
                                std::uint64_t seed) {
  if (m <= 0 || n <= 0) throw std::invalid_argument("make_sampling_plan: block counts must be positive");
  if (!(p_requested > 0.0) || p_requested > 1.0 || !(q_requested > 0.0) || q_requested > 1.0)
    throw std::invalid_argument("make_sampling_plan: probabilities must lie in (0, 1]");
  SamplingPlan plan;
  plan.m = m;
  plan.n = n;
  plan.s = std::clamp(static_cast<int>(std::lround(p_requested * m)), 1, m);
  plan.r = std::clamp(static_cast<int>(std::lround(q_requested * n)), 1, n);
  plan.p = static_cast<double>(plan.s) / m;
  plan.q = static_cast<double>(plan.r) / n;
  plan.seed = seed;
  return plan;
}

namespace {

// First k steps of a Fisher-Yates shuffle of perm; swaps are undone
// afterwards so perm returns to the identity.
void partial_fisher_yates(RngStream& rng, std::vector<int>& perm, int k, std::vector<int>& out) {
  const int n = static_cast<int>(perm.size());
  out.resize(static_cast<std::size_t>(k));
  static thread_local std::vector<int> swapped;
  swapped.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(perm[i], perm[j]);
    swapped[i] = j;
    out[i] = perm[i];
  }
  for (int i = k - 1; i >= 0; --i) std::swap(perm[i], perm[swapped[i]]);
  std::sort(out.begin(), out.end());
}

}  // namespace

std::vector<int> draw_subset(RngStream& rng, int universe, int k) {
  if (universe <= 0 || k < 1 || k > universe)
    throw std::invalid_argument("draw_subset: need 1 <= k <= universe");
  std::vector<int> perm(static_cast<std::size_t>(universe));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> out;
  partial_fisher_yates(rng, perm, k, out);
  return out;
}

SubsetSampler::SubsetSampler(const SamplingPlan& plan) : plan_(plan) {
  perm_m_.resize(static_cast<std::size_t>(plan.m));
  std::iota(perm_m_.begin(), perm_m_.end(), 0);
  perm_n_.resize(static_cast<std::size_t>(plan.n));
  std::iota(perm_n_.begin(), perm_n_.end(), 0);
}

std::span<const int> SubsetSampler::draw(std::uint64_t iteration, SampleSide side,
                                         std::vector<int>& perm, std::vector<int>& out,
                                         int universe, int k) {
  if (k == universe) {
    out.resize(static_cast<std::size_t>(universe));
    std::iota(out.begin(), out.end(), 0);
    return out;
  }
  RngStream rng(stream_key(plan_.seed, iteration, static_cast<std::uint64_t>(side)));
  partial_fisher_yates(rng, perm, k, out);
  return out;
}

std::span<const int> SubsetSampler::primal(std::uint64_t iteration) {
  return draw(iteration, SampleSide::primal, perm_m_, out_s_, plan_.m, plan_.s);
}

std::span<const int> SubsetSampler::dual(std::uint64_t iteration) {
  return draw(iteration, SampleSide::dual, perm_n_, out_r_, plan_.n, plan_.r);
}

}  // namespace dspdhg
