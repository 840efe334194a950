#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace dspdhg {

// Contiguous block decomposition of [0, dim): block b covers coordinates
// [boundaries[b], boundaries[b+1]).
class BlockPartition {
 public:
  BlockPartition() : boundaries_{0} {}

  explicit BlockPartition(std::vector<int> boundaries) : boundaries_(std::move(boundaries)) {
    if (boundaries_.size() < 2 || boundaries_.front() != 0)
      throw std::invalid_argument("BlockPartition: boundaries must start at 0 and define at least one block");
    for (std::size_t b = 1; b < boundaries_.size(); ++b)
      if (boundaries_[b] <= boundaries_[b - 1])
        throw std::invalid_argument("BlockPartition: boundaries must be strictly increasing");
  }

  // One block per coordinate.
  static BlockPartition scalar(int dim) {
    std::vector<int> b(static_cast<std::size_t>(dim) + 1);
    for (int i = 0; i <= dim; ++i) b[i] = i;
    return BlockPartition(std::move(b));
  }

  static BlockPartition uniform(int count, int block_dim) {
    std::vector<int> b(static_cast<std::size_t>(count) + 1);
    for (int i = 0; i <= count; ++i) b[i] = i * block_dim;
    return BlockPartition(std::move(b));
  }

  static BlockPartition single(int dim) { return BlockPartition({0, dim}); }

  int count() const { return static_cast<int>(boundaries_.size()) - 1; }
  int dim() const { return boundaries_.back(); }
  int begin(int b) const { return boundaries_[b]; }
  int end(int b) const { return boundaries_[b + 1]; }
  int size(int b) const { return boundaries_[b + 1] - boundaries_[b]; }

  int block_of(int coord) const {
    auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), coord);
    return static_cast<int>(it - boundaries_.begin()) - 1;
  }

  int max_block_size() const {
    int m = 0;
    for (int b = 0; b < count(); ++b) m = std::max(m, size(b));
    return m;
  }

  const std::vector<int>& boundaries() const { return boundaries_; }

  bool operator==(const BlockPartition&) const = default;

 private:
  std::vector<int> boundaries_;
};

}  // namespace dspdhg
