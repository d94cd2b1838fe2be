#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "alprs/sift.hpp"

namespace alprs {

/// Euclidean distance between two descriptors, accumulated in double.
double descriptor_distance(std::span<const float, kDescriptorSize> a,
                           std::span<const float, kDescriptorSize> b);

struct NeighborResult {
  std::size_t id = 0;
  double distance = 0.0;
};

/// Balanced k-d tree over 128-d descriptors, one descriptor per leaf. Each internal
/// node splits at the median of the dimension with the widest value range.
/// Immutable after construction.
class KdIndex {
 public:
  explicit KdIndex(std::vector<Descriptor> descriptors);

  std::size_t size() const noexcept { return descriptors_.size(); }
  std::size_t leaf_count() const noexcept { return descriptors_.size(); }
  const Descriptor& descriptor(std::size_t id) const { return descriptors_.at(id); }

  /// Best-Bin-First search: cells are visited in order of increasing lower-bound distance
  /// to the query and the search stops after max_checks leaves. With max_checks >=
  /// leaf_count() the result is the exact nearest neighbour.
  NeighborResult nearest(std::span<const float, kDescriptorSize> query, int max_checks) const;

  struct Node {
    int split_dim = -1;  // -1 marks a leaf
    float split_value = 0.0f;
    int left = -1;
    int right = -1;
    int leaf_id = -1;
  };
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

 private:
  int build(std::vector<std::size_t>& ids, std::size_t begin, std::size_t end);

  std::vector<Descriptor> descriptors_;
  std::vector<Node> nodes_;
};

KdIndex build_index(std::vector<Descriptor> descriptors);

NeighborResult nearest_neighbor_bbf(const KdIndex& index,
                                    std::span<const float, kDescriptorSize> query,
                                    int max_checks);

}  // namespace alprs
