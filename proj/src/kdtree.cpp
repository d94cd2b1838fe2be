#include "alprs/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "alprs/error.hpp"

namespace alprs {

double descriptor_distance(std::span<const float, kDescriptorSize> a,
                           std::span<const float, kDescriptorSize> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < kDescriptorSize; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return std::sqrt(acc);
}

KdIndex::KdIndex(std::vector<Descriptor> descriptors) : descriptors_(std::move(descriptors)) {
  if (descriptors_.empty()) throw Error(ErrorCode::kEmptyInput, "build_index: no descriptors");
  std::vector<std::size_t> ids(descriptors_.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  nodes_.reserve(2 * descriptors_.size());
  build(ids, 0, ids.size());
}

int KdIndex::build(std::vector<std::size_t>& ids, std::size_t begin, std::size_t end) {
  const int node_id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin == 1) {
    nodes_[static_cast<std::size_t>(node_id)].leaf_id = static_cast<int>(ids[begin]);
    return node_id;
  }

  int best_dim = 0;
  float best_spread = -1.0f;
  for (int d = 0; d < kDescriptorSize; ++d) {
    float lo = std::numeric_limits<float>::max();
    float hi = std::numeric_limits<float>::lowest();
    for (std::size_t i = begin; i < end; ++i) {
      const float v = descriptors_[ids[i]][static_cast<std::size_t>(d)];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      best_dim = d;
    }
  }

  const std::size_t mid = begin + (end - begin) / 2;
  const auto dim = static_cast<std::size_t>(best_dim);
  std::nth_element(ids.begin() + static_cast<std::ptrdiff_t>(begin),
                   ids.begin() + static_cast<std::ptrdiff_t>(mid),
                   ids.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) {
                     const float va = descriptors_[a][dim];
                     const float vb = descriptors_[b][dim];
                     return va < vb || (va == vb && a < b);
                   });
  // Left subtree holds values <= split, right subtree values >= split.
  const float split = descriptors_[ids[mid]][dim];
  const int left = build(ids, begin, mid);
  const int right = build(ids, mid, end);
  Node& node = nodes_[static_cast<std::size_t>(node_id)];
  node.split_dim = best_dim;
  node.split_value = split;
  node.left = left;
  node.right = right;
  return node_id;
}

NeighborResult KdIndex::nearest(std::span<const float, kDescriptorSize> query,
                                int max_checks) const {
  if (max_checks < 1) throw Error(ErrorCode::kInvalidArgument, "max_checks must be >= 1");

  struct Bin {
    double bound;  // squared lower bound on the distance to any point in the cell
    int node;
    bool operator>(const Bin& o) const {
      return bound > o.bound || (bound == o.bound && node > o.node);
    }
  };
  std::priority_queue<Bin, std::vector<Bin>, std::greater<>> queue;
  queue.push({0.0, 0});

  NeighborResult best{0, std::numeric_limits<double>::infinity()};
  double best_sq = std::numeric_limits<double>::infinity();
  int checks = 0;
  while (!queue.empty() && checks < max_checks) {
    const Bin bin = queue.top();
    queue.pop();
    if (bin.bound >= best_sq) break;
    int n = bin.node;
    while (nodes_[static_cast<std::size_t>(n)].split_dim >= 0) {
      const Node& node = nodes_[static_cast<std::size_t>(n)];
      const double diff =
          static_cast<double>(query[static_cast<std::size_t>(node.split_dim)]) - node.split_value;
      const int near = diff < 0.0 ? node.left : node.right;
      const int far = diff < 0.0 ? node.right : node.left;
      queue.push({std::max(bin.bound, diff * diff), far});
      n = near;
    }
    const auto id = static_cast<std::size_t>(nodes_[static_cast<std::size_t>(n)].leaf_id);
    ++checks;
    const double dist = descriptor_distance(query, descriptors_[id]);
    if (dist * dist < best_sq || (dist * dist == best_sq && id < best.id)) {
      best = {id, dist};
      best_sq = dist * dist;
    }
  }
  return best;
}

KdIndex build_index(std::vector<Descriptor> descriptors) { return KdIndex(std::move(descriptors)); }

NeighborResult nearest_neighbor_bbf(const KdIndex& index,
                                    std::span<const float, kDescriptorSize> query,
                                    int max_checks) {
  return index.nearest(query, max_checks);
}

}  // namespace alprs
