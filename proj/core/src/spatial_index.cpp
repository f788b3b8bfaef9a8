#include "aortamesh/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "aortamesh/error.hpp"

namespace aorta {

KdTree::KdTree(std::vector<Vec3> points, std::size_t leaf_size)
    : points_(std::move(points)), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
  if (points_.empty()) throw Error(ErrorKind::EmptyInput, "cannot index an empty point cloud");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * points_.size() / leaf_size_ + 2);
  build(0, static_cast<std::uint32_t>(points_.size()));
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= leaf_size_) return id;

  Vec3 lo = points_[order_[begin]];
  Vec3 hi = lo;
  for (std::uint32_t i = begin; i < end; ++i) {
    const Vec3& p = points_[order_[i]];
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  int axis = 0;
  for (int a = 1; a < 3; ++a) {
    if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
  }
  if (hi[axis] - lo[axis] == 0.0) return id;  // all coincident: keep as leaf

  const std::uint32_t mid = begin + (end - begin) / 2;
  auto less = [&](std::uint32_t a, std::uint32_t b) {
    const double pa = points_[a][axis];
    const double pb = points_[b][axis];
    return pa < pb || (pa == pb && a < b);
  };
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, less);
  const double split = points_[order_[mid]][axis];

  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  Node& node = nodes_[static_cast<std::size_t>(id)];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

void KdTree::search(std::int32_t id, const Vec3& q, Hit& best) const {
  const Node& node = nodes_[static_cast<std::size_t>(id)];
  if (node.axis < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const std::uint32_t pi = order_[i];
      const double d2 = distance2(points_[pi], q);
      if (d2 < best.distance2 || (d2 == best.distance2 && pi < best.index)) {
        best.distance2 = d2;
        best.index = pi;
      }
    }
    return;
  }
  // Left holds coordinates <= split, right holds >= split.
  const double diff = q[node.axis] - node.split;
  const std::int32_t first = diff <= 0.0 ? node.left : node.right;
  const std::int32_t second = diff <= 0.0 ? node.right : node.left;
  search(first, q, best);
  // Equal distance still has to be explored for the lower-index tie-break.
  if (diff * diff <= best.distance2) search(second, q, best);
}

KdTree::Hit KdTree::nearest(const Vec3& query) const {
  Hit best;
  best.index = std::numeric_limits<std::size_t>::max();
  best.distance2 = std::numeric_limits<double>::infinity();
  search(0, query, best);
  best.distance = std::sqrt(best.distance2);
  return best;
}

KdTree build_spatial_index(std::vector<Vec3> cloud) { return KdTree(std::move(cloud)); }

}  // namespace aorta
