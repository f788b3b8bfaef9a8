#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "aortamesh/vec3.hpp"

namespace aorta {

/// Static k-d tree over a point cloud answering exact nearest-neighbour
/// queries. Among equidistant candidates the lowest point index wins, so
/// results match an exhaustive scan bit for bit.
class KdTree {
 public:
  struct Hit {
    std::size_t index = 0;
    double distance = 0.0;
    double distance2 = 0.0;
  };

  KdTree() = default;
  /// Throws Error(EmptyInput) for an empty cloud.
  explicit KdTree(std::vector<Vec3> points, std::size_t leaf_size = 12);

  Hit nearest(const Vec3& query) const;

  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<Vec3>& points() const noexcept { return points_; }

 private:
  struct Node {
    // Leaves: [begin, end) into order_. Inner nodes: split axis/value and
    // children; `left`/`right` index into nodes_.
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    int axis = -1;
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, const Vec3& q, Hit& best) const;

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::size_t leaf_size_ = 12;
};

using SpatialIndex = KdTree;

/// Builds the index; throws Error(EmptyInput) if the cloud is empty.
KdTree build_spatial_index(std::vector<Vec3> cloud);

}  // namespace aorta
