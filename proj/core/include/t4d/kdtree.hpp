#pragma once

#include <utility>
#include <vector>

#include "t4d/mesh.hpp"

namespace t4d {

// Static kd-tree over 3D points. Queries are exact: the reported squared
// distance equals the brute-force minimum, and ties resolve to the lowest
// point index.
class KdTree3 {
 public:
  explicit KdTree3(const VertexMatrix& points);

  struct Hit {
    int index = -1;
    double squared_distance = 0.0;
  };

  Hit nearest(const Vec3& query) const;

  // Indices of all points with ||p - query|| <= radius, ascending.
  void radius_query(const Vec3& query, double radius, std::vector<int>& out) const;

  int size() const { return static_cast<int>(points_.rows()); }

 private:
  struct Node {
    // Leaf iff axis == -1; then [begin, end) indexes order_.
    int axis = -1;
    double split = 0.0;
    int left = -1, right = -1;
    int begin = 0, end = 0;
  };

  int build(int begin, int end);
  void nearest_recurse(int node, const Vec3& query, Hit& best) const;
  void radius_recurse(int node, const Vec3& query, double r2,
                      std::vector<int>& out) const;

  VertexMatrix points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;

  static constexpr int kLeafSize = 8;
};

}  // namespace t4d
