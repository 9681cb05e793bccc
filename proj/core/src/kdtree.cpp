#include "t4d/kdtree.hpp"

#include <algorithm>
#include <numeric>

#include "t4d/errors.hpp"

namespace t4d {

namespace {

inline double sqdist(const VertexMatrix& pts, int i, const Vec3& q) {
  const double dx = pts(i, 0) - q[0];
  const double dy = pts(i, 1) - q[1];
  const double dz = pts(i, 2) - q[2];
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace

KdTree3::KdTree3(const VertexMatrix& points) : points_(points) {
  if (points_.rows() == 0) throw ValidationError("kd-tree: empty point set");
  order_.resize(points_.rows());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(static_cast<size_t>(2 * points_.rows() / kLeafSize + 4));
  root_ = build(0, static_cast<int>(order_.size()));
}

int KdTree3::build(int begin, int end) {
  Node node;
  if (end - begin <= kLeafSize) {
    node.begin = begin;
    node.end = end;
    // ascending indices inside a leaf give the lowest-index tie-break for free
    std::sort(order_.begin() + begin, order_.begin() + end);
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size()) - 1;
  }

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (int i = begin; i < end; ++i) {
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], points_(order_[i], a));
      hi[a] = std::max(hi[a], points_(order_[i], a));
    }
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);

  const int mid = (begin + end) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](int a, int b) {
                     const double pa = points_(a, axis), pb = points_(b, axis);
                     return pa < pb || (pa == pb && a < b);
                   });
  node.axis = axis;
  node.split = points_(order_[mid], axis);

  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

KdTree3::Hit KdTree3::nearest(const Vec3& query) const {
  Hit best;
  best.squared_distance = std::numeric_limits<double>::infinity();
  nearest_recurse(root_, query, best);
  return best;
}

void KdTree3::nearest_recurse(int node_id, const Vec3& query, Hit& best) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const int idx = order_[i];
      const double d2 = sqdist(points_, idx, query);
      if (d2 < best.squared_distance ||
          (d2 == best.squared_distance && idx < best.index)) {
        best.squared_distance = d2;
        best.index = idx;
      }
    }
    return;
  }

  const double diff = query[node.axis] - node.split;
  const int near = diff < 0.0 ? node.left : node.right;
  const int far = diff < 0.0 ? node.right : node.left;
  nearest_recurse(near, query, best);
  // the far side can still hold an equal-distance lower index, so recurse on ==
  if (diff * diff <= best.squared_distance) {
    nearest_recurse(far, query, best);
  }
}

void KdTree3::radius_query(const Vec3& query, double radius,
                           std::vector<int>& out) const {
  out.clear();
  if (radius < 0.0) return;
  radius_recurse(root_, query, radius * radius, out);
  std::sort(out.begin(), out.end());
}

void KdTree3::radius_recurse(int node_id, const Vec3& query, double r2,
                             std::vector<int>& out) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const int idx = order_[i];
      if (sqdist(points_, idx, query) <= r2) out.push_back(idx);
    }
    return;
  }
  const double diff = query[node.axis] - node.split;
  const int near = diff < 0.0 ? node.left : node.right;
  const int far = diff < 0.0 ? node.right : node.left;
  radius_recurse(near, query, r2, out);
  if (diff * diff <= r2) radius_recurse(far, query, r2, out);
}

}  // namespace t4d
