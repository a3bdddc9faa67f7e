#include "vasc/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace vasc {

KdTree3::KdTree3(std::span<const Vec3> points)
    : KdTree3(points, [&] {
        std::vector<int> all(points.size());
        std::iota(all.begin(), all.end(), 0);
        return all;
      }()) {}

KdTree3::KdTree3(std::span<const Vec3> points, std::vector<int> subset)
    : ids_(std::move(subset)) {
  points_.reserve(ids_.size());
  for (int id : ids_) points_.push_back(points[static_cast<std::size_t>(id)]);
  if (!ids_.empty()) {
    nodes_.reserve(ids_.size());
    root_ = build(0, static_cast<int>(ids_.size()), 0);
  }
}

int KdTree3::build(int begin, int end, int depth) {
  if (begin >= end) return -1;
  const int axis = depth % 3;
  const int mid = begin + (end - begin) / 2;

  // permute points_ and ids_ together around the median
  std::vector<int> order(static_cast<std::size_t>(end - begin));
  std::iota(order.begin(), order.end(), begin);
  std::nth_element(order.begin(), order.begin() + (mid - begin), order.end(),
                   [&](int a, int b) {
                     if (points_[a][axis] != points_[b][axis])
                       return points_[a][axis] < points_[b][axis];
                     return ids_[a] < ids_[b];
                   });
  // apply the permutation to the slice
  std::vector<Vec3> tmp_p(order.size());
  std::vector<int> tmp_i(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    tmp_p[k] = points_[order[k]];
    tmp_i[k] = ids_[order[k]];
  }
  std::copy(tmp_p.begin(), tmp_p.end(), points_.begin() + begin);
  std::copy(tmp_i.begin(), tmp_i.end(), ids_.begin() + begin);

  const int node_index = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{mid, axis, -1, -1});
  const int left = build(begin, mid, depth + 1);
  const int right = build(mid + 1, end, depth + 1);
  nodes_[node_index].left = left;
  nodes_[node_index].right = right;
  return node_index;
}

void KdTree3::search(int node, const Vec3& q, double& best_d2,
                     int& best_id) const {
  if (node < 0) return;
  const Node& n = nodes_[node];
  const Vec3& p = points_[n.point_id];
  const int id = ids_[n.point_id];
  const double d2 = (p - q).squaredNorm();
  if (d2 < best_d2 || (d2 == best_d2 && id < best_id)) {
    best_d2 = d2;
    best_id = id;
  }
  const double diff = q[n.axis] - p[n.axis];
  const int near = diff < 0.0 ? n.left : n.right;
  const int far = diff < 0.0 ? n.right : n.left;
  search(near, q, best_d2, best_id);
  if (diff * diff <= best_d2) search(far, q, best_d2, best_id);
}

int KdTree3::nearest(const Vec3& q) const {
  if (ids_.empty()) throw std::logic_error("KdTree3: nearest on empty tree");
  double best_d2 = std::numeric_limits<double>::infinity();
  int best_id = -1;
  search(root_, q, best_d2, best_id);
  return best_id;
}

} // namespace vasc
