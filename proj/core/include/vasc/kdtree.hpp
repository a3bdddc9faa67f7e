#ifndef VASC_KDTREE_HPP
#define VASC_KDTREE_HPP

#include <Eigen/Core>

#include <span>
#include <vector>

namespace vasc {

using Vec3 = Eigen::Vector3d;

/*! @brief Static k-d partitioning over a point set for nearest-neighbor
 *  queries in expected O(log n). Ties on distance resolve to the lowest
 *  point id for determinism. */
class KdTree3 {
public:
  /*! Builds over all points; ids are indices into the span. */
  explicit KdTree3(std::span<const Vec3> points);

  /*! Builds over a subset; queries return ids from the subset. */
  KdTree3(std::span<const Vec3> points, std::vector<int> subset);

  /*! Id of the nearest point to q. */
  int nearest(const Vec3& q) const;

  bool empty() const { return ids_.empty(); }

private:
  struct Node {
    int point_id;
    int axis;
    int left = -1;
    int right = -1;
  };

  int build(int begin, int end, int depth);
  void search(int node, const Vec3& q, double& best_d2, int& best_id) const;

  std::vector<Vec3> points_; // local copy, indexed by original id
  std::vector<int> ids_;     // permuted during build
  std::vector<Node> nodes_;
  int root_ = -1;
};

} // namespace vasc

#endif
