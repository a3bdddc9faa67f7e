#ifndef VASC_CENTERLINE_MAP_HPP
#define VASC_CENTERLINE_MAP_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "vasc/kdtree.hpp"

namespace vasc {

/*! One node of the centerline polyline graph, carrying the periodic
 *  reduced-order solution snapshot. */
struct CenterlineNode {
  Vec3 position = Vec3::Zero();
  Vec3 tangent = Vec3::Zero();
  double area = 0.0;
  int branch = 0;
  double pressure = 0.0;
  double flow = 0.0;
};

/*! Polyline graph: consecutive nodes with equal branch id form one branch
 *  path; segments connect consecutive nodes of a branch. */
struct Centerline {
  std::vector<CenterlineNode> nodes;

  void validate() const;
  /*! (first node, last node) index ranges of each branch path, in order. */
  std::vector<std::pair<int, int>> branch_ranges() const;
  /*! All segments as (node, node+1) index pairs. */
  std::vector<std::pair<int, int>> segments() const;
};

/*! Tetrahedral mesh with tagged wall faces. */
struct VolumeMesh {
  std::vector<Vec3> nodes;
  std::vector<std::array<int, 4>> tets;
  std::vector<std::array<int, 3>> wall_faces;

  void validate() const;
  /*! point -> incident cells adjacency. */
  std::vector<std::vector<int>> point_cells() const;
  /*! point -> point edge adjacency (from tet edges, deduplicated). */
  std::vector<std::vector<int>> point_neighbors() const;
  /*! true per node on a tagged wall face. */
  std::vector<bool> wall_node_mask() const;
};

/*! Volume-node to centerline-node assignment plus the growth layer at which
 *  each node was reached (seeds are layer 0). */
struct NodeMap {
  std::vector<std::int32_t> index; // centerline node per volume node
  std::vector<std::int32_t> layer;
  std::int32_t layer_count = 0;
  std::int32_t centerline_count = 0;

  bool total() const;
};

/*! Seeds the map: for each centerline node in order, the nearest volume node
 *  becomes a seed (first-processed centerline node wins duplicates).
 *  Unassigned entries are -1. */
std::vector<int> seed_map(const Centerline& centerline, const VolumeMesh& mesh,
                          NodeMap& map);

/*! Grows the seeded map layer by layer over point-cell-point connectivity;
 *  each new node inherits the assignment of the closest node in the previous
 *  layer. Throws if any node is unreachable from the seeds. */
void grow_map(const VolumeMesh& mesh, const std::vector<int>& seeds, NodeMap& map);

/*! Builds the complete map (seed + grow). */
NodeMap build_node_map(const Centerline& centerline, const VolumeMesh& mesh);

/*! Gathers a per-centerline-node field onto the volume nodes. */
std::vector<double> map_scalar(const NodeMap& map,
                               std::span<const double> centerline_field);

} // namespace vasc

#endif
