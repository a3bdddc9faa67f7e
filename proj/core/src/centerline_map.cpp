#include "vasc/centerline_map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vasc {

void Centerline::validate() const {
  if (nodes.empty()) throw std::invalid_argument("Centerline: empty");
  for (const auto& n : nodes) {
    if (!(n.area > 0.0))
      throw std::invalid_argument("Centerline: node area must be > 0");
    if (std::abs(n.tangent.norm() - 1.0) > 1e-6)
      throw std::invalid_argument("Centerline: tangents must be unit-norm");
  }
  for (const auto& [first, last] : branch_ranges())
    if (last - first < 1)
      throw std::invalid_argument("Centerline: each branch needs >= 2 nodes");
}

std::vector<std::pair<int, int>> Centerline::branch_ranges() const {
  std::vector<std::pair<int, int>> ranges;
  int first = 0;
  for (int i = 1; i <= static_cast<int>(nodes.size()); ++i) {
    if (i == static_cast<int>(nodes.size()) ||
        nodes[i].branch != nodes[first].branch) {
      ranges.emplace_back(first, i - 1);
      first = i;
    }
  }
  return ranges;
}

std::vector<std::pair<int, int>> Centerline::segments() const {
  std::vector<std::pair<int, int>> segs;
  for (const auto& [first, last] : branch_ranges())
    for (int i = first; i < last; ++i) segs.emplace_back(i, i + 1);
  return segs;
}

void VolumeMesh::validate() const {
  if (nodes.empty() || tets.empty())
    throw std::invalid_argument("VolumeMesh: empty mesh");
  const int n = static_cast<int>(nodes.size());
  for (const auto& t : tets)
    for (int id : t)
      if (id < 0 || id >= n)
        throw std::invalid_argument("VolumeMesh: tet node id out of range");
  for (const auto& f : wall_faces)
    for (int id : f)
      if (id < 0 || id >= n)
        throw std::invalid_argument("VolumeMesh: wall face node id out of range");
}

std::vector<std::vector<int>> VolumeMesh::point_cells() const {
  std::vector<std::vector<int>> adjacency(nodes.size());
  for (int c = 0; c < static_cast<int>(tets.size()); ++c)
    for (int id : tets[c]) adjacency[id].push_back(c);
  return adjacency;
}

std::vector<std::vector<int>> VolumeMesh::point_neighbors() const {
  std::vector<std::vector<int>> adjacency(nodes.size());
  for (const auto& t : tets)
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) {
        adjacency[t[a]].push_back(t[b]);
        adjacency[t[b]].push_back(t[a]);
      }
  for (auto& list : adjacency) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adjacency;
}

std::vector<bool> VolumeMesh::wall_node_mask() const {
  std::vector<bool> mask(nodes.size(), false);
  for (const auto& f : wall_faces)
    for (int id : f) mask[id] = true;
  return mask;
}

bool NodeMap::total() const {
  return std::none_of(index.begin(), index.end(),
                      [](std::int32_t i) { return i < 0; });
}

std::vector<int> seed_map(const Centerline& centerline, const VolumeMesh& mesh,
                          NodeMap& map) {
  centerline.validate();
  mesh.validate();
  map.index.assign(mesh.nodes.size(), -1);
  map.layer.assign(mesh.nodes.size(), -1);
  map.layer_count = 0;
  map.centerline_count = static_cast<std::int32_t>(centerline.nodes.size());

  KdTree3 tree(mesh.nodes);
  std::vector<int> seeds;
  for (int p = 0; p < static_cast<int>(centerline.nodes.size()); ++p) {
    const int q = tree.nearest(centerline.nodes[p].position);
    if (map.index[q] < 0) { // first-processed centerline node wins
      map.index[q] = p;
      map.layer[q] = 0;
      seeds.push_back(q);
    }
  }
  return seeds;
}

void grow_map(const VolumeMesh& mesh, const std::vector<int>& seeds,
              NodeMap& map) {
  if (seeds.empty()) throw std::invalid_argument("grow_map: no seeds");
  const auto point_cells = mesh.point_cells();

  std::vector<bool> cell_seen(mesh.tets.size(), false);
  std::vector<bool> assigned(mesh.nodes.size(), false);
  for (int s : seeds) assigned[s] = true;

  std::vector<int> old_layer = seeds;
  std::int32_t layer = 0;
  while (!old_layer.empty()) {
    std::vector<int> new_layer;
    for (int p : old_layer) {
      for (int c : point_cells[p]) {
        if (cell_seen[c]) continue;
        cell_seen[c] = true;
        for (int q : mesh.tets[c]) {
          if (assigned[q]) continue;
          assigned[q] = true;
          new_layer.push_back(q);
        }
      }
    }
    if (new_layer.empty()) break;
    ++layer;
    // inherit the assignment of the closest node in the previous layer
    KdTree3 tree(mesh.nodes, old_layer);
    for (int p : new_layer) {
      const int q = tree.nearest(mesh.nodes[p]);
      map.index[p] = map.index[q];
      map.layer[p] = layer;
    }
    old_layer = std::move(new_layer);
  }
  map.layer_count = layer + 1;

  const auto unreachable =
      std::count(assigned.begin(), assigned.end(), false);
  if (unreachable > 0)
    throw std::runtime_error("grow_map: " + std::to_string(unreachable) +
                             " node(s) unreachable from the seeds (disconnected mesh)");
}

NodeMap build_node_map(const Centerline& centerline, const VolumeMesh& mesh) {
  NodeMap map;
  const std::vector<int> seeds = seed_map(centerline, mesh, map);
  grow_map(mesh, seeds, map);
  return map;
}

std::vector<double> map_scalar(const NodeMap& map,
                               std::span<const double> centerline_field) {
  if (map.centerline_count > 0 &&
      centerline_field.size() != static_cast<std::size_t>(map.centerline_count))
    throw std::invalid_argument("map_scalar: field length does not match the centerline");
  std::vector<double> out(map.index.size());
  for (std::size_t p = 0; p < map.index.size(); ++p) {
    const std::int32_t i = map.index[p];
    if (i < 0 || static_cast<std::size_t>(i) >= centerline_field.size())
      throw std::out_of_range("map_scalar: unassigned or out-of-range map entry");
    out[p] = centerline_field[i];
  }
  return out;
}

} // namespace vasc
