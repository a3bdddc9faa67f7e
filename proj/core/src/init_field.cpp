#include "vasc/init_field.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace vasc {

namespace {

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

/*! Distance from x to the centerline segments adjacent to node k. */
double distance_to_adjacent_segments(const Vec3& x, const Centerline& cl, int k,
                                     const std::pair<int, int>& branch) {
  double d = std::numeric_limits<double>::infinity();
  if (k > branch.first)
    d = std::min(d, point_segment_distance(x, cl.nodes[k - 1].position,
                                           cl.nodes[k].position));
  if (k < branch.second)
    d = std::min(d, point_segment_distance(x, cl.nodes[k].position,
                                           cl.nodes[k + 1].position));
  if (!std::isfinite(d)) d = (x - cl.nodes[k].position).norm();
  return d;
}

/*! Multi-source Dijkstra over the mesh edge graph with Euclidean weights. */
std::vector<double> wall_distance(const VolumeMesh& mesh,
                                  const std::vector<bool>& wall_mask) {
  const auto neighbors = mesh.point_neighbors();
  std::vector<double> dist(mesh.nodes.size(),
                           std::numeric_limits<double>::infinity());
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  for (std::size_t p = 0; p < wall_mask.size(); ++p)
    if (wall_mask[p]) {
      dist[p] = 0.0;
      queue.emplace(0.0, static_cast<int>(p));
    }
  while (!queue.empty()) {
    const auto [d, p] = queue.top();
    queue.pop();
    if (d > dist[p]) continue;
    for (int q : neighbors[p]) {
      const double nd = d + (mesh.nodes[p] - mesh.nodes[q]).norm();
      if (nd < dist[q]) {
        dist[q] = nd;
        queue.emplace(nd, q);
      }
    }
  }
  return dist;
}

} // namespace

RadialCoordinate radial_coordinate(const VolumeMesh& mesh, const NodeMap& map,
                                   const Centerline& centerline,
                                   RadialMode mode) {
  mesh.validate();
  centerline.validate();
  if (!map.total())
    throw std::invalid_argument("radial_coordinate: node map is not total");
  if (mode == RadialMode::wall_distance && mesh.wall_faces.empty())
    throw std::invalid_argument("radial_coordinate: mesh has no tagged wall faces");

  // branch range per centerline node
  std::vector<std::pair<int, int>> branch_of(centerline.nodes.size());
  for (const auto& range : centerline.branch_ranges())
    for (int i = range.first; i <= range.second; ++i) branch_of[i] = range;

  RadialCoordinate rc;
  rc.rho.resize(mesh.nodes.size());
  const std::vector<bool> wall = mesh.wall_node_mask();

  if (mode == RadialMode::wall_distance) {
    const std::vector<double> d_wall = wall_distance(mesh, wall);
    for (std::size_t p = 0; p < mesh.nodes.size(); ++p) {
      if (wall[p]) {
        rc.rho[p] = 1.0;
        continue;
      }
      const int k = map.index[p];
      const double d_cl = distance_to_adjacent_segments(mesh.nodes[p],
                                                        centerline, k,
                                                        branch_of[k]);
      const double denom = d_cl + d_wall[p];
      rc.rho[p] = denom > 0.0 ? std::clamp(d_cl / denom, 0.0, 1.0) : 0.0;
    }
  } else {
    for (std::size_t p = 0; p < mesh.nodes.size(); ++p) {
      if (wall[p]) {
        rc.rho[p] = 1.0;
        continue;
      }
      const int k = map.index[p];
      const double d_cl = distance_to_adjacent_segments(mesh.nodes[p],
                                                        centerline, k,
                                                        branch_of[k]);
      const double radius = std::sqrt(centerline.nodes[k].area / M_PI);
      rc.rho[p] = std::clamp(d_cl / radius, 0.0, 1.0);
    }
  }
  return rc;
}

std::vector<Vec3> tangent_field(const Centerline& centerline) {
  std::vector<Vec3> tangents(centerline.nodes.size());
  for (const auto& [first, last] : centerline.branch_ranges()) {
    if (last - first < 1)
      throw std::invalid_argument("tangent_field: branch with fewer than 2 nodes");
    for (int i = first; i <= last; ++i) {
      const int a = std::max(first, i - 1);
      const int b = std::min(last, i + 1);
      const Vec3 d = centerline.nodes[b].position - centerline.nodes[a].position;
      const double len = d.norm();
      if (len == 0.0)
        throw std::invalid_argument("tangent_field: coincident consecutive nodes");
      tangents[i] = d / len;
    }
  }
  return tangents;
}

std::vector<Vec3> reconstruct_velocity(const NodeMap& map,
                                       std::span<const double> flow,
                                       std::span<const double> area,
                                       const RadialCoordinate& rho,
                                       std::span<const Vec3> tangents,
                                       const std::vector<bool>& wall_mask) {
  const std::size_t n_cl = flow.size();
  if (area.size() != n_cl || tangents.size() != n_cl)
    throw std::invalid_argument("reconstruct_velocity: inconsistent centerline field lengths");
  if (rho.rho.size() != map.index.size() || wall_mask.size() != map.index.size())
    throw std::invalid_argument("reconstruct_velocity: inconsistent volume field lengths");
  for (double s : area)
    if (!(s > 0.0))
      throw std::invalid_argument("reconstruct_velocity: area must be > 0");

  std::vector<Vec3> velocity(map.index.size());
  for (std::size_t p = 0; p < map.index.size(); ++p) {
    if (wall_mask[p]) {
      velocity[p] = Vec3::Zero(); // no-slip, exact
      continue;
    }
    const std::int32_t k = map.index[p];
    const double r = rho.rho[p];
    const double magnitude = 2.0 * (flow[k] / area[k]) * (1.0 - r * r);
    velocity[p] = magnitude * tangents[k];
  }
  return velocity;
}

std::vector<double> map_pressure(const NodeMap& map,
                                 std::span<const double> centerline_pressure) {
  return map_scalar(map, centerline_pressure);
}

double cross_section_flux(const VolumeMesh& mesh, std::span<const Vec3> velocity,
                          const Centerline& centerline, const NodeMap& map,
                          int station) {
  if (station < 0 || station >= static_cast<int>(centerline.nodes.size()))
    throw std::invalid_argument("cross_section_flux: station out of range");
  std::pair<int, int> branch{-1, -1};
  for (const auto& range : centerline.branch_ranges())
    if (station >= range.first && station <= range.second) branch = range;
  if (station == branch.first || station == branch.second)
    throw std::invalid_argument("cross_section_flux: station must be interior to a branch");

  const Vec3 normal = centerline.nodes[station].tangent.normalized();
  const double radius = std::sqrt(centerline.nodes[station].area / M_PI);
  const double spacing =
      std::min((centerline.nodes[station].position -
                centerline.nodes[station - 1].position).norm(),
               (centerline.nodes[station + 1].position -
                centerline.nodes[station].position).norm());
  const int window =
      std::max(2, static_cast<int>(std::ceil(1.5 * radius / spacing)));

  // cells mapped near the station: any node assigned to the same branch
  // within the index window
  std::vector<int> cells;
  for (int c = 0; c < static_cast<int>(mesh.tets.size()); ++c) {
    for (int q : mesh.tets[c]) {
      const int k = map.index[q];
      if (k >= branch.first && k <= branch.second &&
          std::abs(k - station) <= window) {
        cells.push_back(c);
        break;
      }
    }
  }

  Vec3 origin = centerline.nodes[station].position;
  for (int attempt = 0; attempt < 8; ++attempt) {
    bool degenerate = false;
    for (int c : cells) {
      for (int q : mesh.tets[c])
        if (std::abs(normal.dot(mesh.nodes[q] - origin)) < 1e-9 * radius)
          degenerate = true;
      if (degenerate) break;
    }
    if (!degenerate) break;
    origin += (1e-5 * radius) * normal; // nudge the plane off mesh nodes
  }

  double flux = 0.0;
  bool any_cut = false;
  std::vector<Vec3> pts, vels;
  for (int c : cells) {
    const auto& tet = mesh.tets[c];
    std::array<double, 4> d;
    for (int i = 0; i < 4; ++i) d[i] = normal.dot(mesh.nodes[tet[i]] - origin);
    pts.clear();
    vels.clear();
    static constexpr int edges[6][2] = {{0, 1}, {0, 2}, {0, 3},
                                        {1, 2}, {1, 3}, {2, 3}};
    for (const auto& e : edges) {
      const double da = d[e[0]], db = d[e[1]];
      if ((da > 0.0) == (db > 0.0)) continue;
      const double t = da / (da - db);
      pts.push_back(mesh.nodes[tet[e[0]]] +
                    t * (mesh.nodes[tet[e[1]]] - mesh.nodes[tet[e[0]]]));
      vels.push_back(velocity[tet[e[0]]] +
                     t * (velocity[tet[e[1]]] - velocity[tet[e[0]]]));
    }
    if (pts.size() < 3) continue;
    any_cut = true;
    if (pts.size() == 4) {
      // order the quad around its centroid in the cut plane
      const Vec3 centroid = 0.25 * (pts[0] + pts[1] + pts[2] + pts[3]);
      Vec3 u = (pts[0] - centroid).normalized();
      Vec3 w = normal.cross(u);
      std::array<int, 4> order{0, 1, 2, 3};
      std::array<double, 4> angle;
      for (int i = 0; i < 4; ++i) {
        const Vec3 r = pts[i] - centroid;
        angle[i] = std::atan2(w.dot(r), u.dot(r));
      }
      std::sort(order.begin(), order.end(),
                [&](int a, int b) { return angle[a] < angle[b]; });
      std::vector<Vec3> sp(4), sv(4);
      for (int i = 0; i < 4; ++i) {
        sp[i] = pts[order[i]];
        sv[i] = vels[order[i]];
      }
      pts = std::move(sp);
      vels = std::move(sv);
    }
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      const Vec3 a = 0.5 * (pts[i] - pts[0]).cross(pts[i + 1] - pts[0]);
      const double area = std::abs(a.dot(normal));
      const Vec3 v_mean = (vels[0] + vels[i] + vels[i + 1]) / 3.0;
      flux += v_mean.dot(normal) * area;
    }
  }
  if (!any_cut)
    throw std::runtime_error("cross_section_flux: degenerate cut (no intersected cells)");
  return flux;
}

InitialConditionField build_initial_conditions(const VolumeMesh& mesh,
                                               const NodeMap& map,
                                               const Centerline& centerline,
                                               RadialMode mode) {
  std::vector<double> pressure_cl(centerline.nodes.size());
  std::vector<double> flow_cl(centerline.nodes.size());
  std::vector<double> area_cl(centerline.nodes.size());
  for (std::size_t i = 0; i < centerline.nodes.size(); ++i) {
    pressure_cl[i] = centerline.nodes[i].pressure;
    flow_cl[i] = centerline.nodes[i].flow;
    area_cl[i] = centerline.nodes[i].area;
  }

  InitialConditionField field;
  field.pressure = map_pressure(map, pressure_cl);

  const bool has_flow =
      std::any_of(flow_cl.begin(), flow_cl.end(), [](double q) { return q != 0.0; });
  if (has_flow) {
    const RadialCoordinate rho = radial_coordinate(mesh, map, centerline, mode);
    const std::vector<Vec3> tangents = tangent_field(centerline);
    field.velocity = reconstruct_velocity(map, flow_cl, area_cl, rho, tangents,
                                          mesh.wall_node_mask());
  } else {
    field.velocity.assign(mesh.nodes.size(), Vec3::Zero());
  }
  return field;
}

double olufsen_pressure(double area, double ref_area, double ref_pressure,
                        double ref_radius, double k1, double k2, double k3,
                        StiffnessLaw law) {
  if (!(area > 0.0) || !(ref_area > 0.0))
    throw std::invalid_argument("olufsen_pressure: areas must be > 0");
  if (!(ref_radius > 0.0))
    throw std::invalid_argument("olufsen_pressure: reference radius must be > 0");
  const double stiffness = law == StiffnessLaw::exponent_offset
                               ? k1 * std::exp(k2 * ref_radius + k3)
                               : k1 * std::exp(k2 * ref_radius) + k3;
  return ref_pressure +
         (4.0 / 3.0) * stiffness * (1.0 - std::sqrt(ref_area / area));
}

} // namespace vasc
