#include "fixtures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace vasc::testing {

namespace {

constexpr double kPi = std::numbers::pi;

/*! Points of one triangulated disc slice: center first, then ring i
 *  (i = 1..rings) with 6 i points at radius i * (radius/rings). */
std::vector<Vec3> disc_points(double radius, int rings, double z) {
  std::vector<Vec3> pts;
  pts.emplace_back(0.0, 0.0, z);
  for (int i = 1; i <= rings; ++i) {
    const double r = radius * i / rings;
    const int n = 6 * i;
    for (int k = 0; k < n; ++k) {
      const double a = 2.0 * kPi * k / n;
      pts.emplace_back(r * std::cos(a), r * std::sin(a), z);
    }
  }
  return pts;
}

int ring_start(int ring) { return ring == 0 ? 0 : 1 + 3 * ring * (ring - 1); }

/*! Triangulates the annulus between ring i-1 (m points) and ring i (n points)
 *  by walking both rings in angle order. Produces m + n triangles. */
void annulus_triangles(int inner_start, int m, int outer_start, int n,
                       std::vector<std::array<int, 3>>& tris) {
  int a = 0;
  int b = 0;
  while (a < m || b < n) {
    const double next_in = 2.0 * kPi * (a + 1) / m;
    const double next_out = 2.0 * kPi * (b + 1) / n;
    if (b >= n || (a < m && next_in <= next_out)) {
      tris.push_back({inner_start + a % m, outer_start + b % n,
                      inner_start + (a + 1) % m});
      ++a;
    } else {
      tris.push_back({outer_start + b % n, outer_start + (b + 1) % n,
                      inner_start + a % m});
      ++b;
    }
  }
}

std::vector<std::array<int, 3>> disc_triangles(int rings) {
  std::vector<std::array<int, 3>> tris;
  for (int k = 0; k < 6; ++k) tris.push_back({0, 1 + k, 1 + (k + 1) % 6});
  for (int i = 2; i <= rings; ++i)
    annulus_triangles(ring_start(i - 1), 6 * (i - 1), ring_start(i), 6 * i, tris);
  return tris;
}

/*! Splits the prism (v[0..2] bottom, v[3..5] top) into three tets using the
 *  lowest-global-index rule so quad diagonals match across shared faces. */
void split_prism(const std::array<int, 6>& v,
                 std::vector<std::array<int, 4>>& tets) {
  static const int rot[6][6] = {
      {0, 1, 2, 3, 4, 5}, {1, 2, 0, 4, 5, 3}, {2, 0, 1, 5, 3, 4},
      {3, 5, 4, 0, 2, 1}, {4, 3, 5, 1, 0, 2}, {5, 4, 3, 2, 1, 0}};
  int imin = 0;
  for (int i = 1; i < 6; ++i)
    if (v[i] < v[imin]) imin = i;
  std::array<int, 6> p;
  for (int i = 0; i < 6; ++i) p[i] = v[rot[imin][i]];
  if (std::min(p[1], p[5]) < std::min(p[2], p[4])) {
    tets.push_back({p[0], p[1], p[2], p[5]});
    tets.push_back({p[0], p[1], p[5], p[4]});
    tets.push_back({p[0], p[4], p[5], p[3]});
  } else {
    tets.push_back({p[0], p[1], p[2], p[4]});
    tets.push_back({p[0], p[4], p[2], p[5]});
    tets.push_back({p[0], p[4], p[5], p[3]});
  }
}

/*! Boundary faces of a tet mesh: faces referenced by exactly one tet. */
std::vector<std::array<int, 3>> boundary_faces(
    const std::vector<std::array<int, 4>>& tets) {
  std::map<std::array<int, 3>, std::pair<std::array<int, 3>, int>> count;
  static const int face_of[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  for (const auto& t : tets)
    for (const auto& f : face_of) {
      std::array<int, 3> face = {t[f[0]], t[f[1]], t[f[2]]};
      std::array<int, 3> key = face;
      std::sort(key.begin(), key.end());
      auto [it, inserted] = count.try_emplace(key, std::make_pair(face, 0));
      ++it->second.second;
    }
  std::vector<std::array<int, 3>> boundary;
  for (const auto& [key, entry] : count)
    if (entry.second == 1) boundary.push_back(entry.first);
  return boundary;
}

} // namespace

VolumeMesh make_tube_mesh(double radius, double length, int rings, int slices) {
  if (rings < 1 || slices < 2) throw std::invalid_argument("tube too small");
  VolumeMesh mesh;
  const int per_slice = 1 + 3 * rings * (rings + 1);
  for (int s = 0; s < slices; ++s) {
    const double z = length * s / (slices - 1);
    for (const auto& p : disc_points(radius, rings, z)) mesh.nodes.push_back(p);
  }
  const auto tris = disc_triangles(rings);
  for (int s = 0; s + 1 < slices; ++s) {
    const int lo = s * per_slice;
    const int hi = lo + per_slice;
    for (const auto& t : tris)
      split_prism({lo + t[0], lo + t[1], lo + t[2], hi + t[0], hi + t[1],
                   hi + t[2]},
                  mesh.tets);
  }
  // lateral boundary = wall; the flat end caps stay untagged (in/outlets)
  const double rim = radius - 1e-9 * std::max(radius, 1.0);
  for (const auto& f : boundary_faces(mesh.tets)) {
    bool lateral = true;
    for (int id : f)
      if (mesh.nodes[id].head<2>().norm() < rim) lateral = false;
    if (lateral) mesh.wall_faces.push_back(f);
  }
  return mesh;
}

Centerline make_tube_centerline(double radius, double length, int stations,
                                double pressure, double flow) {
  Centerline cl;
  for (int i = 0; i < stations; ++i) {
    CenterlineNode n;
    n.position = Vec3(0.0, 0.0, length * i / (stations - 1));
    n.tangent = Vec3(0.0, 0.0, 1.0);
    n.area = kPi * radius * radius;
    n.branch = 0;
    n.pressure = pressure;
    n.flow = flow;
    cl.nodes.push_back(n);
  }
  return cl;
}

namespace {

double point_segment_dist(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double t =
      std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

} // namespace

VolumeMesh make_bifurcation_mesh(const BifurcationGeometry& geo) {
  const double th = geo.half_angle_deg * kPi / 180.0;
  const Vec3 junction(0.0, 0.0, geo.parent_length);
  const Vec3 dir_l(-std::sin(th), 0.0, std::cos(th));
  const Vec3 dir_r(std::sin(th), 0.0, std::cos(th));
  const Vec3 a0(0.0, 0.0, 0.0);
  const Vec3 end_l = junction + geo.child_length * dir_l;
  const Vec3 end_r = junction + geo.child_length * dir_r;

  auto inside = [&](const Vec3& p) {
    return point_segment_dist(p, a0, junction) <= geo.parent_radius ||
           point_segment_dist(p, junction, end_l) <= geo.child_radius ||
           point_segment_dist(p, junction, end_r) <= geo.child_radius;
  };

  const double h = geo.voxel;
  const double pad = 2.0 * h;
  const double x_ext =
      geo.child_length * std::sin(th) + geo.child_radius + pad;
  const double y_ext = geo.parent_radius + pad;
  const double z_max = end_l.z() + geo.child_radius + pad;
  const int nx = static_cast<int>(std::ceil(2.0 * x_ext / h));
  const int ny = static_cast<int>(std::ceil(2.0 * y_ext / h));
  const int nz = static_cast<int>(std::ceil(z_max / h));
  const Vec3 origin(-x_ext, -y_ext, 0.0);

  auto corner = [&](int i, int j, int k) -> Vec3 {
    return origin + h * Vec3(i, j, k);
  };
  // grid-node id allocation on demand, keyed by lexicographic (i, j, k)
  std::vector<int> node_id(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1),
                           -1);
  auto flat = [&](int i, int j, int k) {
    return (static_cast<std::size_t>(i) * (ny + 1) + j) * (nz + 1) + k;
  };

  VolumeMesh mesh;
  auto get_node = [&](int i, int j, int k) {
    int& id = node_id[flat(i, j, k)];
    if (id < 0) {
      id = static_cast<int>(mesh.nodes.size());
      mesh.nodes.push_back(corner(i, j, k));
    }
    return id;
  };

  // Freudenthal split: six tets per cube, one per axis-order permutation;
  // every face diagonal runs min-corner to max-corner, so neighbors conform.
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < nz; ++k) {
        const Vec3 center = corner(i, j, k) + 0.5 * h * Vec3::Ones();
        if (!inside(center)) continue;
        for (const auto& perm : perms) {
          std::array<int, 4> tet;
          int c[3] = {i, j, k};
          tet[0] = get_node(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[perm[s]];
            tet[s + 1] = get_node(c[0], c[1], c[2]);
          }
          mesh.tets.push_back(tet);
        }
      }
  return mesh;
}

Centerline make_bifurcation_centerline(const BifurcationGeometry& geo,
                                       int stations_per_branch,
                                       double pressure, double parent_flow) {
  const double th = geo.half_angle_deg * kPi / 180.0;
  const Vec3 junction(0.0, 0.0, geo.parent_length);
  const Vec3 dirs[3] = {Vec3(0.0, 0.0, 1.0),
                        Vec3(-std::sin(th), 0.0, std::cos(th)),
                        Vec3(std::sin(th), 0.0, std::cos(th))};
  Centerline cl;
  for (int b = 0; b < 3; ++b) {
    const bool parent = b == 0;
    const double r = parent ? geo.parent_radius : geo.child_radius;
    const double len = parent ? geo.parent_length : geo.child_length;
    // keep stations clear of the junction and the open voxelized ends
    const double s0 = parent ? 0.15 * len : r + 0.15 * len;
    const double s1 = parent ? len - geo.parent_radius : 0.85 * len;
    const Vec3 base = parent ? Vec3(0.0, 0.0, 0.0) : junction;
    for (int i = 0; i < stations_per_branch; ++i) {
      CenterlineNode n;
      const double s = s0 + (s1 - s0) * i / (stations_per_branch - 1);
      n.position = base + s * dirs[b];
      n.tangent = dirs[b];
      n.area = kPi * r * r;
      n.branch = b;
      n.pressure = pressure;
      n.flow = parent ? parent_flow : 0.5 * parent_flow;
      cl.nodes.push_back(n);
    }
  }
  return cl;
}

PeriodicWaveform make_pulsatile_inflow(double period, double q_mean, double a1,
                                       double a2, int n_samples) {
  std::vector<std::pair<double, double>> samples;
  samples.reserve(n_samples);
  for (int k = 0; k < n_samples; ++k) {
    const double t = period * k / n_samples;
    const double w = 2.0 * kPi * t / period;
    samples.emplace_back(t, q_mean * (1.0 + a1 * std::sin(w) +
                                      a2 * std::cos(2.0 * w)));
  }
  return PeriodicWaveform(period, std::move(samples));
}

RcrParameters make_random_rcr(std::mt19937& rng, double tau) {
  std::uniform_real_distribution<double> rd_dist(0.5, 2.0);
  std::uniform_real_distribution<double> ratio(0.05, 0.3);
  RcrParameters p;
  p.r_distal = rd_dist(rng);
  p.capacitance = tau / p.r_distal;
  p.r_proximal = ratio(rng) * p.r_distal;
  return p;
}

LumpedNetwork make_rcr_network(const RcrParameters& params,
                               const PeriodicWaveform& inflow) {
  LumpedNetwork net;
  net.node_count = 3;
  net.elements.push_back({ElementKind::resistor, params.r_proximal, 0, 1});
  net.elements.push_back({ElementKind::resistor, params.r_distal, 1, 2});
  net.elements.push_back({ElementKind::capacitor, params.capacitance, 1, 2});
  net.inflows.push_back({0, inflow});
  net.grounds.push_back({2, 0.0});
  return net;
}

LumpedNetwork make_multi_outlet_network(const std::vector<RcrParameters>& outlets,
                                        const PeriodicWaveform& inflow) {
  LumpedNetwork net;
  const int n = static_cast<int>(outlets.size());
  net.node_count = 2 + n;
  const int ground = 1 + n;
  for (int i = 0; i < n; ++i) {
    const int mid = 1 + i;
    net.elements.push_back({ElementKind::resistor, outlets[i].r_proximal, 0, mid});
    net.elements.push_back({ElementKind::resistor, outlets[i].r_distal, mid, ground});
    net.elements.push_back(
        {ElementKind::capacitor, outlets[i].capacitance, mid, ground});
  }
  net.inflows.push_back({0, inflow});
  net.grounds.push_back({ground, 0.0});
  return net;
}

} // namespace vasc::testing
