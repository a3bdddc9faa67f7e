#ifndef VASC_TEST_FIXTURES_HPP
#define VASC_TEST_FIXTURES_HPP

#include <random>
#include <vector>

#include "vasc/centerline_map.hpp"
#include "vasc/network.hpp"
#include "vasc/rcr.hpp"
#include "vasc/waveform.hpp"

namespace vasc::testing {

/*! Straight tube of radius `radius` along +z from z = 0 to z = length,
 *  extruded from a triangulated disc: `rings` concentric point rings per
 *  slice, `slices` z-stations, prisms split into tets with a diagonal rule
 *  that keeps shared quad faces conformal. Lateral boundary faces are tagged
 *  as wall. */
VolumeMesh make_tube_mesh(double radius, double length, int rings, int slices);

/*! Axis polyline for make_tube_mesh: `stations` nodes on the z axis with
 *  tangent +z, area pi r^2, and the given (uniform) pressure and flow. */
Centerline make_tube_centerline(double radius, double length, int stations,
                                double pressure = 0.0, double flow = 0.0);

/*! Geometry of a planar symmetric bifurcation: a parent capsule along +z
 *  splitting into two children in the x-z plane. */
struct BifurcationGeometry {
  double parent_radius = 0.6;
  double child_radius = 0.45;
  double parent_length = 2.0;
  double child_length = 2.0;
  double half_angle_deg = 35.0;
  double voxel = 0.12;
};

/*! Voxelized bifurcation: structured grid cubes whose centers lie inside the
 *  capsule union, each cube split into six tets (Freudenthal/Kuhn, conformal
 *  across neighbors). No wall faces are tagged; use the area-radius radial
 *  mode with this fixture. */
VolumeMesh make_bifurcation_mesh(const BifurcationGeometry& geo = {});

/*! Centerline for make_bifurcation_mesh: branch 0 on the parent axis,
 *  branches 1 and 2 on the child axes. Parent carries parent_flow, children
 *  carry parent_flow / 2 each. */
Centerline make_bifurcation_centerline(const BifurcationGeometry& geo,
                                       int stations_per_branch,
                                       double pressure, double parent_flow);

/*! Smooth pulsatile inflow sampled at `n_samples` knots over one period:
 *  q(t) = q_mean (1 + a1 sin(2 pi t/T) + a2 cos(4 pi t/T)). */
PeriodicWaveform make_pulsatile_inflow(double period, double q_mean,
                                       double a1 = 0.6, double a2 = 0.25,
                                       int n_samples = 100);

/*! Random RCR parameters with the requested time constant tau = Rd C. */
RcrParameters make_random_rcr(std::mt19937& rng, double tau);

/*! Network that is exactly one RCR boundary condition driven by `inflow`:
 *  node 0 inflow, Rp 0->1, Rd 1->2, C 1->2, ground at node 2. */
LumpedNetwork make_rcr_network(const RcrParameters& params,
                               const PeriodicWaveform& inflow);

/*! Star network with one inflow node and `outlet taus.size()` parallel RCR
 *  branches whose time constants are the given taus. */
LumpedNetwork make_multi_outlet_network(const std::vector<RcrParameters>& outlets,
                                        const PeriodicWaveform& inflow);

} // namespace vasc::testing

#endif
