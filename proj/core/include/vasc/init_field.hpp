#ifndef VASC_INIT_FIELD_HPP
#define VASC_INIT_FIELD_HPP

#include <span>
#include <vector>

#include "vasc/centerline_map.hpp"

namespace vasc {

/*! Per-volume-node initial-condition fields. */
struct InitialConditionField {
  std::vector<double> pressure;
  std::vector<Vec3> velocity;
};

/*! Normalized radial coordinate: 0 on the centerline axis, 1 on the wall. */
struct RadialCoordinate {
  std::vector<double> rho;
};

enum class RadialMode {
  wall_distance, // d_cl / (d_cl + d_wall); requires tagged wall faces
  area_radius,   // d_cl / sqrt(S/pi); fallback when wall tags are absent
};

/*! Builds the radial coordinate. d_cl is the distance to the centerline
 *  segments adjacent to the assigned node; d_wall is the graph-propagated
 *  Euclidean distance to the nearest wall node. Wall nodes are forced to
 *  rho = 1. */
RadialCoordinate radial_coordinate(const VolumeMesh& mesh, const NodeMap& map,
                                   const Centerline& centerline,
                                   RadialMode mode = RadialMode::wall_distance);

/*! Unit tangents from central differences of the branch polyline,
 *  one-sided at branch ends, oriented with increasing path parameter. */
std::vector<Vec3> tangent_field(const Centerline& centerline);

/*! Parabolic velocity reconstruction:
 *  v(p) = 2 (Q[I_p]/S[I_p]) (1 - rho_p^2) t̂[I_p];
 *  the factor 2 makes the section average equal Q/S on a circular section.
 *  Wall nodes are set to exactly zero. */
std::vector<Vec3> reconstruct_velocity(const NodeMap& map,
                                       std::span<const double> flow,
                                       std::span<const double> area,
                                       const RadialCoordinate& rho,
                                       std::span<const Vec3> tangents,
                                       const std::vector<bool>& wall_mask);

/*! Gather of the centerline pressure onto the volume nodes. */
std::vector<double> map_pressure(const NodeMap& map,
                                 std::span<const double> centerline_pressure);

/*! Integrates v·n over the cross-section cut by the plane through the given
 *  centerline node, normal to its tangent, restricted to cells mapped near
 *  that station. Throws on a degenerate (empty) cut. */
double cross_section_flux(const VolumeMesh& mesh, std::span<const Vec3> velocity,
                          const Centerline& centerline, const NodeMap& map,
                          int station);

/*! Complete field assembly from a mapped centerline solution. When the
 *  centerline carries no flow (all zero), the velocity field is zeroed. */
InitialConditionField build_initial_conditions(const VolumeMesh& mesh,
                                               const NodeMap& map,
                                               const Centerline& centerline,
                                               RadialMode mode = RadialMode::wall_distance);

enum class StiffnessLaw {
  exponent_offset, // Eh/r0 = k1 exp(k2 r0 + k3)
  additive_offset, // Eh/r0 = k1 exp(k2 r0) + k3
};

/*! Pressure from cross-sectional area via the exponential-stiffness tube law
 *  P = P0 + (4/3)(Eh/r0)(1 - sqrt(S0/S)). The two stiffness variants differ
 *  in how the constant k3 enters; exponent_offset is the default. */
double olufsen_pressure(double area, double ref_area, double ref_pressure,
                        double ref_radius, double k1, double k2, double k3,
                        StiffnessLaw law = StiffnessLaw::exponent_offset);

} // namespace vasc

#endif
