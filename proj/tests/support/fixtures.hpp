#pragma once

#include <functional>
#include <string>

#include "fsplit/kinematics.hpp"
#include "fsplit/surface.hpp"

namespace fsplit::testing {

// Procedural watertight meshes, meters. SurfaceModel re-centers them at the
// vertex centroid, so absolute offsets in the generators do not matter.
SurfaceModel icosphere(int subdivisions, double radius);

// Icosphere topology with a per-direction radius; fn receives a unit vector.
SurfaceModel bumpy_sphere(int subdivisions,
                          const std::function<double(const Vec3&)>& radius_fn);

// Axis-aligned box with faces gridded at roughly `cell` spacing.
SurfaceModel box_mesh(const Vec3& half_extents, double cell);

SurfaceModel torus_mesh(double major_radius, double minor_radius,
                        int major_segments, int minor_segments);

// Capsule-shaped rod along x (cylinder with hemispherical caps).
SurfaceModel rod_mesh(double radius, double cylinder_half_length,
                      int segments, int axial_rings, int cap_rings);

// Latitude/longitude sphere: rings * segments + 2 vertices.
SurfaceModel uv_sphere(int rings, int segments, double radius);

// The five benchmark objects (sphere / box / torus / scan-like blob / tool).
SurfaceModel fixture_sphere();
SurfaceModel fixture_box();
SurfaceModel fixture_torus();
SurfaceModel fixture_blob();  // ~41K vertices, gently bumpy scan stand-in
SurfaceModel fixture_tool();

// Shipped 8-DOF three-finger hand (loaded once, shared).
const HandModel& default_hand();

// Same geometry with joint limits stretched well past the defaults.
HandModel wide_limit_hand();

// Fresh scratch directory under the system temp dir.
std::string temp_dir(const std::string& tag);

}  // namespace fsplit::testing
