#pragma once

#include <vector>

#include "fsplit/geometry.hpp"

namespace fsplit {

struct HandModel;

enum class PrimitiveKind { kCapsule, kBox };

/// Link-attached collision shape, expressed in the frame of the joint it
/// follows. joint_index = -1 attaches the shape to the chain root (or the
/// palm, for palm-level primitives).
struct CollisionPrimitive {
  PrimitiveKind kind = PrimitiveKind::kCapsule;
  int joint_index = -1;
  Pose local_pose;                    // primitive frame in link frame
  Vec3 half_extents = Vec3::Zero();   // box
  double radius = 0.0;                // capsule
  double half_length = 0.0;           // capsule, along local z
  Vec3 pad_direction = Vec3::Zero();  // local; nonzero marks a fingertip pad
};

/// Sparse object stand-in used by the stop-condition collision test.
struct CollisionProxy {
  std::vector<Vec3> points;  // object frame
  double source_cell = 0.0;
};

/// Signed distance from a point (primitive-local coordinates) to the
/// primitive surface; negative inside.
double primitive_signed_distance(const CollisionPrimitive& prim,
                                 const Vec3& p_local);

/// A primitive instanced at its world pose for the current configuration.
struct PlacedPrimitive {
  const CollisionPrimitive* prim = nullptr;
  Pose world;
};

/// Instantiates every palm and finger-link primitive at the given palm pose
/// and joint vector.
std::vector<PlacedPrimitive> place_primitives(const HandModel& hand,
                                              const Pose& palm_pose,
                                              const Eigen::VectorXd& q);

/// True iff any proxy point lies inside any link primitive inflated by
/// `clearance`. Points on a fingertip pad side must penetrate an extra
/// `pad_exclusion` so intended contacts do not trip the test.
/// `palm_pose` is the palm pose expressed in the frame of the proxy points.
bool col_detect(const HandModel& hand, const Pose& palm_pose,
                const Eigen::VectorXd& q, const CollisionProxy& proxy,
                double clearance = 0.0, double pad_exclusion = 1e-3);

}  // namespace fsplit
