#include "fsplit/collision.hpp"

#include <algorithm>
#include <cmath>

#include "fsplit/kinematics.hpp"

namespace fsplit {

double primitive_signed_distance(const CollisionPrimitive& prim,
                                 const Vec3& p_local) {
  if (prim.kind == PrimitiveKind::kCapsule) {
    const double a =
        std::clamp(p_local.z(), -prim.half_length, prim.half_length);
    return (p_local - Vec3(0.0, 0.0, a)).norm() - prim.radius;
  }
  const Vec3 d = p_local.cwiseAbs() - prim.half_extents;
  const Vec3 outside = d.cwiseMax(0.0);
  const double inside = std::min(d.maxCoeff(), 0.0);
  return outside.norm() + inside;
}

std::vector<PlacedPrimitive> place_primitives(const HandModel& hand,
                                              const Pose& palm_pose,
                                              const Eigen::VectorXd& q) {
  std::vector<PlacedPrimitive> placed;
  for (const auto& prim : hand.palm_links) {
    placed.push_back({&prim, palm_pose.compose(prim.local_pose)});
  }
  for (int i = 0; i < 3; ++i) {
    const JointChain& chain = hand.fingers[i];
    if (chain.links.empty()) continue;
    const Eigen::VectorXd qf = q.segment(hand.finger_offset(i), chain.dof());
    const std::vector<Pose> frames = fk_link_frames(chain, qf);
    for (const auto& prim : chain.links) {
      const Pose link = prim.joint_index < 0
                            ? palm_pose
                            : palm_pose.compose(frames[prim.joint_index]);
      placed.push_back({&prim, link.compose(prim.local_pose)});
    }
  }
  return placed;
}

namespace {

// Conservative world-frame bounds of a primitive inflated by `margin`.
Aabb primitive_bounds(const PlacedPrimitive& placed, double margin) {
  const CollisionPrimitive& prim = *placed.prim;
  Aabb box;
  if (prim.kind == PrimitiveKind::kCapsule) {
    const Vec3 axis = placed.world.rotation.col(2) * prim.half_length;
    const Vec3 a = placed.world.translation - axis;
    const Vec3 b = placed.world.translation + axis;
    const double r = prim.radius + margin;
    box.min = a.cwiseMin(b).array() - r;
    box.max = a.cwiseMax(b).array() + r;
  } else {
    const Vec3 extent =
        placed.world.rotation.cwiseAbs() * prim.half_extents;
    box.min = placed.world.translation - extent;
    box.max = placed.world.translation + extent;
    box.min.array() -= margin;
    box.max.array() += margin;
  }
  return box;
}

}  // namespace

bool col_detect(const HandModel& hand, const Pose& palm_pose,
                const Eigen::VectorXd& q, const CollisionProxy& proxy,
                double clearance, double pad_exclusion) {
  const std::vector<PlacedPrimitive> placed =
      place_primitives(hand, palm_pose, q);
  // Intended fingertip contacts press against the pad face; the allowance
  // absorbs both the contact snap tolerance and the proxy's own resolution
  // (centroids represent patches half a cell across).
  const double pad_allowance = pad_exclusion + 0.5 * proxy.source_cell;
  for (const auto& pp : placed) {
    const Aabb bounds = primitive_bounds(pp, clearance + 1e-9);
    const bool has_pad = pp.prim->pad_direction.norm() > 1e-12;
    for (const Vec3& p : proxy.points) {
      if ((p.array() < bounds.min.array()).any() ||
          (p.array() > bounds.max.array()).any()) {
        continue;
      }
      const Vec3 local = pp.world.rotation.transpose() *
                         (p - pp.world.translation);
      double threshold = clearance;
      if (has_pad && local.dot(pp.prim->pad_direction) > 0.0) {
        threshold -= pad_allowance;
      }
      if (primitive_signed_distance(*pp.prim, local) < threshold) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace fsplit
