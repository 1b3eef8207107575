#pragma once

#include <Eigen/Dense>

namespace fsplit {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rigid transform: x_parent = rotation * x_local + translation.
/// rotation is kept orthonormal with det +1; call orthonormalize() after
/// accumulating many updates.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return Pose{}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  Pose compose(const Pose& other) const {
    return Pose{rotation * other.rotation,
                rotation * other.translation + translation};
  }

  Pose inverse() const {
    Mat3 rt = rotation.transpose();
    return Pose{rt, -(rt * translation)};
  }

  void orthonormalize();
};

/// Body twist, (linear; angular) order.
struct Twist {
  Vec3 linear = Vec3::Zero();
  Vec3 angular = Vec3::Zero();
};

Mat3 skew(const Vec3& v);

/// Rotation by angle*|axis| about axis (Rodrigues). Safe for tiny angles.
Mat3 rotation_exp(const Vec3& omega);

/// Right-multiplies g by exp of the body twist integrated over dt and
/// re-orthonormalizes the result.
Pose se3_exp(const Pose& g, const Twist& v, double dt);

/// Deterministic tangent frame for a contact: z along -normal (inward),
/// x the normalized projection of the global x axis onto the tangent
/// plane (global y when nearly parallel), y = z cross x.
Mat3 contact_frame(const Vec3& outward_normal);

}  // namespace fsplit
