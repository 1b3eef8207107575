#include "fsplit/geometry.hpp"

#include <cmath>

namespace fsplit {

void Pose::orthonormalize() {
  Eigen::Quaterniond q(rotation);
  q.normalize();
  rotation = q.toRotationMatrix();
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

Mat3 rotation_exp(const Vec3& omega) {
  const double theta = omega.norm();
  if (theta < 1e-12) {
    return Mat3::Identity() + skew(omega);
  }
  const Vec3 axis = omega / theta;
  return Eigen::AngleAxisd(theta, axis).toRotationMatrix();
}

Pose se3_exp(const Pose& g, const Twist& v, double dt) {
  const Vec3 w = v.angular * dt;
  const Vec3 u = v.linear * dt;
  const double theta = w.norm();

  Pose delta;
  delta.rotation = rotation_exp(w);
  if (theta < 1e-12) {
    delta.translation = u;
  } else {
    const Mat3 wx = skew(w);
    // V = I + (1-cos)/t^2 [w] + (t-sin)/t^3 [w]^2 with [w] already scaled.
    const Mat3 vmat = Mat3::Identity() +
                      ((1.0 - std::cos(theta)) / (theta * theta)) * wx +
                      ((theta - std::sin(theta)) / (theta * theta * theta)) *
                          (wx * wx);
    delta.translation = vmat * u;
  }

  Pose out = g.compose(delta);
  out.orthonormalize();
  return out;
}

Mat3 contact_frame(const Vec3& outward_normal) {
  const Vec3 z = -outward_normal.normalized();
  Vec3 x = Vec3::UnitX() - Vec3::UnitX().dot(z) * z;
  if (x.norm() < 1e-6) {
    x = Vec3::UnitY() - Vec3::UnitY().dot(z) * z;
  }
  x.normalize();
  const Vec3 y = z.cross(x);
  Mat3 frame;
  frame.col(0) = x;
  frame.col(1) = y;
  frame.col(2) = z;
  return frame;
}

}  // namespace fsplit
