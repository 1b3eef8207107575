#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fsplit/collision.hpp"
#include "fsplit/geometry.hpp"
#include "fsplit/surface.hpp"

namespace fsplit {

struct RevoluteJoint {
  std::string name;
  Vec3 origin = Vec3::Zero();  // translation from parent link frame
  Vec3 axis = Vec3::UnitZ();   // rotation axis, unit, in local frame
  double lower = 0.0;
  double upper = 0.0;
  double midpoint() const { return 0.5 * (lower + upper); }
  double range() const { return upper - lower; }
};

/// Serial revolute chain rooted at the palm frame. The frame after joint k is
///   T_k = T_{k-1} * Trans(origin_k) * Rot(axis_k, q_k),
/// and the fingertip sits at T_last * fingertip_offset.
struct JointChain {
  std::string name;
  std::vector<RevoluteJoint> joints;
  Vec3 fingertip_offset = Vec3::Zero();
  Vec3 fingertip_normal = Vec3::UnitZ();  // outward pad normal, last-link frame
  std::vector<CollisionPrimitive> links;  // collision shapes, any joint
  int dof() const { return static_cast<int>(joints.size()); }
};

struct HandModel {
  std::string name;
  Pose palm_frame;  // convention anchor; identity unless re-rooted
  std::array<JointChain, 3> fingers;
  std::vector<CollisionPrimitive> palm_links;
  Eigen::VectorXd pregrasp_q;  // optional; empty -> joint midpoints

  int dof() const {
    return fingers[0].dof() + fingers[1].dof() + fingers[2].dof();
  }
  int finger_offset(int finger) const;  // index of finger's first joint in q
  Eigen::VectorXd midpoint_q() const;
  Eigen::VectorXd lower_limits() const;
  Eigen::VectorXd upper_limits() const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& q) const;
};

/// Loads a hand description from JSON (schema in hands/README.md). Throws
/// std::runtime_error with a descriptive message on malformed input.
HandModel load_hand_config(const std::string& path);

/// Planner state. The object mesh is loaded centered at the world origin and
/// never moves; `palm` is the hand root pose in world coordinates and
/// `contacts` live on the object (== world frame).
struct GraspState {
  Pose palm;
  Eigen::VectorXd q;
  std::array<SurfacePoint, 3> contacts;
  Pose object_pose;  // world; identity throughout the pipeline

  /// g_po: the object pose as seen from the palm.
  Pose object_in_palm() const {
    return palm.inverse().compose(object_pose);
  }
};

struct FingertipState {
  Pose frame;     // final-link frame translated to the fingertip (world)
  Vec3 position;  // == frame.translation
  Vec3 normal;    // pad outward normal in world coordinates
};

/// Forward kinematics of all fingertips in world coordinates.
std::array<FingertipState, 3> fk_fingertips(const HandModel& hand,
                                            const Pose& palm,
                                            const Eigen::VectorXd& q);

/// Poses of every link frame (one per joint) in the palm frame; used by the
/// collision test and scene export.
std::vector<Pose> fk_link_frames(const JointChain& chain,
                                 const Eigen::VectorXd& q_finger);

/// 9xN positional Jacobian mapping joint rates to stacked world-frame
/// fingertip velocities. Block-diagonal: rows 3i..3i+2 belong to finger i,
/// each column is axis x (tip - joint origin).
Eigen::MatrixXd jacobian_q2c(const HandModel& hand, const Pose& palm,
                             const Eigen::VectorXd& q);

/// Grasp map for three frictional point contacts. Column block i is
///   G_i = [ R_ci ; skew(c_i) * R_ci ],
/// with R_ci the contact frame derived from the surface normal and c_i the
/// contact position, both in object coordinates. Throws on zero normals.
Eigen::Matrix<double, 6, 9> grasp_map(const std::array<Vec3, 3>& positions,
                                      const std::array<Vec3, 3>& normals);
Eigen::Matrix<double, 6, 9> grasp_map(
    const std::array<SurfacePoint, 3>& contacts);

/// Hand Jacobian J_h (9xN): block row i maps joint rates of finger i to the
/// fingertip velocity expressed in contact frame i, so that the static
/// contact identity grasp_map^T * V = J_h * qdot holds, V being the body
/// twist of the object relative to the palm.
Eigen::MatrixXd hand_jacobian(const HandModel& hand, const Pose& palm,
                              const Eigen::VectorXd& q,
                              const std::array<SurfacePoint, 3>& contacts);

/// Damped least-squares pseudo-inverse (Tikhonov) used by the contact
/// trackers; tolerates rank-deficient Jacobians.
Eigen::MatrixXd damped_pinv(const Eigen::MatrixXd& m, double lambda = 1e-10);

}  // namespace fsplit
