#include "fsplit/kinematics.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fsplit {

namespace {

using nlohmann::json;

Vec3 parse_vec3(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) {
    throw std::runtime_error("hand config: " + what +
                             " must be an array of 3 numbers");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

CollisionPrimitive parse_primitive(const json& j, int max_joint) {
  CollisionPrimitive prim;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "capsule") {
    prim.kind = PrimitiveKind::kCapsule;
    prim.radius = j.at("radius").get<double>();
    prim.half_length = j.at("half_length").get<double>();
    if (prim.radius <= 0.0 || prim.half_length <= 0.0) {
      throw std::runtime_error("hand config: capsule dimensions must be > 0");
    }
  } else if (kind == "box") {
    prim.kind = PrimitiveKind::kBox;
    prim.half_extents = parse_vec3(j.at("half_extents"), "half_extents");
    if ((prim.half_extents.array() <= 0.0).any()) {
      throw std::runtime_error("hand config: box half_extents must be > 0");
    }
  } else {
    throw std::runtime_error("hand config: unknown primitive kind '" + kind +
                             "'");
  }
  prim.joint_index = j.value("joint", -1);
  if (prim.joint_index >= max_joint) {
    throw std::runtime_error("hand config: primitive joint index out of range");
  }
  if (j.contains("origin")) {
    prim.local_pose.translation = parse_vec3(j["origin"], "primitive origin");
  }
  if (j.contains("z_axis")) {
    // Orient the primitive's z axis; x picked orthogonally.
    Vec3 z = parse_vec3(j["z_axis"], "primitive z_axis");
    if (z.norm() < 1e-12) {
      throw std::runtime_error("hand config: primitive z_axis is zero");
    }
    z.normalize();
    Vec3 x = Vec3::UnitX() - z * z.x();
    if (x.norm() < 1e-6) x = Vec3::UnitY() - z * z.y();
    x.normalize();
    prim.local_pose.rotation.col(0) = x;
    prim.local_pose.rotation.col(1) = z.cross(x);
    prim.local_pose.rotation.col(2) = z;
  }
  if (j.contains("pad_direction")) {
    // Given in the same (link) frame as origin/z_axis; store primitive-local.
    const Vec3 pad = parse_vec3(j["pad_direction"], "pad_direction");
    prim.pad_direction = prim.local_pose.rotation.transpose() * pad;
  }
  return prim;
}

JointChain parse_chain(const json& j) {
  JointChain chain;
  chain.name = j.value("name", std::string("finger"));
  if (!j.contains("joints") || !j["joints"].is_array() || j["joints"].empty()) {
    throw std::runtime_error("hand config: finger '" + chain.name +
                             "' needs a non-empty joints array");
  }
  for (const auto& jj : j["joints"]) {
    RevoluteJoint joint;
    joint.name = jj.value("name", std::string("joint"));
    joint.origin = parse_vec3(jj.at("origin"), "joint origin");
    joint.axis = parse_vec3(jj.at("axis"), "joint axis");
    if (joint.axis.norm() < 1e-12) {
      throw std::runtime_error("hand config: joint '" + joint.name +
                               "' has a zero axis");
    }
    joint.axis.normalize();
    if (!jj.contains("limits") || !jj["limits"].is_array() ||
        jj["limits"].size() != 2) {
      throw std::runtime_error("hand config: joint '" + joint.name +
                               "' needs limits [lower, upper]");
    }
    joint.lower = jj["limits"][0].get<double>();
    joint.upper = jj["limits"][1].get<double>();
    if (!(joint.lower < joint.upper)) {
      throw std::runtime_error("hand config: joint '" + joint.name +
                               "' limits must satisfy lower < upper");
    }
    chain.joints.push_back(joint);
  }
  chain.fingertip_offset =
      parse_vec3(j.at("fingertip_offset"), "fingertip_offset");
  if (j.contains("fingertip_normal")) {
    chain.fingertip_normal =
        parse_vec3(j["fingertip_normal"], "fingertip_normal");
    if (chain.fingertip_normal.norm() < 1e-12) {
      throw std::runtime_error("hand config: fingertip_normal is zero");
    }
    chain.fingertip_normal.normalize();
  }
  if (j.contains("links")) {
    for (const auto& pj : j["links"]) {
      chain.links.push_back(parse_primitive(pj, chain.dof()));
    }
  }
  return chain;
}

}  // namespace

int HandModel::finger_offset(int finger) const {
  int off = 0;
  for (int i = 0; i < finger; ++i) off += fingers[i].dof();
  return off;
}

Eigen::VectorXd HandModel::midpoint_q() const {
  Eigen::VectorXd q(dof());
  int k = 0;
  for (const auto& f : fingers) {
    for (const auto& j : f.joints) q[k++] = j.midpoint();
  }
  return q;
}

Eigen::VectorXd HandModel::lower_limits() const {
  Eigen::VectorXd q(dof());
  int k = 0;
  for (const auto& f : fingers) {
    for (const auto& j : f.joints) q[k++] = j.lower;
  }
  return q;
}

Eigen::VectorXd HandModel::upper_limits() const {
  Eigen::VectorXd q(dof());
  int k = 0;
  for (const auto& f : fingers) {
    for (const auto& j : f.joints) q[k++] = j.upper;
  }
  return q;
}

Eigen::VectorXd HandModel::clamp(const Eigen::VectorXd& q) const {
  Eigen::VectorXd out = q;
  int k = 0;
  for (const auto& f : fingers) {
    for (const auto& j : f.joints) {
      out[k] = std::min(std::max(out[k], j.lower), j.upper);
      ++k;
    }
  }
  return out;
}

HandModel load_hand_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open hand config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("hand config " + path + ": " + e.what());
  }

  HandModel hand;
  hand.name = j.value("name", std::string("hand"));
  if (!j.contains("fingers") || !j["fingers"].is_array() ||
      j["fingers"].size() != 3) {
    throw std::runtime_error("hand config: exactly 3 fingers required");
  }
  for (int i = 0; i < 3; ++i) hand.fingers[i] = parse_chain(j["fingers"][i]);
  if (j.contains("palm_links")) {
    for (const auto& pj : j["palm_links"]) {
      hand.palm_links.push_back(parse_primitive(pj, 0));
    }
  }
  if (j.contains("pregrasp_q")) {
    const auto& pq = j["pregrasp_q"];
    if (!pq.is_array() || static_cast<int>(pq.size()) != hand.dof()) {
      throw std::runtime_error(
          "hand config: pregrasp_q must have one entry per joint");
    }
    hand.pregrasp_q.resize(hand.dof());
    for (int i = 0; i < hand.dof(); ++i) {
      hand.pregrasp_q[i] = pq[i].get<double>();
    }
    hand.pregrasp_q = hand.clamp(hand.pregrasp_q);
  }
  return hand;
}

std::vector<Pose> fk_link_frames(const JointChain& chain,
                                 const Eigen::VectorXd& q_finger) {
  if (q_finger.size() != chain.dof()) {
    throw std::invalid_argument("fk_link_frames: joint vector size mismatch");
  }
  std::vector<Pose> frames;
  frames.reserve(chain.joints.size());
  Pose t = Pose::identity();
  for (size_t k = 0; k < chain.joints.size(); ++k) {
    const RevoluteJoint& joint = chain.joints[k];
    Pose step;
    step.translation = joint.origin;
    step.rotation = rotation_exp(joint.axis * q_finger[static_cast<int>(k)]);
    t = t.compose(step);
    frames.push_back(t);
  }
  return frames;
}

std::array<FingertipState, 3> fk_fingertips(const HandModel& hand,
                                            const Pose& palm,
                                            const Eigen::VectorXd& q) {
  if (q.size() != hand.dof()) {
    throw std::invalid_argument("fk_fingertips: joint vector size mismatch");
  }
  std::array<FingertipState, 3> tips;
  for (int i = 0; i < 3; ++i) {
    const JointChain& chain = hand.fingers[i];
    const Eigen::VectorXd qf = q.segment(hand.finger_offset(i), chain.dof());
    const Pose last = palm.compose(fk_link_frames(chain, qf).back());
    tips[i].frame.rotation = last.rotation;
    tips[i].frame.translation = last.apply(chain.fingertip_offset);
    tips[i].position = tips[i].frame.translation;
    tips[i].normal = last.rotation * chain.fingertip_normal;
  }
  return tips;
}

Eigen::MatrixXd jacobian_q2c(const HandModel& hand, const Pose& palm,
                             const Eigen::VectorXd& q) {
  if (q.size() != hand.dof()) {
    throw std::invalid_argument("jacobian_q2c: joint vector size mismatch");
  }
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(9, hand.dof());
  for (int i = 0; i < 3; ++i) {
    const JointChain& chain = hand.fingers[i];
    const int off = hand.finger_offset(i);
    const Eigen::VectorXd qf = q.segment(off, chain.dof());
    const std::vector<Pose> frames = fk_link_frames(chain, qf);
    const Vec3 tip = palm.apply(frames.back().apply(chain.fingertip_offset));
    for (int k = 0; k < chain.dof(); ++k) {
      const Vec3 axis =
          palm.rotation * (frames[k].rotation * chain.joints[k].axis);
      const Vec3 origin = palm.apply(frames[k].translation);
      jac.block<3, 1>(3 * i, off + k) = axis.cross(tip - origin);
    }
  }
  return jac;
}

Eigen::Matrix<double, 6, 9> grasp_map(const std::array<Vec3, 3>& positions,
                                      const std::array<Vec3, 3>& normals) {
  Eigen::Matrix<double, 6, 9> g;
  for (int i = 0; i < 3; ++i) {
    if (normals[i].norm() < 1e-12) {
      throw std::invalid_argument("grasp_map: contact normal is zero");
    }
    const Mat3 r_ci = contact_frame(normals[i]);
    g.block<3, 3>(0, 3 * i) = r_ci;
    g.block<3, 3>(3, 3 * i) = skew(positions[i]) * r_ci;
  }
  return g;
}

Eigen::Matrix<double, 6, 9> grasp_map(
    const std::array<SurfacePoint, 3>& contacts) {
  return grasp_map({contacts[0].position, contacts[1].position,
                    contacts[2].position},
                   {contacts[0].normal, contacts[1].normal,
                    contacts[2].normal});
}

Eigen::MatrixXd hand_jacobian(const HandModel& hand, const Pose& palm,
                              const Eigen::VectorXd& q,
                              const std::array<SurfacePoint, 3>& contacts) {
  const Eigen::MatrixXd jac = jacobian_q2c(hand, palm, q);
  Eigen::MatrixXd jh = Eigen::MatrixXd::Zero(9, hand.dof());
  for (int i = 0; i < 3; ++i) {
    const Mat3 r_ci = contact_frame(contacts[i].normal);
    jh.middleRows<3>(3 * i) = r_ci.transpose() * jac.middleRows<3>(3 * i);
  }
  return jh;
}

Eigen::MatrixXd damped_pinv(const Eigen::MatrixXd& m, double lambda) {
  // (M^T M + lambda I)^-1 M^T computed via SVD for stability.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  Eigen::VectorXd inv(s.size());
  for (int i = 0; i < s.size(); ++i) {
    inv[i] = s[i] / (s[i] * s[i] + lambda);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace fsplit
