#include "fsplit/ppo.hpp"

#include <chrono>

#include "fsplit/cpo.hpp"
#include "fsplit/logging.hpp"

namespace fsplit {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(const Clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Eigen::MatrixXd tracking_pinv(const Eigen::MatrixXd& jac) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
  const double smin = svd.singularValues().minCoeff();
  if (smin < 1e-8) {
    logging::debug("tracker Jacobian near singular (sigma_min = " +
                   std::to_string(smin) + "), damping 1e-6");
    return damped_pinv(jac, 1e-6);
  }
  return damped_pinv(jac, 1e-12);
}

}  // namespace

PpoTangentResult ppo_tangent_step(const Eigen::Matrix<double, 6, 9>& g,
                                  const Eigen::MatrixXd& j_h,
                                  const Eigen::VectorXd& grad_q,
                                  const PpoParams& params) {
  PpoTangentResult out;
  out.d_q = Eigen::VectorXd::Zero(grad_q.size());

  Eigen::Matrix<double, 9, 9> m = g.transpose() * g + j_h * j_h.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 9, 9>> es(m);
  const double emax = es.eigenvalues().maxCoeff();
  if (es.eigenvalues().minCoeff() < params.damping * std::max(emax, 1.0)) {
    m.diagonal().array() += params.damping;
  }
  const Eigen::Matrix<double, 9, 1> y = m.ldlt().solve(j_h * grad_q);
  out.d_c = g * y;
  out.d_q = grad_q - j_h.transpose() * y;

  const double dq_norm = out.d_q.norm();
  if (dq_norm < 1e-12) {
    out.stationary = true;
    out.d_c.setZero();
    out.d_q.setZero();
    return out;
  }
  const Eigen::Matrix<double, 6, 1> v = params.sigma * out.d_c / dq_norm;
  out.v_des.linear = v.head<3>();
  out.v_des.angular = v.tail<3>();
  return out;
}

PpoCandidate ppo_project(const Pose& object_in_palm, const Twist& v_des,
                         const Eigen::VectorXd& q,
                         const std::array<SurfacePoint, 3>& contacts,
                         const PpoParams& params, const HandModel& hand) {
  PpoCandidate out;
  out.object_pose_in_palm = se3_exp(object_in_palm, v_des, params.t_s);

  // Contact targets after the object motion; transport velocities still use
  // the pre-update orientation, matching the one-step tracker linearization.
  Eigen::Matrix<double, 9, 1> c_des;
  Eigen::Matrix<double, 9, 1> v_c;
  for (int i = 0; i < 3; ++i) {
    const Vec3& ci = contacts[i].position;
    c_des.segment<3>(3 * i) = out.object_pose_in_palm.apply(ci);
    v_c.segment<3>(3 * i) =
        object_in_palm.rotation *
        (v_des.linear - ci.cross(v_des.angular));
  }

  const Pose palm_local = Pose::identity();
  const std::array<FingertipState, 3> tips = fk_fingertips(hand, palm_local, q);
  Eigen::Matrix<double, 9, 1> f;
  for (int i = 0; i < 3; ++i) f.segment<3>(3 * i) = tips[i].position;

  const Eigen::MatrixXd jac = jacobian_q2c(hand, palm_local, q);
  const Eigen::VectorXd q_dot =
      tracking_pinv(jac) * (v_c + params.k_gain * (c_des - f));
  out.q = hand.clamp(q + q_dot * params.t_s);
  return out;
}

PpoOutcome run_ppo(const Pose& object_in_palm, const Eigen::VectorXd& q,
                   const std::array<SurfacePoint, 3>& contacts,
                   const PpoParams& params, const SurfaceModel& surface,
                   const HandModel& hand, const CollisionProxy& proxy,
                   const QualityWeights& weights) {
  PpoOutcome out;
  out.object_pose_in_palm = object_in_palm;
  out.q = q;
  out.reason = TerminationReason::kMaxIters;

  // Contacts never move in the object frame; surface is consulted only to
  // restate their normals (n_des is constant through the run).
  std::array<Vec3, 3> positions;
  std::array<Vec3, 3> n_des;
  for (int i = 0; i < 3; ++i) {
    positions[i] = contacts[i].position;
    n_des[i] = contacts[i].vertex_id >= 0 &&
                       contacts[i].vertex_id <
                           static_cast<int>(surface.vertices().size())
                   ? surface.point(contacts[i].vertex_id).normal
                   : contacts[i].normal;
  }
  const double q_obj = q_object(positions);
  const Eigen::Matrix<double, 6, 9> g = grasp_map(contacts);

  double q_now = weights.w1 * q_obj + weights.w2 * q_hand(hand, out.q);

  int it = 0;
  while (it < params.max_iters) {
    ++it;

    const auto t_tangent = Clock::now();
    const Pose palm_world = out.object_pose_in_palm.inverse();
    const Eigen::MatrixXd j_h = hand_jacobian(hand, palm_world, out.q,
                                              contacts);
    const Eigen::VectorXd grad_q = weights.w2 * grad_q_hand(hand, out.q);
    const PpoTangentResult tangent = ppo_tangent_step(g, j_h, grad_q, params);
    out.timers.tangent_ms += ms_since(t_tangent);

    if (tangent.stationary) {
      out.reason = TerminationReason::kQualityConverged;
      break;
    }

    const auto t_proj = Clock::now();
    const PpoCandidate candidate =
        ppo_project(out.object_pose_in_palm, tangent.v_des, out.q, contacts,
                    params, hand);
    const double q_des =
        weights.w1 * q_obj + weights.w2 * q_hand(hand, candidate.q);
    const double delta_q = q_des - q_now;

    const Pose palm_des = candidate.object_pose_in_palm.inverse();
    const std::array<FingertipState, 3> tips_des =
        fk_fingertips(hand, palm_des, candidate.q);
    const bool misaligned = alignment_stop(n_des, tips_des, params.gamma,
                                           params.literal_alignment_stop);
    out.timers.projection_ms += ms_since(t_proj);

    const auto t_col = Clock::now();
    const bool collide = col_detect(hand, palm_des, candidate.q, proxy, 0.0,
                                    params.contact_tolerance);
    out.timers.collision_ms += ms_since(t_col);

    if (delta_q <= params.delta) {
      out.reason = TerminationReason::kQualityConverged;
      break;
    }
    if (misaligned) {
      out.reason = TerminationReason::kNormalLimit;
      break;
    }
    if (collide) {
      out.reason = TerminationReason::kCollision;
      break;
    }

    out.object_pose_in_palm = candidate.object_pose_in_palm;
    out.q = candidate.q;
    q_now = q_des;

    TraceRow row;
    row.phase = Phase::kPpo;
    row.inner = it;
    row.q_object = q_obj;
    row.q_hand = q_hand(hand, out.q);
    row.q_total = q_now;
    for (int i = 0; i < 3; ++i) row.contacts[i] = positions[i];
    const double scale =
        std::max(tangent.d_c.norm() + tangent.d_q.norm(), 1e-300);
    row.residual_kinematic =
        (g.transpose() * tangent.d_c - j_h * tangent.d_q).norm() / scale;
    row.step_norm = tangent.d_q.norm();
    out.trace.push_back(row);
  }
  out.iterations = it;
  return out;
}

}  // namespace fsplit
