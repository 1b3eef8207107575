#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fsplit/collision.hpp"
#include "fsplit/kinematics.hpp"
#include "fsplit/quality.hpp"
#include "fsplit/surface.hpp"
#include "fsplit/trace.hpp"

namespace fsplit {

struct PpoParams {
  double sigma = 0.5;   // joint-motion trust region, rad
  double k_gain = 2.0;  // tracking gain K = k_gain * I9, 1/s
  double delta = 0.0;   // minimum accepted quality increment
  double gamma = 0.6;
  int max_iters = 50;
  double t_s = 0.05;
  bool literal_alignment_stop = false;
  double damping = 1e-10;
  double contact_tolerance = 1e-3;
};

struct PpoOutcome {
  Pose object_pose_in_palm;  // g_po after the last accepted step
  Eigen::VectorXd q;
  int iterations = 0;
  TerminationReason reason = TerminationReason::kMaxIters;
  std::vector<TraceRow> trace;
  PhaseTimers timers;
};

struct PpoTangentResult {
  Twist v_des;  // desired object body twist relative to the palm
  Eigen::Matrix<double, 6, 1> d_c = Eigen::Matrix<double, 6, 1>::Zero();
  Eigen::VectorXd d_q;
  bool stationary = false;
};

/// Tangent direction of the palm-pose subproblem: the steepest ascent of
/// grad_q under the static-contact coupling G^T V = J_h qdot, obtained from
/// the normal equations of the orthogonal projection onto that subspace:
///   y = (G^T G + J_h J_h^T)^{-1} J_h grad_q,  d_c = G y,  d_q = grad_q - J_h^T y,
/// then V_des = sigma * d_c / |d_q| (zero and stationary when |d_q| < 1e-12).
PpoTangentResult ppo_tangent_step(const Eigen::Matrix<double, 6, 9>& g,
                                  const Eigen::MatrixXd& j_h,
                                  const Eigen::VectorXd& grad_q,
                                  const PpoParams& params);

struct PpoCandidate {
  Pose object_pose_in_palm;
  Eigen::VectorXd q;
};

/// Nonlinear projection: advance the object pose along the body twist, then
/// track the (statically attached) contacts with one stiffness step using
/// their updated palm-frame positions and rigid-transport velocities.
PpoCandidate ppo_project(const Pose& object_in_palm, const Twist& v_des,
                         const Eigen::VectorXd& q,
                         const std::array<SurfacePoint, 3>& contacts,
                         const PpoParams& params, const HandModel& hand);

/// Full palm-pose optimization at fixed object-frame contacts. Stop-triggering
/// candidates are rejected, mirroring run_cpo.
PpoOutcome run_ppo(const Pose& object_in_palm, const Eigen::VectorXd& q,
                   const std::array<SurfacePoint, 3>& contacts,
                   const PpoParams& params, const SurfaceModel& surface,
                   const HandModel& hand, const CollisionProxy& proxy,
                   const QualityWeights& weights);

}  // namespace fsplit
