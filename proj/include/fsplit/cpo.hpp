#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "fsplit/collision.hpp"
#include "fsplit/kinematics.hpp"
#include "fsplit/quality.hpp"
#include "fsplit/surface.hpp"
#include "fsplit/trace.hpp"

namespace fsplit {

struct CpoParams {
  double sigma = 0.15;      // tangent-step trust region
  double k_gain = 2.0;      // tracking gain K = k_gain * I9, 1/s
  double delta = 0.0;       // minimum accepted quality increment
  double gamma = 0.6;       // normal-alignment threshold
  int max_iters = 50;       // M
  double t_s = 0.05;        // integration step, s
  bool line_search = false;
  int ls_samples = 10;
  // Stop on |n_des . n_f| >= gamma (the algorithm as printed) instead of the
  // default misalignment test |n_des . n_f| < gamma.
  bool literal_alignment_stop = false;
  double damping = 1e-10;
  double contact_tolerance = 1e-3;  // m
};

struct CpoOutcome {
  GraspState state;
  int iterations = 0;  // loop entries, <= max_iters
  TerminationReason reason = TerminationReason::kMaxIters;
  std::vector<TraceRow> trace;  // accepted steps only
  PhaseTimers timers;
};

struct CpoTangentResult {
  Eigen::Matrix<double, 9, 1> d_c = Eigen::Matrix<double, 9, 1>::Zero();
  Eigen::VectorXd d_q;   // scaled, alongside d_c forms d*
  double alpha = 0.0;    // applied step scale
  double d0_norm = 0.0;  // norm of the projected gradient
  bool stationary = false;
};

/// Shared stop predicate: by default fires when any fingertip pad normal has
/// drifted away from the local surface normal (|n_s . n_f| < gamma); the
/// `literal` variant inverts the comparison.
bool alignment_stop(const std::array<Vec3, 3>& surface_normals,
                    const std::array<FingertipState, 3>& tips, double gamma,
                    bool literal);

/// Projects the quality gradient onto the tangent of the constraint set
/// {n(c)^T d_c = 0, d_c = J d_q} and scales it to the trust region:
/// d0 = (I - A^T (A A^T)^-1 A) grad, A = [n^T 0; -I9 J]. When `line_search`
/// is on, `quality_probe` (required then) evaluates the projected quality of
/// a trial displacement and the scale is grid-searched.
CpoTangentResult cpo_tangent_step(
    const Eigen::Matrix<double, 9, 1>& grad_c, const Eigen::VectorXd& grad_q,
    const Eigen::MatrixXd& jac_q2c, const std::array<Vec3, 3>& normals,
    const CpoParams& params,
    const std::function<double(const Eigen::Matrix<double, 9, 1>&,
                               const Eigen::VectorXd&)>& quality_probe = {});

/// One stiffness-tracking projection step: chase the nearest mesh vertices of
/// c + d_c, integrate clamped joint motion for t_s, then re-snap contacts to
/// the resulting fingertips. Returns the candidate state (not yet accepted).
GraspState cpo_project(const GraspState& state,
                       const Eigen::Matrix<double, 9, 1>& d_c,
                       const CpoParams& params, const SurfaceModel& surface,
                       const HandModel& hand);

/// Full contact-point optimization at fixed palm pose. The candidate that
/// triggers a stop (no quality gain, normal misalignment, collision) is
/// rejected; the last accepted state is returned.
CpoOutcome run_cpo(const GraspState& state, const CpoParams& params,
                   const SurfaceModel& surface, const HandModel& hand,
                   const CollisionProxy& proxy, const QualityWeights& weights);

}  // namespace fsplit
