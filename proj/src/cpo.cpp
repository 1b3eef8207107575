#include "fsplit/cpo.hpp"

#include <chrono>

#include "fsplit/logging.hpp"

namespace fsplit {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(const Clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Tracker pseudo-inverse: healthy blocks get a negligible damping, near
// singular ones a stronger (logged) one.
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

double quality_of(const QualityWeights& w, const HandModel& hand,
                  const GraspState& s) {
  const std::array<Vec3, 3> pos{s.contacts[0].position, s.contacts[1].position,
                                s.contacts[2].position};
  return grasp_quality(w, pos, hand, s.q);
}

}  // namespace

bool alignment_stop(const std::array<Vec3, 3>& surface_normals,
                    const std::array<FingertipState, 3>& tips, double gamma,
                    bool literal) {
  for (int i = 0; i < 3; ++i) {
    const double c = std::abs(surface_normals[i].dot(tips[i].normal));
    if (literal ? (c >= gamma) : (c < gamma)) return true;
  }
  return false;
}

CpoTangentResult cpo_tangent_step(
    const Eigen::Matrix<double, 9, 1>& grad_c, const Eigen::VectorXd& grad_q,
    const Eigen::MatrixXd& jac_q2c, const std::array<Vec3, 3>& normals,
    const CpoParams& params,
    const std::function<double(const Eigen::Matrix<double, 9, 1>&,
                               const Eigen::VectorXd&)>& quality_probe) {
  const int n = static_cast<int>(jac_q2c.cols());
  CpoTangentResult out;
  out.d_q = Eigen::VectorXd::Zero(n);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(12, 9 + n);
  for (int i = 0; i < 3; ++i) {
    const double nn = normals[i].norm();
    const Vec3 ni = nn > 0.0 ? Vec3(normals[i] / nn) : normals[i];
    a.block<1, 3>(i, 3 * i) = ni.transpose();
  }
  a.block(3, 0, 9, 9) = -Eigen::MatrixXd::Identity(9, 9);
  a.block(3, 9, 9, n) = jac_q2c;

  Eigen::VectorXd grad(9 + n);
  grad.head<9>() = grad_c;
  grad.tail(n) = grad_q;

  Eigen::MatrixXd aat = a * a.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(aat);
  const double emax = es.eigenvalues().maxCoeff();
  if (es.eigenvalues().minCoeff() < params.damping * std::max(emax, 1.0)) {
    aat.diagonal().array() += params.damping;
  }
  const Eigen::VectorXd d0 =
      grad - a.transpose() * aat.ldlt().solve(a * grad);

  out.d0_norm = d0.norm();
  if (out.d0_norm < 1e-12) {
    out.stationary = true;
    return out;
  }

  const double alpha_max = params.sigma / out.d0_norm;
  double alpha = alpha_max;
  if (params.line_search && quality_probe) {
    double best = -std::numeric_limits<double>::infinity();
    const int samples = std::max(params.ls_samples, 1);
    for (int j = 1; j <= samples; ++j) {
      const double trial = alpha_max * j / samples;
      const double value = quality_probe(trial * d0.head<9>(),
                                         Eigen::VectorXd(trial * d0.tail(n)));
      if (value > best) {
        best = value;
        alpha = trial;
      }
    }
  }
  out.alpha = alpha;
  out.d_c = alpha * d0.head<9>();
  out.d_q = alpha * d0.tail(n);
  return out;
}

GraspState cpo_project(const GraspState& state,
                       const Eigen::Matrix<double, 9, 1>& d_c,
                       const CpoParams& params, const SurfaceModel& surface,
                       const HandModel& hand) {
  Eigen::Matrix<double, 9, 1> target;
  for (int i = 0; i < 3; ++i) {
    const Vec3 shifted = state.contacts[i].position + d_c.segment<3>(3 * i);
    target.segment<3>(3 * i) = surface.nearest_neighbor(shifted).position;
  }

  const std::array<FingertipState, 3> tips =
      fk_fingertips(hand, state.palm, state.q);
  Eigen::Matrix<double, 9, 1> f;
  for (int i = 0; i < 3; ++i) f.segment<3>(3 * i) = tips[i].position;

  const Eigen::MatrixXd jac = jacobian_q2c(hand, state.palm, state.q);
  const Eigen::VectorXd q_dot =
      tracking_pinv(jac) * (params.k_gain * (target - f));

  GraspState candidate = state;
  candidate.q = hand.clamp(state.q + q_dot * params.t_s);
  const std::array<FingertipState, 3> tips_des =
      fk_fingertips(hand, state.palm, candidate.q);
  for (int i = 0; i < 3; ++i) {
    candidate.contacts[i] = surface.nearest_neighbor(tips_des[i].position);
  }
  return candidate;
}

CpoOutcome run_cpo(const GraspState& state, const CpoParams& params,
                   const SurfaceModel& surface, const HandModel& hand,
                   const CollisionProxy& proxy,
                   const QualityWeights& weights) {
  CpoOutcome out;
  out.state = state;
  out.reason = TerminationReason::kMaxIters;

  double q_now = quality_of(weights, hand, out.state);
  int slow_steps = 0;

  int it = 0;
  while (it < params.max_iters) {
    ++it;

    const auto t_tangent = Clock::now();
    std::array<Vec3, 3> normals;
    std::array<Vec3, 3> positions;
    for (int i = 0; i < 3; ++i) {
      normals[i] = out.state.contacts[i].normal;
      positions[i] = out.state.contacts[i].position;
    }
    const Eigen::Matrix<double, 9, 1> grad_c =
        weights.w1 * grad_q_object(positions);
    const Eigen::VectorXd grad_q =
        weights.w2 * grad_q_hand(hand, out.state.q);
    const Eigen::MatrixXd jac = jacobian_q2c(hand, out.state.palm, out.state.q);

    std::function<double(const Eigen::Matrix<double, 9, 1>&,
                         const Eigen::VectorXd&)>
        probe;
    if (params.line_search) {
      probe = [&](const Eigen::Matrix<double, 9, 1>& dc,
                  const Eigen::VectorXd&) {
        return quality_of(weights, hand,
                          cpo_project(out.state, dc, params, surface, hand));
      };
    }
    const CpoTangentResult tangent = cpo_tangent_step(
        grad_c, grad_q, jac, normals, params, probe);
    out.timers.tangent_ms += ms_since(t_tangent);

    if (tangent.stationary) {
      out.reason = TerminationReason::kQualityConverged;
      break;
    }

    const auto t_proj = Clock::now();
    const GraspState candidate =
        cpo_project(out.state, tangent.d_c, params, surface, hand);
    const double q_des = quality_of(weights, hand, candidate);
    const double delta_q = q_des - q_now;

    std::array<Vec3, 3> n_des;
    for (int i = 0; i < 3; ++i) n_des[i] = candidate.contacts[i].normal;
    const std::array<FingertipState, 3> tips_des =
        fk_fingertips(hand, candidate.palm, candidate.q);
    const bool misaligned = alignment_stop(n_des, tips_des, params.gamma,
                                           params.literal_alignment_stop);
    out.timers.projection_ms += ms_since(t_proj);

    const auto t_col = Clock::now();
    const bool collide =
        col_detect(hand, candidate.palm, candidate.q, proxy, 0.0,
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

    // Accept the candidate.
    out.state = candidate;
    q_now = q_des;

    TraceRow row;
    row.phase = Phase::kCpo;
    row.inner = it;
    row.q_object = q_object({candidate.contacts[0].position,
                             candidate.contacts[1].position,
                             candidate.contacts[2].position});
    row.q_hand = q_hand(hand, candidate.q);
    row.q_total = q_now;
    for (int i = 0; i < 3; ++i) {
      row.contacts[i] = candidate.contacts[i].position;
    }
    const double dc_norm = std::max(tangent.d_c.norm(), 1e-300);
    double surf = 0.0;
    for (int i = 0; i < 3; ++i) {
      surf = std::max(
          surf, std::abs(normals[i].normalized().dot(
                    tangent.d_c.segment<3>(3 * i))));
    }
    row.residual_surface = surf / dc_norm;
    row.residual_kinematic =
        (tangent.d_c - jac * tangent.d_q).norm() / dc_norm;
    row.step_norm = std::hypot(tangent.d_c.norm(), tangent.d_q.norm());
    out.trace.push_back(row);

    // Guard against indefinite zero-progress loops at delta = 0 (flat
    // regions oscillate when line search is off).
    slow_steps = delta_q <= 1e-12 ? slow_steps + 1 : 0;
    if (slow_steps >= 3) {
      out.reason = TerminationReason::kQualityConverged;
      break;
    }
  }
  out.iterations = it;
  return out;
}

}  // namespace fsplit
