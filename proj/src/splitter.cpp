#include "fsplit/splitter.hpp"

#include <chrono>
#include <random>

#include "fsplit/logging.hpp"

namespace fsplit {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(const Clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Fingertip targets for the parallel-grasp mapping: the two spread fingers
// straddle one contact, the thumb takes the other.
std::array<Vec3, 3> finger_targets(const ParallelGrasp& grasp,
                                   const Vec3& palm_y,
                                   const SplitterParams& params) {
  const Vec3 split = params.pad_split * palm_y;
  if (params.thumb_to_c1) {
    return {grasp.c2 + split, grasp.c2 - split, grasp.c1};
  }
  return {grasp.c1 + split, grasp.c1 - split, grasp.c2};
}

// Servo the fingers toward fixed world targets at a fixed palm pose;
// returns the final max fingertip-to-target distance.
double track_targets(const HandModel& hand, const Pose& palm,
                     const std::array<Vec3, 3>& targets, double k_gain,
                     double t_s, double tolerance, int max_steps,
                     Eigen::VectorXd& q) {
  Eigen::Matrix<double, 9, 1> t;
  for (int i = 0; i < 3; ++i) t.segment<3>(3 * i) = targets[i];
  double residual = std::numeric_limits<double>::infinity();
  for (int step = 0; step < max_steps; ++step) {
    const std::array<FingertipState, 3> tips = fk_fingertips(hand, palm, q);
    Eigen::Matrix<double, 9, 1> f;
    residual = 0.0;
    for (int i = 0; i < 3; ++i) {
      f.segment<3>(3 * i) = tips[i].position;
      residual = std::max(residual, (targets[i] - tips[i].position).norm());
    }
    if (residual < tolerance) return residual;
    const Eigen::MatrixXd jac = jacobian_q2c(hand, palm, q);
    const Eigen::VectorXd q_dot = damped_pinv(jac, 1e-10) * (k_gain * (t - f));
    q = hand.clamp(q + q_dot * t_s);
  }
  const std::array<FingertipState, 3> tips = fk_fingertips(hand, palm, q);
  residual = 0.0;
  for (int i = 0; i < 3; ++i) {
    residual = std::max(residual, (targets[i] - tips[i].position).norm());
  }
  return residual;
}

Vec3 any_unit_orthogonal(const Vec3& u) {
  Vec3 x = Vec3::UnitX() - u * u.x();
  if (x.norm() < 1e-6) x = Vec3::UnitY() - u * u.y();
  return x.normalized();
}

TraceRow state_row(const GraspState& state, const HandModel& hand,
                   const QualityWeights& w, Phase phase, int outer,
                   int inner) {
  TraceRow row;
  row.outer = outer;
  row.phase = phase;
  row.inner = inner;
  const std::array<Vec3, 3> pos{state.contacts[0].position,
                                state.contacts[1].position,
                                state.contacts[2].position};
  row.q_object = q_object(pos);
  row.q_hand = q_hand(hand, state.q);
  row.q_total = w.w1 * row.q_object + w.w2 * row.q_hand;
  row.contacts = pos;
  return row;
}

}  // namespace

double hand_span(const HandModel& hand) {
  const std::array<FingertipState, 3> tips =
      fk_fingertips(hand, Pose::identity(), hand.midpoint_q());
  double span = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      span = std::max(span, (tips[i].position - tips[j].position).norm());
    }
  }
  return span;
}

GraspState map_parallel_grasp(const ParallelGrasp& grasp,
                              const SurfaceModel& surface,
                              const HandModel& hand,
                              const SplitterParams& params,
                              double* residual_out) {
  const double span = hand_span(hand);
  const double separation = (grasp.c2 - grasp.c1).norm();
  if (separation > span) {
    throw InfeasibleGraspError(
        "contact separation " + std::to_string(separation) +
        " m exceeds the hand span " + std::to_string(span) + " m");
  }
  if (separation < 1e-9) {
    throw InfeasibleGraspError("parallel grasp contacts coincide");
  }

  Vec3 z = grasp.v_ap;
  if (z.norm() < 1e-9) {
    throw InfeasibleGraspError("approach vector is zero");
  }
  z.normalize();
  Vec3 x = (grasp.c2 - grasp.c1) - z * z.dot(grasp.c2 - grasp.c1);
  if (x.norm() < 1e-9) {
    x = any_unit_orthogonal(z);  // contact axis parallel to approach
  }
  x.normalize();
  const Vec3 y = z.cross(x);

  Mat3 rot;
  rot.col(0) = x;
  rot.col(1) = y;
  rot.col(2) = z;

  const Vec3 mid = 0.5 * (grasp.c1 + grasp.c2);
  const std::array<Vec3, 3> targets = finger_targets(grasp, y, params);
  const Eigen::VectorXd q0 =
      hand.pregrasp_q.size() == hand.dof() ? hand.pregrasp_q
                                           : hand.midpoint_q();

  // The palm-to-grasp distance is not observable from the parallel grasp;
  // sweep a standoff grid. Among standoffs whose fingers reach the targets,
  // keep the one whose pads face the surface squarest (the alignment stop
  // rejects any descendant of a badly aligned start); fall back to the
  // smallest residual when none reaches.
  double best_residual = std::numeric_limits<double>::infinity();
  double best_align = -1.0;
  bool have_reached = false;
  Pose best_palm;
  Eigen::VectorXd best_q;
  for (int k = 0; k <= 12; ++k) {
    const double standoff = 0.02 + 0.01 * k;
    Pose palm;
    palm.rotation = rot;
    palm.translation = mid - standoff * z;
    Eigen::VectorXd q = q0;
    const double residual =
        track_targets(hand, palm, targets, params.cpo.k_gain, params.cpo.t_s,
                      0.1 * params.cpo.contact_tolerance, 100, q);
    const bool reached = residual <= params.cpo.contact_tolerance;
    double align = -1.0;
    if (reached) {
      align = 1.0;
      const std::array<FingertipState, 3> tips = fk_fingertips(hand, palm, q);
      for (const auto& tip : tips) {
        const SurfacePoint sp = surface.nearest_neighbor(tip.position);
        align = std::min(align, std::abs(sp.normal.dot(tip.normal)));
      }
    }
    const bool better = reached ? (!have_reached || align > best_align)
                                : (!have_reached && residual < best_residual);
    if (better) {
      have_reached = have_reached || reached;
      best_align = align;
      best_residual = residual;
      best_palm = palm;
      best_q = q;
    }
  }

  if (best_residual > 10.0 * params.cpo.contact_tolerance) {
    logging::info("parallel-grasp mapping left a residual of " +
                  std::to_string(best_residual) +
                  " m; contact optimization will repair it");
  }
  if (residual_out != nullptr) *residual_out = best_residual;

  GraspState state;
  state.palm = best_palm;
  state.q = best_q;
  state.object_pose = Pose::identity();
  const std::array<FingertipState, 3> tips =
      fk_fingertips(hand, best_palm, best_q);
  for (int i = 0; i < 3; ++i) {
    state.contacts[i] = surface.nearest_neighbor(tips[i].position);
  }
  return state;
}

ParallelGrasp seed_antipodal(const SurfaceModel& surface, int n_samples,
                             double mu, std::uint64_t seed, double max_span) {
  if (n_samples < 1) throw SeedingError("need n_samples >= 1");
  if (!(mu > 0.0)) throw SeedingError("need mu > 0");
  const auto& vertices = surface.vertices();
  const auto& normals = surface.vertex_normals();
  const std::uint64_t count = vertices.size();
  if (count < 2) throw SeedingError("mesh has fewer than 2 vertices");

  // cos of the friction-cone half angle: angle(n, line) <= atan(mu).
  const double cos_cone = 1.0 / std::sqrt(1.0 + mu * mu);

  std::mt19937_64 rng(seed);
  bool found = false;
  double best_sep = -1.0;
  std::uint64_t best_i = 0;
  std::uint64_t best_j = 0;
  for (int s = 0; s < n_samples; ++s) {
    const std::uint64_t i = rng() % count;
    const std::uint64_t j = rng() % count;
    if (i == j) continue;
    const Vec3 d = vertices[j] - vertices[i];
    const double sep = d.norm();
    if (sep < 1e-9 || sep > max_span) continue;
    const Vec3 dir = d / sep;
    if (normals[i].dot(-dir) < cos_cone) continue;
    if (normals[j].dot(dir) < cos_cone) continue;
    if (sep > best_sep ||
        (sep == best_sep &&
         (i < best_i || (i == best_i && j < best_j)))) {
      best_sep = sep;
      best_i = i;
      best_j = j;
      found = true;
    }
  }
  if (!found) {
    throw SeedingError("no antipodal vertex pair found in " +
                       std::to_string(n_samples) + " samples (mu = " +
                       std::to_string(mu) + ")");
  }

  ParallelGrasp grasp;
  grasp.c1 = vertices[best_i];
  grasp.c2 = vertices[best_j];

  // Approach direction: perpendicular to the grasp axis, pointing from the
  // open side toward the box center so the palm lands in free space.
  const Vec3 axis = (grasp.c2 - grasp.c1).normalized();
  const Vec3 center = 0.5 * (surface.bbox().min + surface.bbox().max);
  const Vec3 mid = 0.5 * (grasp.c1 + grasp.c2);
  Vec3 offset = (mid - center) - axis * axis.dot(mid - center);
  if (offset.norm() > 1e-9) {
    grasp.v_ap = -offset.normalized();
    return grasp;
  }

  // Centered grasp: probe evenly spaced perpendicular directions and approach
  // along the one where the object is thinnest.
  const Vec3 e1 = any_unit_orthogonal(axis);
  const Vec3 e2 = axis.cross(e1);
  double best_extent = std::numeric_limits<double>::infinity();
  Vec3 best_dir = e1;
  for (int k = 0; k < 64; ++k) {
    const double theta = 2.0 * M_PI * k / 64.0;
    const Vec3 dir = std::cos(theta) * e1 + std::sin(theta) * e2;
    double extent = 0.0;
    for (const auto& v : vertices) {
      extent = std::max(extent, std::abs((v - mid).dot(dir)));
    }
    if (extent < best_extent) {
      best_extent = extent;
      best_dir = dir;
    }
  }
  grasp.v_ap = best_dir;
  return grasp;
}

PlanResult run_split(const ParallelGrasp& grasp, const SurfaceModel& surface,
                     const HandModel& hand, const SplitterParams& params) {
  const auto t_total = Clock::now();
  PlanResult result;

  const auto t_map = Clock::now();
  result.state =
      map_parallel_grasp(grasp, surface, hand, params, &result.map_residual);
  result.map_ms = ms_since(t_map);

  const double cell =
      params.proxy_cell_frac * surface.bbox().diagonal().norm();
  CollisionProxy proxy;
  proxy.points = downsample(surface, cell);
  proxy.source_cell = cell;

  result.metrics_before = evaluate_metrics(result.state.contacts, hand,
                                           result.state.q, params.weights,
                                           params.mu, params.m_edges);
  result.trace.push_back(
      state_row(result.state, hand, params.weights, Phase::kMap, 0, 0));

  result.reason = TerminationReason::kMaxIters;
  int outer = 0;
  while (outer < params.max_outer) {
    ++outer;
    try {
      const auto t_cpo = Clock::now();
      CpoOutcome cpo = run_cpo(result.state, params.cpo, surface, hand, proxy,
                               params.weights);
      result.cpo_ms += ms_since(t_cpo);
      result.state = cpo.state;
      result.last_cpo_reason = cpo.reason;
      result.last_cpo_iterations = cpo.iterations;
      result.cpo_iterations_total += cpo.iterations;
      result.cpo_timers += cpo.timers;
      for (auto& row : cpo.trace) {
        row.outer = outer;
        result.trace.push_back(row);
      }

      const auto t_ppo = Clock::now();
      PpoOutcome ppo =
          run_ppo(result.state.object_in_palm(), result.state.q,
                  result.state.contacts, params.ppo, surface, hand, proxy,
                  params.weights);
      result.ppo_ms += ms_since(t_ppo);
      // The object never moves in the world; realize the relative-pose
      // update by moving the palm to the inverse.
      result.state.palm =
          result.state.object_pose.compose(ppo.object_pose_in_palm.inverse());
      result.state.q = ppo.q;
      result.last_ppo_reason = ppo.reason;
      result.last_ppo_iterations = ppo.iterations;
      result.ppo_iterations_total += ppo.iterations;
      result.ppo_timers += ppo.timers;
      for (auto& row : ppo.trace) {
        row.outer = outer;
        result.trace.push_back(row);
      }

      if (cpo.iterations < params.m && ppo.iterations < params.m) {
        result.reason = TerminationReason::kQualityConverged;
        break;
      }
    } catch (const std::exception& e) {
      logging::error(std::string("planner phase failed: ") + e.what());
      result.reason = TerminationReason::kError;
      break;
    }
  }
  result.outer_iterations = outer;

  result.metrics_after = evaluate_metrics(result.state.contacts, hand,
                                          result.state.q, params.weights,
                                          params.mu, params.m_edges);
  result.total_ms = ms_since(t_total);
  return result;
}

}  // namespace fsplit
