#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fsplit/cpo.hpp"
#include "fsplit/ppo.hpp"

namespace fsplit {

/// Two-contact grasp with an approach direction, the planner's input.
struct ParallelGrasp {
  Vec3 c1 = Vec3::Zero();
  Vec3 c2 = Vec3::Zero();
  Vec3 v_ap = Vec3::UnitZ();  // unit, points from the free side into the object
};

struct SplitterParams {
  int m = 2;            // both phases below m inner iterations -> done
  int max_outer = 20;   // safety cap on the alternation
  CpoParams cpo;
  PpoParams ppo;
  QualityWeights weights;
  double mu = 0.5;       // metric evaluation
  int m_edges = 8;
  double pad_split = 0.005;       // F1/F2 target offset from c1, m
  double proxy_cell_frac = 0.02;  // collision proxy cell / bbox diagonal
  bool thumb_to_c1 = false;       // swap the finger-group assignment
  // Aperture fraction of the hand span offered to the antipodal sampler; a
  // pair at 100% of the span leaves the fingers fully stretched with no
  // room to orient the pads.
  double seed_span_frac = 0.8;
};

struct PlanResult {
  GraspState state;
  int outer_iterations = 0;
  TerminationReason reason = TerminationReason::kMaxIters;
  TerminationReason last_cpo_reason = TerminationReason::kMaxIters;
  TerminationReason last_ppo_reason = TerminationReason::kMaxIters;
  int cpo_iterations_total = 0;
  int ppo_iterations_total = 0;
  int last_cpo_iterations = 0;
  int last_ppo_iterations = 0;
  std::vector<TraceRow> trace;  // initial row + accepted steps, outer-tagged
  MetricReport metrics_before;
  MetricReport metrics_after;
  PhaseTimers cpo_timers;
  PhaseTimers ppo_timers;
  double map_ms = 0.0;
  double cpo_ms = 0.0;
  double ppo_ms = 0.0;
  double total_ms = 0.0;
  double map_residual = 0.0;  // fingertip-to-target residual after mapping
};

struct InfeasibleGraspError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SeedingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Largest fingertip pair distance with all joints at their midpoints; used
/// as the aperture bound for parallel-grasp feasibility.
double hand_span(const HandModel& hand);

/// Builds the initial three-finger state from a parallel grasp: orients the
/// palm from v_ap and the contact axis, sweeps a standoff grid, and servos
/// the fingers toward {c1 +/- pad_split, c2} with the stiffness tracker.
/// Throws InfeasibleGraspError when |c1 - c2| exceeds the hand span.
GraspState map_parallel_grasp(const ParallelGrasp& grasp,
                              const SurfaceModel& surface,
                              const HandModel& hand,
                              const SplitterParams& params,
                              double* residual_out = nullptr);

/// Deterministic antipodal pair sampler: vertex pairs whose normals both lie
/// within the friction cone of the connecting line, separation <= max_span;
/// returns the widest such pair. Throws SeedingError when none qualifies.
ParallelGrasp seed_antipodal(const SurfaceModel& surface, int n_samples,
                             double mu, std::uint64_t seed, double max_span);

/// Alternates contact-point and palm-pose optimization from a mapped
/// parallel grasp until both phases converge (< m inner iterations) or the
/// outer cap is reached.
PlanResult run_split(const ParallelGrasp& grasp, const SurfaceModel& surface,
                     const HandModel& hand, const SplitterParams& params);

}  // namespace fsplit
