#pragma once

#include <array>
#include <string>
#include <vector>

#include "fsplit/geometry.hpp"

namespace fsplit {

enum class Phase { kMap, kCpo, kPpo };

enum class TerminationReason {
  kQualityConverged,
  kNormalLimit,
  kCollision,
  kMaxIters,
  kError,
};

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::kMap: return "map";
    case Phase::kCpo: return "cpo";
    case Phase::kPpo: return "ppo";
  }
  return "?";
}

inline const char* to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::kQualityConverged: return "quality_converged";
    case TerminationReason::kNormalLimit: return "normal_limit";
    case TerminationReason::kCollision: return "collision";
    case TerminationReason::kMaxIters: return "max_iters";
    case TerminationReason::kError: return "error";
  }
  return "?";
}

/// One accepted optimizer step (or the initial state, inner = 0).
struct TraceRow {
  int outer = 0;
  Phase phase = Phase::kMap;
  int inner = 0;
  double q_total = 0.0;
  double q_object = 0.0;
  double q_hand = 0.0;
  std::array<Vec3, 3> contacts{};
  // Diagnostics for the accepted tangent pair (not serialized to CSV):
  // surface residual |n^T d_c| / |d_c| and kinematic residual
  // |d_c - J d_q| / |d_c| (CPO) or |G^T d_c - J_h d_q| / (|d_c|+|d_q|) (PPO).
  double residual_surface = 0.0;
  double residual_kinematic = 0.0;
  double step_norm = 0.0;
};

/// Accumulated wall time per activity inside an optimizer phase.
struct PhaseTimers {
  double tangent_ms = 0.0;
  double projection_ms = 0.0;
  double collision_ms = 0.0;

  PhaseTimers& operator+=(const PhaseTimers& o) {
    tangent_ms += o.tangent_ms;
    projection_ms += o.projection_ms;
    collision_ms += o.collision_ms;
    return *this;
  }
};

}  // namespace fsplit
