#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fsplit/splitter.hpp"

namespace fsplit {

/// Locale-independent float formatting with 17 significant digits (the
/// shortest representation that always round-trips a double).
std::string format_double(double v);

nlohmann::json metrics_to_json(const MetricReport& m);
MetricReport metrics_from_json(const nlohmann::json& j);

/// Serialized planning outcome; `config_echo` is embedded verbatim.
void write_grasp_json(const std::string& path, const PlanResult& result,
                      const nlohmann::json& config_echo);

struct LoadedGrasp {
  Pose palm;
  Eigen::VectorXd q;
  std::array<SurfacePoint, 3> contacts;  // vertex_id = -1 (not persisted)
  MetricReport metrics_before;
  MetricReport metrics_after;
  std::string termination;
  nlohmann::json config_echo;
};

LoadedGrasp read_grasp_json(const std::string& path);

/// Accepted-step trace: one row per TraceRow, '.' decimal, 17 significant
/// digits.
void write_trace_csv(const std::string& path,
                     const std::vector<TraceRow>& trace);

struct BenchRow {
  std::string object;
  std::string status = "ok";  // or the failure reason
  int n_vertices = 0;
  int outer_iters = 0;
  int cpo_iters = 0;
  int ppo_iters = 0;
  double time_ms = 0.0;
  double tangent_ms = 0.0;
  double projection_ms = 0.0;
  double collision_ms = 0.0;
  double q_before = 0.0;
  double q_after = 0.0;
  double isotropy_before = 0.0;
  double isotropy_after = 0.0;
  double volume_before = 0.0;
  double volume_after = 0.0;
  double fc_before = 0.0;
  double fc_after = 0.0;
};

/// Emits all rows plus a trailing mean row over the successful ones.
void write_bench_csv(const std::string& path,
                     const std::vector<BenchRow>& rows);

/// Single OBJ with named groups: `object` (the input mesh), `links`
/// (tessellated hand primitives at the final pose), and `contacts` (one
/// small icosahedron per contact).
void export_scene(const GraspState& state, const HandModel& hand,
                  const SurfaceModel& surface, const std::string& path);

}  // namespace fsplit
