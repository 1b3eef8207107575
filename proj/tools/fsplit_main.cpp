#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "fsplit/config.hpp"
#include "fsplit/logging.hpp"
#include "fsplit/report.hpp"
#include "fsplit/splitter.hpp"

namespace fs = std::filesystem;

namespace {

using fsplit::RunConfig;

// Exit codes: 0 success, 1 I/O or configuration error, 2 infeasible start
// grasp, 3 planner error.
constexpr int kOk = 0;
constexpr int kIoError = 1;
constexpr int kInfeasible = 2;
constexpr int kPlannerError = 3;

struct PlanArtifacts {
  fsplit::PlanResult result;
  int exit_code = kOk;
  std::string message;
};

// Runs the planner for one mesh. Does no file I/O besides reading inputs so
// batch workers can call it concurrently.
PlanArtifacts plan_one(const RunConfig& cfg, const fsplit::SurfaceModel& surface,
                       const fsplit::HandModel& hand) {
  PlanArtifacts out;
  fsplit::ParallelGrasp start;
  try {
    if (!cfg.grasp.empty()) {
      start = fsplit::parse_grasp_spec(cfg.grasp);
    } else {
      start = fsplit::seed_antipodal(
          surface, cfg.n_samples, cfg.params.mu, cfg.seed,
          cfg.params.seed_span_frac * fsplit::hand_span(hand));
    }
  } catch (const fsplit::SeedingError& e) {
    out.exit_code = kInfeasible;
    out.message = e.what();
    return out;
  } catch (const std::invalid_argument& e) {
    out.exit_code = kIoError;
    out.message = e.what();
    return out;
  }

  try {
    out.result = fsplit::run_split(start, surface, hand, cfg.params);
  } catch (const fsplit::InfeasibleGraspError& e) {
    out.exit_code = kInfeasible;
    out.message = e.what();
    return out;
  } catch (const std::exception& e) {
    out.exit_code = kPlannerError;
    out.message = e.what();
    return out;
  }
  if (out.result.reason == fsplit::TerminationReason::kError) {
    out.exit_code = kPlannerError;
    out.message = "planner terminated with an internal error";
  }
  return out;
}

int cmd_plan(const RunConfig& cfg) {
  if (cfg.mesh.empty() || cfg.hand.empty()) {
    fsplit::logging::error("plan requires --mesh and --hand");
    return kIoError;
  }

  std::optional<fsplit::SurfaceModel> surface;
  fsplit::HandModel hand;
  try {
    surface.emplace(fsplit::load_mesh(cfg.mesh, cfg.scale));
    hand = fsplit::load_hand_config(cfg.hand);
  } catch (const std::exception& e) {
    fsplit::logging::error(e.what());
    return kIoError;
  }
  fsplit::logging::info("loaded " + cfg.mesh + " (" +
                        std::to_string(surface->vertices().size()) +
                        " vertices)");

  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) {
    fsplit::logging::error("cannot create output directory " + cfg.out + ": " +
                           ec.message());
    return kIoError;
  }

  PlanArtifacts artifacts = plan_one(cfg, *surface, hand);
  if (!artifacts.message.empty()) fsplit::logging::error(artifacts.message);
  if (artifacts.exit_code == kInfeasible || artifacts.exit_code == kIoError) {
    return artifacts.exit_code;
  }

  const auto& result = artifacts.result;
  try {
    fsplit::write_grasp_json((fs::path(cfg.out) / "grasp.json").string(),
                             result, fsplit::config_to_json(cfg));
    fsplit::write_trace_csv((fs::path(cfg.out) / "trace.csv").string(),
                            result.trace);
    fsplit::export_scene(result.state, hand, *surface,
                         (fs::path(cfg.out) / "scene.obj").string());
  } catch (const std::exception& e) {
    fsplit::logging::error(e.what());
    return kIoError;
  }

  fsplit::logging::info(
      "done: Q " + fsplit::format_double(result.metrics_before.q_total) +
      " -> " + fsplit::format_double(result.metrics_after.q_total) + " in " +
      std::to_string(result.outer_iterations) + " outer iterations (" +
      fsplit::format_double(result.total_ms) + " ms), " +
      to_string(result.reason));
  return artifacts.exit_code;
}

std::vector<std::string> read_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open list file " + path);
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    if (line.empty() || line[0] == '#') continue;
    entries.push_back(line);
  }
  return entries;
}

std::string csv_safe(std::string text) {
  for (auto& c : text) {
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

int cmd_bench(const RunConfig& cfg) {
  if (cfg.list.empty() || cfg.hand.empty()) {
    fsplit::logging::error("bench requires --list and --hand");
    return kIoError;
  }

  std::vector<std::string> meshes;
  fsplit::HandModel hand;
  try {
    meshes = read_list_file(cfg.list);
    hand = fsplit::load_hand_config(cfg.hand);
  } catch (const std::exception& e) {
    fsplit::logging::error(e.what());
    return kIoError;
  }
  if (meshes.empty()) {
    fsplit::logging::error("list file " + cfg.list + " names no meshes");
    return kIoError;
  }

  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) {
    fsplit::logging::error("cannot create output directory " + cfg.out + ": " +
                           ec.message());
    return kIoError;
  }

  struct Slot {
    fsplit::BenchRow row;
    bool ok = false;
    fsplit::PlanResult result;  // valid when ok
  };
  std::vector<Slot> slots(meshes.size());

  unsigned n_threads = cfg.threads > 0
                           ? static_cast<unsigned>(cfg.threads)
                           : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, meshes.size());

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= meshes.size()) return;
      Slot& slot = slots[i];
      slot.row.object = fs::path(meshes[i]).stem().string();

      std::optional<fsplit::SurfaceModel> surface;
      try {
        surface.emplace(fsplit::load_mesh(meshes[i], cfg.scale));
      } catch (const std::exception& e) {
        slot.row.status = "io_error: " + csv_safe(e.what());
        continue;
      }
      slot.row.n_vertices = static_cast<int>(surface->vertices().size());

      PlanArtifacts artifacts = plan_one(cfg, *surface, hand);
      if (artifacts.exit_code != kOk) {
        slot.row.status =
            (artifacts.exit_code == kInfeasible ? "infeasible: "
                                                : "error: ") +
            csv_safe(artifacts.message);
        continue;
      }
      const auto& r = artifacts.result;
      slot.row.status = "ok";
      slot.row.outer_iters = r.outer_iterations;
      slot.row.cpo_iters = r.cpo_iterations_total;
      slot.row.ppo_iters = r.ppo_iterations_total;
      slot.row.time_ms = r.total_ms;
      slot.row.tangent_ms = r.cpo_timers.tangent_ms + r.ppo_timers.tangent_ms;
      slot.row.projection_ms =
          r.cpo_timers.projection_ms + r.ppo_timers.projection_ms;
      slot.row.collision_ms =
          r.cpo_timers.collision_ms + r.ppo_timers.collision_ms;
      slot.row.q_before = r.metrics_before.q_total;
      slot.row.q_after = r.metrics_after.q_total;
      slot.row.isotropy_before = r.metrics_before.isotropy;
      slot.row.isotropy_after = r.metrics_after.isotropy;
      slot.row.volume_before = r.metrics_before.wrench_volume;
      slot.row.volume_after = r.metrics_after.wrench_volume;
      slot.row.fc_before = r.metrics_before.ferrari_canny;
      slot.row.fc_after = r.metrics_after.ferrari_canny;
      slot.result = r;
      slot.ok = true;
    }
  };

  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Single collector writes every artifact to avoid interleaving.
  int ok_count = 0;
  try {
    std::vector<fsplit::BenchRow> rows;
    rows.reserve(slots.size());
    const auto echo = fsplit::config_to_json(cfg);
    for (size_t i = 0; i < slots.size(); ++i) {
      rows.push_back(slots[i].row);
      if (!slots[i].ok) {
        fsplit::logging::error(slots[i].row.object + ": " +
                               slots[i].row.status);
        continue;
      }
      ++ok_count;
      fsplit::write_grasp_json(
          (fs::path(cfg.out) / (slots[i].row.object + ".grasp.json")).string(),
          slots[i].result, echo);
      fsplit::write_trace_csv(
          (fs::path(cfg.out) / (slots[i].row.object + ".trace.csv")).string(),
          slots[i].result.trace);
    }
    fsplit::write_bench_csv((fs::path(cfg.out) / "bench.csv").string(), rows);
  } catch (const std::exception& e) {
    fsplit::logging::error(e.what());
    return kIoError;
  }

  fsplit::logging::info("bench: " + std::to_string(ok_count) + "/" +
                        std::to_string(meshes.size()) + " objects planned");
  return ok_count > 0 ? kOk : kPlannerError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"precision-grasp planner: splits a two-contact parallel grasp "
               "into an optimized three-finger grasp"};
  app.require_subcommand(1);

  // Flag storage; count() decides whether a flag overrides the config file.
  std::string config_path;
  std::string mesh, hand, out, grasp, list;
  std::uint64_t seed = 0;
  double scale = 1.0;
  int threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path,
                    "JSON config file; flags given here override it");
    sub->add_option("--hand", hand, "hand description JSON");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--scale", scale, "uniform scale applied to the mesh");
    sub->add_option("--seed", seed, "seed for the antipodal sampler");
  };

  CLI::App* plan = app.add_subcommand("plan", "plan one grasp");
  add_common(plan);
  plan->add_option("--mesh", mesh, "object mesh (.obj/.stl/.ply)");
  plan->add_option("--grasp", grasp,
                   "start grasp 'c1x,c1y,c1z;c2x,c2y,c2z;vx,vy,vz' "
                   "(skips the antipodal sampler)");

  CLI::App* bench = app.add_subcommand("bench", "plan a batch over a mesh list");
  add_common(bench);
  bench->add_option("--list", list, "text file with one mesh path per line");
  bench->add_option("--threads", threads,
                    "worker count (0 = hardware concurrency)");

  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  RunConfig cfg;
  if (sub->count("--config") > 0) {
    try {
      fsplit::load_config_file(config_path, cfg);
    } catch (const std::exception& e) {
      fsplit::logging::error(e.what());
      return kIoError;
    }
  }
  if (sub->count("--hand") > 0) cfg.hand = hand;
  if (sub->count("--out") > 0) cfg.out = out;
  if (sub->count("--scale") > 0) cfg.scale = scale;
  if (sub->count("--seed") > 0) cfg.seed = seed;

  if (sub == plan) {
    if (plan->count("--mesh") > 0) cfg.mesh = mesh;
    if (plan->count("--grasp") > 0) cfg.grasp = grasp;
    return cmd_plan(cfg);
  }
  if (bench->count("--list") > 0) cfg.list = list;
  if (bench->count("--threads") > 0) cfg.threads = threads;
  return cmd_bench(cfg);
}
