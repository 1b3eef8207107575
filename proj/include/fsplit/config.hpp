#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "fsplit/splitter.hpp"

namespace fsplit {

/// Effective tool configuration: file paths plus every planner parameter.
/// A JSON config file mirrors this struct; command-line flags override the
/// file, and the merged result is echoed into grasp.json.
struct RunConfig {
  std::string mesh;       // object mesh path (obj/stl/ply by extension)
  std::string hand;       // hand description path (JSON)
  std::string out = ".";  // output directory
  std::string list;       // batch list file, one mesh path per line
  std::string grasp;      // inline start "c1x,c1y,c1z;c2x,c2y,c2z;vx,vy,vz"
  std::uint64_t seed = 0;
  double scale = 1.0;
  int n_samples = 10000;  // antipodal sampling attempts
  int threads = 0;        // batch worker count, 0 = hardware concurrency
  SplitterParams params;
};

/// Parses the inline two-contact start specification. Throws
/// std::invalid_argument on malformed input.
ParallelGrasp parse_grasp_spec(const std::string& spec);

/// Overwrites fields of `cfg` that are present in `j`; unknown keys throw.
void apply_config_json(const nlohmann::json& j, RunConfig& cfg);

/// Full round-trippable echo of the effective configuration.
nlohmann::json config_to_json(const RunConfig& cfg);

/// Loads a JSON config file and applies it over `cfg`.
void load_config_file(const std::string& path, RunConfig& cfg);

}  // namespace fsplit
