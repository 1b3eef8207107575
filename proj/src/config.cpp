#include "fsplit/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fsplit {

namespace {

using nlohmann::json;

Vec3 parse_triple(const std::string& text, const std::string& what) {
  std::istringstream in(text);
  Vec3 v;
  char comma1 = 0;
  char comma2 = 0;
  if (!(in >> v.x() >> comma1 >> v.y() >> comma2 >> v.z()) || comma1 != ',' ||
      comma2 != ',') {
    throw std::invalid_argument("malformed " + what + ": '" + text + "'");
  }
  std::string rest;
  in >> rest;
  if (!rest.empty()) {
    throw std::invalid_argument("trailing characters in " + what + ": '" +
                                text + "'");
  }
  return v;
}

template <typename T>
void take(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

template <typename Params>
void apply_stage_json(const json& j, Params& p) {
  static const char* known[] = {"sigma",      "k_gain",
                                "delta",      "gamma",
                                "max_iters",  "t_s",
                                "line_search", "ls_samples",
                                "literal_alignment_stop", "damping",
                                "contact_tolerance"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw std::invalid_argument("unknown stage config key: " + key);
  }
  take(j, "sigma", p.sigma);
  take(j, "k_gain", p.k_gain);
  take(j, "delta", p.delta);
  take(j, "gamma", p.gamma);
  take(j, "max_iters", p.max_iters);
  take(j, "t_s", p.t_s);
  take(j, "literal_alignment_stop", p.literal_alignment_stop);
  take(j, "damping", p.damping);
  take(j, "contact_tolerance", p.contact_tolerance);
  if constexpr (requires { p.line_search; }) {
    take(j, "line_search", p.line_search);
    take(j, "ls_samples", p.ls_samples);
  } else {
    if (j.contains("line_search") || j.contains("ls_samples")) {
      throw std::invalid_argument("line_search/ls_samples apply to cpo only");
    }
  }
}

template <typename Params>
json stage_to_json(const Params& p) {
  json j{{"sigma", p.sigma},
         {"k_gain", p.k_gain},
         {"delta", p.delta},
         {"gamma", p.gamma},
         {"max_iters", p.max_iters},
         {"t_s", p.t_s},
         {"literal_alignment_stop", p.literal_alignment_stop},
         {"damping", p.damping},
         {"contact_tolerance", p.contact_tolerance}};
  if constexpr (requires { p.line_search; }) {
    j["line_search"] = p.line_search;
    j["ls_samples"] = p.ls_samples;
  }
  return j;
}

}  // namespace

ParallelGrasp parse_grasp_spec(const std::string& spec) {
  std::array<std::string, 3> parts;
  size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    const size_t end = spec.find(';', start);
    if (i < 2 && end == std::string::npos) {
      throw std::invalid_argument(
          "grasp spec needs 'c1x,c1y,c1z;c2x,c2y,c2z;vx,vy,vz'");
    }
    parts[i] = spec.substr(start, end == std::string::npos ? std::string::npos
                                                           : end - start);
    start = end + 1;
  }
  ParallelGrasp g;
  g.c1 = parse_triple(parts[0], "grasp contact 1");
  g.c2 = parse_triple(parts[1], "grasp contact 2");
  g.v_ap = parse_triple(parts[2], "grasp approach vector");
  const double n = g.v_ap.norm();
  if (n < 1e-12) throw std::invalid_argument("grasp approach vector is zero");
  g.v_ap /= n;
  if ((g.c1 - g.c2).norm() < 1e-12) {
    throw std::invalid_argument("grasp contacts coincide");
  }
  return g;
}

void apply_config_json(const json& j, RunConfig& cfg) {
  static const char* known[] = {"mesh", "hand",      "out",     "list",
                                "grasp", "seed",     "scale",   "n_samples",
                                "threads", "weights", "splitter", "cpo",
                                "ppo"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw std::invalid_argument("unknown config key: " + key);
  }
  take(j, "mesh", cfg.mesh);
  take(j, "hand", cfg.hand);
  take(j, "out", cfg.out);
  take(j, "list", cfg.list);
  take(j, "grasp", cfg.grasp);
  take(j, "seed", cfg.seed);
  take(j, "scale", cfg.scale);
  take(j, "n_samples", cfg.n_samples);
  take(j, "threads", cfg.threads);
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    take(w, "w1", cfg.params.weights.w1);
    take(w, "w2", cfg.params.weights.w2);
  }
  if (j.contains("splitter")) {
    const auto& s = j.at("splitter");
    take(s, "m", cfg.params.m);
    take(s, "max_outer", cfg.params.max_outer);
    take(s, "mu", cfg.params.mu);
    take(s, "m_edges", cfg.params.m_edges);
    take(s, "pad_split", cfg.params.pad_split);
    take(s, "proxy_cell_frac", cfg.params.proxy_cell_frac);
    take(s, "thumb_to_c1", cfg.params.thumb_to_c1);
    take(s, "seed_span_frac", cfg.params.seed_span_frac);
  }
  if (j.contains("cpo")) apply_stage_json(j.at("cpo"), cfg.params.cpo);
  if (j.contains("ppo")) apply_stage_json(j.at("ppo"), cfg.params.ppo);
}

json config_to_json(const RunConfig& cfg) {
  return json{
      {"mesh", cfg.mesh},
      {"hand", cfg.hand},
      {"out", cfg.out},
      {"list", cfg.list},
      {"grasp", cfg.grasp},
      {"seed", cfg.seed},
      {"scale", cfg.scale},
      {"n_samples", cfg.n_samples},
      {"threads", cfg.threads},
      {"weights",
       {{"w1", cfg.params.weights.w1}, {"w2", cfg.params.weights.w2}}},
      {"splitter",
       {{"m", cfg.params.m},
        {"max_outer", cfg.params.max_outer},
        {"mu", cfg.params.mu},
        {"m_edges", cfg.params.m_edges},
        {"pad_split", cfg.params.pad_split},
        {"proxy_cell_frac", cfg.params.proxy_cell_frac},
        {"thumb_to_c1", cfg.params.thumb_to_c1},
        {"seed_span_frac", cfg.params.seed_span_frac}}},
      {"cpo", stage_to_json(cfg.params.cpo)},
      {"ppo", stage_to_json(cfg.params.ppo)}};
}

void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  apply_config_json(j, cfg);
}

}  // namespace fsplit
