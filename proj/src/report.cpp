#include "fsplit/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fsplit/collision.hpp"

namespace fsplit {

namespace {

using nlohmann::json;

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j) {
  return Vec3(j.at(0).get<double>(), j.at(1).get<double>(),
              j.at(2).get<double>());
}

constexpr const char* kTraceHeader =
    "index,outer,phase,inner,q_total,q_object,q_hand,"
    "c1x,c1y,c1z,c2x,c2y,c2z,c3x,c3y,c3z";

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json metrics_to_json(const MetricReport& m) {
  return json{{"q_total", m.q_total},
              {"q_object", m.q_object},
              {"q_hand", m.q_hand},
              {"isotropy", m.isotropy},
              {"wrench_volume", m.wrench_volume},
              {"ferrari_canny", m.ferrari_canny}};
}

MetricReport metrics_from_json(const json& j) {
  MetricReport m;
  m.q_total = j.at("q_total").get<double>();
  m.q_object = j.at("q_object").get<double>();
  m.q_hand = j.at("q_hand").get<double>();
  m.isotropy = j.at("isotropy").get<double>();
  m.wrench_volume = j.at("wrench_volume").get<double>();
  m.ferrari_canny = j.at("ferrari_canny").get<double>();
  return m;
}

void write_grasp_json(const std::string& path, const PlanResult& result,
                      const json& config_echo) {
  json rotation = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      rotation.push_back(result.state.palm.rotation(r, c));  // row-major
    }
  }
  json q = json::array();
  for (int i = 0; i < result.state.q.size(); ++i) {
    q.push_back(result.state.q[i]);
  }
  json contacts = json::array();
  json normals = json::array();
  for (const auto& c : result.state.contacts) {
    contacts.push_back(vec3_to_json(c.position));
    normals.push_back(vec3_to_json(c.normal));
  }

  const json doc{
      {"palm",
       {{"rotation", rotation},
        {"translation", vec3_to_json(result.state.palm.translation)}}},
      {"q", q},
      {"contacts", contacts},
      {"normals", normals},
      {"metrics_before", metrics_to_json(result.metrics_before)},
      {"metrics_after", metrics_to_json(result.metrics_after)},
      {"timing",
       {{"map_ms", result.map_ms},
        {"cpo_ms", result.cpo_ms},
        {"ppo_ms", result.ppo_ms},
        {"total_ms", result.total_ms},
        {"tangent_ms",
         result.cpo_timers.tangent_ms + result.ppo_timers.tangent_ms},
        {"projection_ms",
         result.cpo_timers.projection_ms + result.ppo_timers.projection_ms},
        {"collision_ms",
         result.cpo_timers.collision_ms + result.ppo_timers.collision_ms}}},
      {"termination",
       {{"reason", to_string(result.reason)},
        {"last_cpo", to_string(result.last_cpo_reason)},
        {"last_ppo", to_string(result.last_ppo_reason)},
        {"outer_iterations", result.outer_iterations},
        {"cpo_iterations", result.cpo_iterations_total},
        {"ppo_iterations", result.ppo_iterations_total}}},
      {"config_echo", config_echo}};

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << "\n";
  if (!out) throw std::runtime_error("failed writing " + path);
}

LoadedGrasp read_grasp_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json doc;
  in >> doc;

  LoadedGrasp g;
  const auto& rot = doc.at("palm").at("rotation");
  if (rot.size() != 9) throw std::runtime_error(path + ": malformed rotation");
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      g.palm.rotation(r, c) = rot.at(3 * r + c).get<double>();
    }
  }
  g.palm.translation = vec3_from_json(doc.at("palm").at("translation"));
  const auto& q = doc.at("q");
  g.q.resize(q.size());
  for (size_t i = 0; i < q.size(); ++i) g.q[i] = q.at(i).get<double>();
  for (int i = 0; i < 3; ++i) {
    g.contacts[i].position = vec3_from_json(doc.at("contacts").at(i));
    g.contacts[i].normal = vec3_from_json(doc.at("normals").at(i));
    g.contacts[i].vertex_id = -1;
  }
  g.metrics_before = metrics_from_json(doc.at("metrics_before"));
  g.metrics_after = metrics_from_json(doc.at("metrics_after"));
  g.termination = doc.at("termination").at("reason").get<std::string>();
  if (doc.contains("config_echo")) g.config_echo = doc["config_echo"];
  return g;
}

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRow>& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << kTraceHeader << "\n";
  int index = 0;
  for (const auto& row : trace) {
    out << index++ << ',' << row.outer << ',' << to_string(row.phase) << ','
        << row.inner << ',' << format_double(row.q_total) << ','
        << format_double(row.q_object) << ',' << format_double(row.q_hand);
    for (const auto& c : row.contacts) {
      out << ',' << format_double(c.x()) << ',' << format_double(c.y()) << ','
          << format_double(c.z());
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

void write_bench_csv(const std::string& path,
                     const std::vector<BenchRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "object,status,n_vertices,outer_iters,cpo_iters,ppo_iters,time_ms,"
         "tangent_ms,projection_ms,collision_ms,q_before,q_after,"
         "isotropy_before,isotropy_after,volume_before,volume_after,"
         "fc_before,fc_after\n";

  auto emit = [&out](const BenchRow& r) {
    out << r.object << ',' << r.status << ',' << r.n_vertices << ','
        << r.outer_iters << ',' << r.cpo_iters << ',' << r.ppo_iters << ','
        << format_double(r.time_ms) << ',' << format_double(r.tangent_ms)
        << ',' << format_double(r.projection_ms) << ','
        << format_double(r.collision_ms) << ',' << format_double(r.q_before)
        << ',' << format_double(r.q_after) << ','
        << format_double(r.isotropy_before) << ','
        << format_double(r.isotropy_after) << ','
        << format_double(r.volume_before) << ','
        << format_double(r.volume_after) << ',' << format_double(r.fc_before)
        << ',' << format_double(r.fc_after) << "\n";
  };

  BenchRow mean;
  mean.object = "mean";
  int ok = 0;
  for (const auto& r : rows) {
    emit(r);
    if (r.status != "ok") continue;
    ++ok;
    mean.n_vertices += r.n_vertices;
    mean.outer_iters += r.outer_iters;
    mean.cpo_iters += r.cpo_iters;
    mean.ppo_iters += r.ppo_iters;
    mean.time_ms += r.time_ms;
    mean.tangent_ms += r.tangent_ms;
    mean.projection_ms += r.projection_ms;
    mean.collision_ms += r.collision_ms;
    mean.q_before += r.q_before;
    mean.q_after += r.q_after;
    mean.isotropy_before += r.isotropy_before;
    mean.isotropy_after += r.isotropy_after;
    mean.volume_before += r.volume_before;
    mean.volume_after += r.volume_after;
    mean.fc_before += r.fc_before;
    mean.fc_after += r.fc_after;
  }
  if (ok > 0) {
    mean.n_vertices /= ok;
    mean.outer_iters /= ok;
    mean.cpo_iters /= ok;
    mean.ppo_iters /= ok;
    const double inv = 1.0 / ok;
    mean.time_ms *= inv;
    mean.tangent_ms *= inv;
    mean.projection_ms *= inv;
    mean.collision_ms *= inv;
    mean.q_before *= inv;
    mean.q_after *= inv;
    mean.isotropy_before *= inv;
    mean.isotropy_after *= inv;
    mean.volume_before *= inv;
    mean.volume_after *= inv;
    mean.fc_before *= inv;
    mean.fc_after *= inv;
  }
  emit(mean);
  if (!out) throw std::runtime_error("failed writing " + path);
}

namespace {

// Triangle-soup accumulator for the scene OBJ.
struct SceneMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;

  void add(const Pose& pose, const std::vector<Vec3>& verts,
           const std::vector<std::array<int, 3>>& tris) {
    const int base = static_cast<int>(vertices.size());
    for (const auto& v : verts) vertices.push_back(pose.apply(v));
    for (const auto& t : tris) {
      triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
    }
  }
};

void tessellate_box(const Vec3& he, std::vector<Vec3>& verts,
                    std::vector<std::array<int, 3>>& tris) {
  verts = {{-he.x(), -he.y(), -he.z()}, {he.x(), -he.y(), -he.z()},
           {he.x(), he.y(), -he.z()},   {-he.x(), he.y(), -he.z()},
           {-he.x(), -he.y(), he.z()},  {he.x(), -he.y(), he.z()},
           {he.x(), he.y(), he.z()},    {-he.x(), he.y(), he.z()}};
  tris = {{0, 2, 1}, {0, 3, 2}, {4, 5, 6}, {4, 6, 7}, {0, 1, 5}, {0, 5, 4},
          {1, 2, 6}, {1, 6, 5}, {2, 3, 7}, {2, 7, 6}, {3, 0, 4}, {3, 4, 7}};
}

void tessellate_capsule(double radius, double half_length,
                        std::vector<Vec3>& verts,
                        std::vector<std::array<int, 3>>& tris) {
  constexpr int kSegments = 16;
  constexpr int kRings = 4;  // per hemispherical cap
  verts.clear();
  tris.clear();
  // Stacked rings from the bottom pole to the top pole; the cylinder is the
  // section between the two equatorial rings.
  std::vector<double> ring_z;
  std::vector<double> ring_r;
  ring_z.push_back(-half_length - radius);
  ring_r.push_back(0.0);
  for (int i = 1; i <= kRings; ++i) {
    const double a = M_PI_2 * i / kRings;  // 0 at pole, pi/2 at equator
    ring_z.push_back(-half_length - radius * std::cos(a));
    ring_r.push_back(radius * std::sin(a));
  }
  for (int i = kRings - 1; i >= 0; --i) {
    const double a = M_PI_2 * i / kRings;
    ring_z.push_back(half_length + radius * std::cos(a));
    ring_r.push_back(radius * std::sin(a));
  }
  // Poles are the first and last entries (r = 0).
  const int rings = static_cast<int>(ring_z.size());
  std::vector<int> ring_base(rings, -1);
  verts.push_back(Vec3(0, 0, ring_z.front()));
  for (int i = 1; i < rings - 1; ++i) {
    ring_base[i] = static_cast<int>(verts.size());
    for (int s = 0; s < kSegments; ++s) {
      const double t = 2.0 * M_PI * s / kSegments;
      verts.push_back(
          Vec3(ring_r[i] * std::cos(t), ring_r[i] * std::sin(t), ring_z[i]));
    }
  }
  verts.push_back(Vec3(0, 0, ring_z.back()));
  const int top = static_cast<int>(verts.size()) - 1;

  for (int s = 0; s < kSegments; ++s) {
    const int s1 = (s + 1) % kSegments;
    tris.push_back({0, ring_base[1] + s1, ring_base[1] + s});
    tris.push_back({top, ring_base[rings - 2] + s, ring_base[rings - 2] + s1});
  }
  for (int i = 1; i < rings - 2; ++i) {
    for (int s = 0; s < kSegments; ++s) {
      const int s1 = (s + 1) % kSegments;
      const int a = ring_base[i] + s;
      const int b = ring_base[i] + s1;
      const int c = ring_base[i + 1] + s1;
      const int d = ring_base[i + 1] + s;
      tris.push_back({a, b, c});
      tris.push_back({a, c, d});
    }
  }
}

void tessellate_icosahedron(double radius, std::vector<Vec3>& verts,
                            std::vector<std::array<int, 3>>& tris) {
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  verts = {{-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0},
           {0, -1, p}, {0, 1, p}, {0, -1, -p}, {0, 1, -p},
           {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
  for (auto& v : verts) v = v.normalized() * radius;
  tris = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
          {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
          {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
          {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
}

void write_group(std::ofstream& out, const std::string& name,
                 const SceneMesh& mesh, int& vertex_base) {
  out << "g " << name << "\n";
  for (const auto& v : mesh.vertices) {
    out << "v " << format_double(v.x()) << ' ' << format_double(v.y()) << ' '
        << format_double(v.z()) << "\n";
  }
  for (const auto& t : mesh.triangles) {
    out << "f " << t[0] + 1 + vertex_base << ' ' << t[1] + 1 + vertex_base
        << ' ' << t[2] + 1 + vertex_base << "\n";
  }
  vertex_base += static_cast<int>(mesh.vertices.size());
}

}  // namespace

void export_scene(const GraspState& state, const HandModel& hand,
                  const SurfaceModel& surface, const std::string& path) {
  SceneMesh object;
  object.vertices = surface.vertices();
  for (const auto& t : surface.triangles()) {
    object.triangles.push_back({t[0], t[1], t[2]});
  }

  SceneMesh links;
  std::vector<Vec3> verts;
  std::vector<std::array<int, 3>> tris;
  for (const auto& placed : place_primitives(hand, state.palm, state.q)) {
    if (placed.prim->kind == PrimitiveKind::kCapsule) {
      tessellate_capsule(placed.prim->radius, placed.prim->half_length, verts,
                         tris);
    } else {
      tessellate_box(placed.prim->half_extents, verts, tris);
    }
    links.add(placed.world, verts, tris);
  }

  SceneMesh contacts;
  tessellate_icosahedron(0.002, verts, tris);
  for (const auto& c : state.contacts) {
    Pose marker;
    marker.translation = c.position;
    contacts.add(marker, verts, tris);
  }

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# grasp scene export\n";
  int vertex_base = 0;
  write_group(out, "object", object, vertex_base);
  write_group(out, "links", links, vertex_base);
  write_group(out, "contacts", contacts, vertex_base);
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace fsplit
