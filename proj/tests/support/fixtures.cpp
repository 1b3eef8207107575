#include "support/fixtures.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <utility>

namespace fsplit::testing {

namespace {

struct RawMesh {
  std::vector<Vec3> v;
  std::vector<std::array<int, 3>> f;
};

RawMesh icosahedron_unit() {
  const double p = 0.5 * (1.0 + std::sqrt(5.0));
  RawMesh m;
  m.v = {{-1, p, 0}, {1, p, 0},   {-1, -p, 0}, {1, -p, 0},
         {0, -1, p}, {0, 1, p},   {0, -1, -p}, {0, 1, -p},
         {p, 0, -1}, {p, 0, 1},   {-p, 0, -1}, {-p, 0, 1}};
  for (auto& v : m.v) v.normalize();
  m.f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
         {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
         {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
         {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  return m;
}

RawMesh subdivide(const RawMesh& in) {
  RawMesh out;
  out.v = in.v;
  std::map<std::pair<int, int>, int> midpoints;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoints.find(key);
    if (it != midpoints.end()) return it->second;
    const Vec3 m = (out.v[a] + out.v[b]).normalized();
    out.v.push_back(m);
    const int id = static_cast<int>(out.v.size()) - 1;
    midpoints.emplace(key, id);
    return id;
  };
  for (const auto& [a, b, c] : in.f) {
    const int ab = mid(a, b);
    const int bc = mid(b, c);
    const int ca = mid(c, a);
    out.f.push_back({a, ab, ca});
    out.f.push_back({b, bc, ab});
    out.f.push_back({c, ca, bc});
    out.f.push_back({ab, bc, ca});
  }
  return out;
}

RawMesh icosphere_raw(int subdivisions) {
  RawMesh m = icosahedron_unit();
  for (int s = 0; s < subdivisions; ++s) m = subdivide(m);
  return m;
}

}  // namespace

SurfaceModel icosphere(int subdivisions, double radius) {
  RawMesh m = icosphere_raw(subdivisions);
  for (auto& v : m.v) v *= radius;
  return SurfaceModel(std::move(m.v), std::move(m.f));
}

SurfaceModel bumpy_sphere(int subdivisions,
                          const std::function<double(const Vec3&)>& radius_fn) {
  RawMesh m = icosphere_raw(subdivisions);
  for (auto& v : m.v) v *= radius_fn(v);
  return SurfaceModel(std::move(m.v), std::move(m.f));
}

SurfaceModel box_mesh(const Vec3& half_extents, double cell) {
  if (!(cell > 0.0)) throw std::invalid_argument("box_mesh: cell must be > 0");
  std::vector<Vec3> verts;
  std::vector<std::array<int, 3>> tris;
  for (int axis = 0; axis < 3; ++axis) {
    const int ua = (axis + 1) % 3;
    const int va = (axis + 2) % 3;
    const int nu =
        std::max(1, static_cast<int>(std::ceil(2.0 * half_extents[ua] / cell)));
    const int nv =
        std::max(1, static_cast<int>(std::ceil(2.0 * half_extents[va] / cell)));
    for (int sign = -1; sign <= 1; sign += 2) {
      const int base = static_cast<int>(verts.size());
      for (int i = 0; i <= nu; ++i) {
        for (int j = 0; j <= nv; ++j) {
          Vec3 p;
          p[axis] = sign * half_extents[axis];
          // (2i - n)/n hits the corners exactly, so shared edges deduplicate.
          p[ua] = half_extents[ua] * (2.0 * i - nu) / nu;
          p[va] = half_extents[va] * (2.0 * j - nv) / nv;
          verts.push_back(p);
        }
      }
      auto at = [&](int i, int j) { return base + i * (nv + 1) + j; };
      for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
          const int a = at(i, j), b = at(i + 1, j);
          const int c = at(i + 1, j + 1), d = at(i, j + 1);
          if (sign > 0) {
            tris.push_back({a, b, c});
            tris.push_back({a, c, d});
          } else {
            tris.push_back({a, c, b});
            tris.push_back({a, d, c});
          }
        }
      }
    }
  }
  return SurfaceModel(std::move(verts), std::move(tris));
}

SurfaceModel torus_mesh(double major_radius, double minor_radius,
                        int major_segments, int minor_segments) {
  std::vector<Vec3> verts;
  std::vector<std::array<int, 3>> tris;
  verts.reserve(static_cast<size_t>(major_segments) * minor_segments);
  for (int i = 0; i < major_segments; ++i) {
    const double phi = 2.0 * M_PI * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      const double theta = 2.0 * M_PI * j / minor_segments;
      const double ring = major_radius + minor_radius * std::cos(theta);
      verts.emplace_back(ring * std::cos(phi), ring * std::sin(phi),
                         minor_radius * std::sin(theta));
    }
  }
  auto at = [&](int i, int j) {
    return (i % major_segments) * minor_segments + (j % minor_segments);
  };
  for (int i = 0; i < major_segments; ++i) {
    for (int j = 0; j < minor_segments; ++j) {
      const int a = at(i, j), b = at(i + 1, j);
      const int c = at(i + 1, j + 1), d = at(i, j + 1);
      tris.push_back({a, b, c});
      tris.push_back({a, c, d});
    }
  }
  return SurfaceModel(std::move(verts), std::move(tris));
}

SurfaceModel rod_mesh(double radius, double cylinder_half_length, int segments,
                      int axial_rings, int cap_rings) {
  // Rings of constant x: left cap, cylinder, right cap; fan at the poles.
  std::vector<double> xs;
  std::vector<double> rs;
  for (int k = cap_rings - 1; k >= 1; --k) {
    const double psi = 0.5 * M_PI * k / cap_rings;
    xs.push_back(-cylinder_half_length - radius * std::sin(psi));
    rs.push_back(radius * std::cos(psi));
  }
  for (int k = 0; k <= axial_rings; ++k) {
    xs.push_back(-cylinder_half_length +
                 2.0 * cylinder_half_length * k / axial_rings);
    rs.push_back(radius);
  }
  for (int k = 1; k <= cap_rings - 1; ++k) {
    const double psi = 0.5 * M_PI * k / cap_rings;
    xs.push_back(cylinder_half_length + radius * std::sin(psi));
    rs.push_back(radius * std::cos(psi));
  }

  std::vector<Vec3> verts;
  std::vector<std::array<int, 3>> tris;
  const int left_pole = 0;
  verts.emplace_back(-cylinder_half_length - radius, 0.0, 0.0);
  const int ring0 = static_cast<int>(verts.size());
  for (size_t ring = 0; ring < xs.size(); ++ring) {
    for (int s = 0; s < segments; ++s) {
      // rs[ring] == 0 never happens: psi stops short of the poles.
      const double a = 2.0 * M_PI * s / segments;
      verts.emplace_back(xs[ring], rs[ring] * std::cos(a),
                         rs[ring] * std::sin(a));
    }
  }
  const int right_pole = static_cast<int>(verts.size());
  verts.emplace_back(cylinder_half_length + radius, 0.0, 0.0);

  auto at = [&](int ring, int s) { return ring0 + ring * segments + s % segments; };
  for (int s = 0; s < segments; ++s) {
    tris.push_back({left_pole, at(0, s + 1), at(0, s)});
  }
  for (size_t ring = 0; ring + 1 < xs.size(); ++ring) {
    const int r = static_cast<int>(ring);
    for (int s = 0; s < segments; ++s) {
      const int a = at(r, s), b = at(r, s + 1);
      const int c = at(r + 1, s + 1), d = at(r + 1, s);
      tris.push_back({a, b, c});
      tris.push_back({a, c, d});
    }
  }
  const int last = static_cast<int>(xs.size()) - 1;
  for (int s = 0; s < segments; ++s) {
    tris.push_back({right_pole, at(last, s), at(last, s + 1)});
  }
  return SurfaceModel(std::move(verts), std::move(tris));
}

SurfaceModel uv_sphere(int rings, int segments, double radius) {
  std::vector<Vec3> verts;
  std::vector<std::array<int, 3>> tris;
  const int north = 0;
  verts.emplace_back(0.0, 0.0, radius);
  for (int i = 1; i <= rings; ++i) {
    const double polar = M_PI * i / (rings + 1);
    for (int j = 0; j < segments; ++j) {
      const double az = 2.0 * M_PI * j / segments;
      verts.emplace_back(radius * std::sin(polar) * std::cos(az),
                         radius * std::sin(polar) * std::sin(az),
                         radius * std::cos(polar));
    }
  }
  const int south = static_cast<int>(verts.size());
  verts.emplace_back(0.0, 0.0, -radius);

  auto at = [&](int i, int j) { return 1 + i * segments + j % segments; };
  for (int j = 0; j < segments; ++j) {
    tris.push_back({north, at(0, j), at(0, j + 1)});
  }
  for (int i = 0; i + 1 < rings; ++i) {
    for (int j = 0; j < segments; ++j) {
      const int a = at(i, j), b = at(i, j + 1);
      const int c = at(i + 1, j + 1), d = at(i + 1, j);
      tris.push_back({a, d, c});
      tris.push_back({a, c, b});
    }
  }
  for (int j = 0; j < segments; ++j) {
    tris.push_back({south, at(rings - 1, j + 1), at(rings - 1, j)});
  }
  return SurfaceModel(std::move(verts), std::move(tris));
}

SurfaceModel fixture_sphere() { return icosphere(4, 0.03); }

SurfaceModel fixture_box() {
  return box_mesh(Vec3(0.025, 0.02, 0.015), 0.0015);
}

SurfaceModel fixture_torus() { return torus_mesh(0.02, 0.008, 120, 48); }

SurfaceModel fixture_blob() {
  return bumpy_sphere(6, [](const Vec3& u) {
    return 0.028 * (1.0 + 0.05 * std::sin(3 * u.x() + 1.1) * std::cos(2 * u.y()) +
                    0.04 * std::sin(4 * u.z()) * std::sin(2 * u.x()) +
                    0.03 * std::cos(5 * u.y() + 0.3));
  });
}

SurfaceModel fixture_tool() { return rod_mesh(0.012, 0.05, 48, 64, 8); }

const HandModel& default_hand() {
  static const HandModel hand = load_hand_config(FSPLIT_HAND_CONFIG);
  return hand;
}

HandModel wide_limit_hand() {
  HandModel hand = default_hand();
  for (auto& finger : hand.fingers) {
    for (auto& joint : finger.joints) {
      joint.lower -= 1.0;
      joint.upper += 1.0;
    }
  }
  return hand;
}

std::string temp_dir(const std::string& tag) {
  namespace fs = std::filesystem;
  std::string pattern =
      (fs::temp_directory_path() / ("fsplit_" + tag + "_XXXXXX")).string();
  char* made = mkdtemp(pattern.data());
  if (made == nullptr) throw std::runtime_error("mkdtemp failed for " + tag);
  return std::string(made);
}

}  // namespace fsplit::testing
