#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <fstream>
#include <random>
#include <set>

#include "fsplit/surface.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace fsplit;

namespace {

const std::string kScratch = testing::temp_dir("surface");

std::string write_file(const std::string& name, const std::string& body) {
  const std::string path = kScratch + "/" + name;
  std::ofstream out(path, std::ios::binary);
  out << body;
  return path;
}

const char* kCubeObj =
    "v -1 -1 -1\nv 1 -1 -1\nv 1 1 -1\nv -1 1 -1\n"
    "v -1 -1 1\nv 1 -1 1\nv 1 1 1\nv -1 1 1\n"
    "f 1 3 2\nf 1 4 3\nf 5 6 7\nf 5 7 8\n"
    "f 1 2 6\nf 1 6 5\nf 2 3 7\nf 2 7 6\n"
    "f 3 4 8\nf 3 8 7\nf 4 1 5\nf 4 5 8\n";

}  // namespace

TEST_CASE("unit cube OBJ: eight vertices with unit outward normals") {
  const SurfaceModel cube = load_mesh(write_file("cube.obj", kCubeObj));
  CHECK(cube.vertices().size() == 8);
  CHECK(cube.triangles().size() == 12);
  for (size_t i = 0; i < cube.vertices().size(); ++i) {
    CHECK(cube.vertex_normals()[i].norm() == doctest::Approx(1.0).epsilon(1e-12));
    // Convex and centered: normals must point away from the origin.
    CHECK(cube.vertex_normals()[i].dot(cube.vertices()[i]) > 0.0);
  }
}

TEST_CASE("explicit normals pass through up to normalization") {
  std::vector<Vec3> verts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  std::vector<std::array<int, 3>> tris{{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  std::vector<Vec3> normals{{-2, -2, -2}, {3, 0, 0}, {0, 1, 0}, {0, 0, 5}};
  const SurfaceModel tet(verts, tris, normals);
  for (size_t i = 0; i < normals.size(); ++i) {
    CHECK((tet.vertex_normals()[i] - normals[i].normalized()).norm() < 1e-12);
  }
}

TEST_CASE("construction centers the vertex centroid at the origin") {
  const SurfaceModel cube = load_mesh(write_file("cube2.obj", kCubeObj), 2.5);
  Vec3 centroid = Vec3::Zero();
  for (const auto& v : cube.vertices()) centroid += v;
  CHECK(centroid.norm() < 1e-12);
  // Scale applied before centering: the cube spans [-2.5, 2.5] now.
  CHECK(cube.bbox().diagonal().isApprox(Vec3(5, 5, 5), 1e-12));
}

TEST_CASE("nearest neighbor is the identity on vertices") {
  const SurfaceModel sphere = testing::icosphere(3, 0.03);
  for (size_t i = 0; i < sphere.vertices().size(); ++i) {
    const SurfacePoint p = sphere.nearest_neighbor(sphere.vertices()[i]);
    CHECK(p.vertex_id == static_cast<int>(i));
    CHECK((p.position - sphere.vertices()[i]).norm() == 0.0);
  }
}

TEST_CASE("nearest neighbor matches a brute-force scan") {
  const SurfaceModel sphere = testing::uv_sphere(18, 28, 1.0);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec3 p(u(rng), u(rng), u(rng));
    const SurfacePoint got = sphere.nearest_neighbor(p);
    const int want = testing::brute_force_nn(sphere.vertices(), p);
    // Equal distance is required exactly; the id may differ only on ties.
    CHECK((sphere.vertices()[want] - p).norm() ==
          (got.position - p).norm());
  }

  // A probe outside the sphere along +x lands within one edge of (1,0,0).
  const SurfacePoint tip = sphere.nearest_neighbor(Vec3(2, 0, 0));
  CHECK((tip.position - Vec3(1, 0, 0)).norm() < 0.25);
}

TEST_CASE("nearest neighbor ties break toward the lowest vertex id") {
  std::vector<Vec3> verts{{0, 0, 3}, {-1, 0, 0}, {1, 0, 0}, {0, 2, 0}};
  std::vector<std::array<int, 3>> tris{{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}};
  const SurfaceModel mesh(verts, tris);
  // Centering moves all vertices equally; the midpoint keeps the tie.
  const Vec3 query = 0.5 * (mesh.vertices()[1] + mesh.vertices()[2]);
  CHECK(mesh.nearest_neighbor(query).vertex_id == 1);
}

TEST_CASE("downsample cell sizes: one cell, all vertices, cube count") {
  const SurfaceModel cube = load_mesh(write_file("cube3.obj", kCubeObj));
  CHECK(downsample(cube, 100.0).size() == 1);
  CHECK(downsample(cube, 1e-6).size() == cube.vertices().size());
  CHECK(downsample(cube, 0.5).size() <= 8 * 8 * 8);

  const SurfaceModel sphere = testing::icosphere(3, 0.03);
  const auto a = downsample(sphere, 0.004);
  const auto b = downsample(sphere, 0.004);
  CHECK(a.size() > 10);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("OBJ loader handles vn records and face variants") {
  const std::string body =
      "v 0 0 0\nv 1 0 0\nv 0 1 0\n"
      "vn 0 0 1\nvn 0 0 1\nvn 0 0 1\n"
      "f 1//1 2//2 3//3\n";
  const SurfaceModel m = load_mesh(write_file("tri.obj", body));
  CHECK(m.vertices().size() == 3);
  for (const auto& n : m.vertex_normals()) {
    CHECK((n - Vec3(0, 0, 1)).norm() < 1e-12);
  }
}

TEST_CASE("OBJ loader rejects malformed input") {
  CHECK_THROWS_AS(load_mesh(write_file("bad1.obj", "v 0 0\nf 1 2 3\n")),
                  std::runtime_error);
  CHECK_THROWS_AS(load_mesh(write_file("bad2.obj", "v 0 0 0\nf 1 2 3\n")),
                  std::runtime_error);
  CHECK_THROWS_AS(load_mesh(write_file("bad3.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\n")),
                  std::runtime_error);  // no triangles
  CHECK_THROWS_AS(load_mesh(kScratch + "/does_not_exist.obj"),
                  std::runtime_error);
}

TEST_CASE("ASCII STL round-trips a triangle soup") {
  const std::string body =
      "solid tri\n"
      " facet normal 0 0 1\n  outer loop\n"
      "   vertex 0 0 0\n   vertex 1 0 0\n   vertex 0 1 0\n"
      "  endloop\n endfacet\n"
      " facet normal 0 0 1\n  outer loop\n"
      "   vertex 0 0 0\n   vertex 0 1 0\n   vertex 0 0 1\n"
      "  endloop\n endfacet\n"
      "endsolid tri\n";
  const SurfaceModel m = load_mesh(write_file("tri.stl", body));
  CHECK(m.vertices().size() == 4);  // origin and (0,1,0) deduplicated
  CHECK(m.triangles().size() == 2);
}

TEST_CASE("binary STL deduplicates repeated facet vertices") {
  std::string body(80, '\0');
  const uint32_t count = 2;
  body.append(reinterpret_cast<const char*>(&count), 4);
  const float tris[2][12] = {
      {0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0},
      {0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 1},
  };
  for (const auto& t : tris) {
    body.append(reinterpret_cast<const char*>(t), sizeof(t));
    body.append(2, '\0');
  }
  const SurfaceModel m = load_mesh(write_file("bin.stl", body));
  CHECK(m.vertices().size() == 4);
  CHECK(m.triangles().size() == 2);
}

TEST_CASE("ASCII PLY with vertex normals") {
  const std::string body =
      "ply\nformat ascii 1.0\n"
      "element vertex 3\n"
      "property float x\nproperty float y\nproperty float z\n"
      "property float nx\nproperty float ny\nproperty float nz\n"
      "element face 1\n"
      "property list uchar int vertex_indices\n"
      "end_header\n"
      "0 0 0 0 0 1\n1 0 0 0 0 1\n0 1 0 0 0 1\n"
      "3 0 1 2\n";
  const SurfaceModel m = load_mesh(write_file("tri.ply", body));
  CHECK(m.vertices().size() == 3);
  CHECK(m.triangles().size() == 1);
  CHECK((m.vertex_normals()[0] - Vec3(0, 0, 1)).norm() < 1e-12);
  CHECK_THROWS_AS(
      load_mesh(write_file("bad.ply", "ply\nformat binary_little_endian 1.0\n"
                                      "end_header\n")),
      std::runtime_error);
}

TEST_CASE("write_obj round-trips through load_mesh") {
  const SurfaceModel sphere = testing::icosphere(2, 0.05);
  const std::string path = kScratch + "/roundtrip.obj";
  write_obj(path, sphere.vertices(), sphere.triangles());
  const SurfaceModel back = load_mesh(path);
  REQUIRE(back.vertices().size() == sphere.vertices().size());
  REQUIRE(back.triangles().size() == sphere.triangles().size());
  for (size_t i = 0; i < back.vertices().size(); ++i) {
    CHECK((back.vertices()[i] - sphere.vertices()[i]).norm() < 1e-12);
  }
}

TEST_CASE("procedural fixtures are sane meshes") {
  // Convex fixtures: outward normals mean dot(n, p) > 0 once centered.
  for (const SurfaceModel& m :
       {testing::fixture_sphere(), testing::fixture_box(),
        testing::fixture_tool(), testing::uv_sphere(18, 28, 0.03)}) {
    for (size_t i = 0; i < m.vertices().size(); ++i) {
      CHECK(m.vertex_normals()[i].dot(m.vertices()[i]) > 0.0);
    }
  }

  // Torus: normals point away from the local ring center.
  const SurfaceModel torus = testing::fixture_torus();
  for (size_t i = 0; i < torus.vertices().size(); ++i) {
    const Vec3& p = torus.vertices()[i];
    Vec3 ring(p.x(), p.y(), 0.0);
    ring = 0.02 * ring.normalized();
    CHECK(torus.vertex_normals()[i].dot(p - ring) > 0.0);
  }

  // The scan stand-in is big: the planner's throughput target needs ~45K.
  const SurfaceModel blob = testing::fixture_blob();
  CHECK(blob.vertices().size() == 40962);
  for (size_t i = 0; i < blob.vertices().size(); ++i) {
    CHECK(blob.vertex_normals()[i].dot(blob.vertices()[i]) > 0.0);
  }
}
