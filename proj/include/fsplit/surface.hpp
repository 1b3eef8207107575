#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fsplit/geometry.hpp"

namespace fsplit {

enum class MeshFormat { kObj, kStl, kPly };

/// A vertex of the surface together with its outward normal.
struct SurfacePoint {
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  int vertex_id = -1;
};

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
  Vec3 diagonal() const { return max - min; }
};

/// Immutable triangle mesh with unit outward vertex normals and a KD-tree
/// over the vertices. Construction centers the mesh at its vertex centroid.
/// Safe to share across threads once built.
class SurfaceModel {
 public:
  /// Builds from raw geometry. Deduplicates exactly-coincident vertices,
  /// centers the centroid at the origin and estimates area-weighted vertex
  /// normals when `normals` is empty. Throws std::runtime_error on a mesh
  /// without triangles.
  SurfaceModel(std::vector<Vec3> vertices,
               std::vector<std::array<int, 3>> triangles,
               std::vector<Vec3> normals = {});

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const {
    return triangles_;
  }
  const std::vector<Vec3>& vertex_normals() const { return normals_; }
  const Aabb& bbox() const { return bbox_; }

  SurfacePoint point(int vertex_id) const {
    return SurfacePoint{vertices_[vertex_id], normals_[vertex_id], vertex_id};
  }

  /// Exact nearest vertex to p; ties broken toward the lowest vertex id.
  SurfacePoint nearest_neighbor(const Vec3& p) const;

 private:
  struct KdNode {
    int axis = -1;          // -1 marks a leaf
    double split = 0.0;
    int left = -1, right = -1;
    int begin = 0, end = 0;  // leaf range into order_
  };

  void build_index();
  void query(int node, const Vec3& p, double& best_d2, int& best_id) const;

  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Vec3> normals_;
  Aabb bbox_;
  std::vector<KdNode> nodes_;
  std::vector<int> order_;
};

/// Loads OBJ (ASCII), STL (binary or ASCII) or PLY (ASCII). The format is
/// inferred from the extension unless given. Optional uniform scale is
/// applied to vertex positions before centering.
SurfaceModel load_mesh(const std::string& path, double scale = 1.0);
SurfaceModel load_mesh(const std::string& path, MeshFormat format,
                       double scale = 1.0);

/// Voxel-grid downsampling: one centroid per occupied cell of edge `cell`.
/// Output is ordered by voxel key, so it is deterministic. cell must be > 0.
std::vector<Vec3> downsample(const SurfaceModel& model, double cell);

/// Minimal OBJ writer (v/f records, 1-based indices).
void write_obj(const std::string& path, const std::vector<Vec3>& vertices,
               const std::vector<std::array<int, 3>>& triangles);

}  // namespace fsplit
