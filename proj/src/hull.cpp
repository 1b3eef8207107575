#include "fsplit/hull.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace fsplit {

namespace {

// Hyperplane through 6 points: unit normal spanning the null space of the
// 5 edge vectors, oriented so `interior` lies strictly below.
bool facet_plane(const std::vector<Vector6d>& pts,
                 const std::array<int, 6>& vs, const Vector6d& interior,
                 Vector6d& normal, double& offset) {
  Eigen::Matrix<double, 5, 6> edges;
  for (int k = 0; k < 5; ++k) {
    edges.row(k) = (pts[vs[k + 1]] - pts[vs[0]]).transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 5, 6>> svd(edges,
                                                    Eigen::ComputeFullV);
  normal = svd.matrixV().col(5);
  const double nn = normal.norm();
  if (nn < 1e-14) return false;
  normal /= nn;
  // Reject degenerate (rank-deficient) facets: the 5 edges must actually
  // span a 5-D subspace.
  if (svd.singularValues()(4) < 1e-12) return false;
  offset = normal.dot(pts[vs[0]]);
  const double side = normal.dot(interior) - offset;
  if (side > 0.0) {
    normal = -normal;
    offset = -offset;
  }
  return true;
}

using Ridge = std::array<int, 5>;

Ridge make_ridge(const std::array<int, 6>& vs, int omit) {
  Ridge r;
  int k = 0;
  for (int i = 0; i < 6; ++i) {
    if (i != omit) r[k++] = vs[i];
  }
  std::sort(r.begin(), r.end());
  return r;
}

}  // namespace

bool convex_hull_6d(const std::vector<Vector6d>& points,
                    std::vector<HullFacet>& facets) {
  facets.clear();
  const int n = static_cast<int>(points.size());
  if (n < 7) return false;

  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, p.lpNorm<Eigen::Infinity>());
  if (!(scale > 0.0)) return false;
  const double eps = 1e-10 * (1.0 + scale);

  // Greedy affinely-independent seed simplex: repeatedly take the point
  // farthest from the affine span of those already chosen.
  std::vector<int> chosen{0};
  Eigen::Matrix<double, 6, 6> basis;  // orthonormal columns, grown left-to-right
  int dim = 0;
  while (dim < 6) {
    int best = -1;
    double best_dist = eps;
    Vector6d best_residual = Vector6d::Zero();
    for (int i = 0; i < n; ++i) {
      Vector6d r = points[i] - points[chosen[0]];
      for (int k = 0; k < dim; ++k) r -= basis.col(k).dot(r) * basis.col(k);
      const double d = r.norm();
      if (d > best_dist) {
        best_dist = d;
        best = i;
        best_residual = r;
      }
    }
    if (best < 0) return false;  // affine dimension < 6
    basis.col(dim) = best_residual / best_dist;
    chosen.push_back(best);
    ++dim;
  }

  Vector6d interior = Vector6d::Zero();
  for (int id : chosen) interior += points[id];
  interior /= 7.0;

  // Initial simplex facets: each omits one of the 7 chosen vertices.
  for (int omit = 0; omit < 7; ++omit) {
    HullFacet f;
    int k = 0;
    for (int i = 0; i < 7; ++i) {
      if (i != omit) f.vertices[k++] = chosen[i];
    }
    if (!facet_plane(points, f.vertices, interior, f.normal, f.offset)) {
      return false;
    }
    facets.push_back(f);
  }

  std::vector<bool> used(n, false);
  for (int id : chosen) used[id] = true;

  for (int p = 0; p < n; ++p) {
    if (used[p]) continue;
    std::vector<int> visible;
    for (int f = 0; f < static_cast<int>(facets.size()); ++f) {
      if (facets[f].normal.dot(points[p]) - facets[f].offset > eps) {
        visible.push_back(f);
      }
    }
    if (visible.empty()) continue;  // interior point

    // Ridges bounding the visible region appear exactly once among the
    // visible facets; each spawns one new facet with p.
    std::map<Ridge, int> ridge_count;
    for (int f : visible) {
      for (int omit = 0; omit < 6; ++omit) {
        ++ridge_count[make_ridge(facets[f].vertices, omit)];
      }
    }

    std::vector<bool> dead(facets.size(), false);
    for (int f : visible) dead[f] = true;
    std::vector<HullFacet> next;
    next.reserve(facets.size());
    for (size_t f = 0; f < facets.size(); ++f) {
      if (!dead[f]) next.push_back(facets[f]);
    }
    bool ok = true;
    for (const auto& [ridge, count] : ridge_count) {
      if (count != 1) continue;
      HullFacet f;
      for (int k = 0; k < 5; ++k) f.vertices[k] = ridge[k];
      f.vertices[5] = p;
      if (!facet_plane(points, f.vertices, interior, f.normal, f.offset)) {
        // Degenerate sliver: abandon this insertion rather than tear a hole
        // in the hull; p sits within tolerance of the boundary anyway.
        ok = false;
        break;
      }
      next.push_back(f);
    }
    if (ok) facets.swap(next);
  }
  return true;
}

double inscribed_radius_6d(const std::vector<Vector6d>& points) {
  std::vector<HullFacet> facets;
  if (!convex_hull_6d(points, facets)) return 0.0;
  double radius = std::numeric_limits<double>::infinity();
  for (const auto& f : facets) {
    // offset = signed distance of the plane from the origin (unit normal,
    // interior below): non-positive means the origin is outside or on the
    // boundary.
    if (f.offset <= 0.0) return 0.0;
    radius = std::min(radius, f.offset);
  }
  return std::isfinite(radius) ? radius : 0.0;
}

}  // namespace fsplit
