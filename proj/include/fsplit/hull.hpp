#pragma once

#include <vector>

#include <Eigen/Dense>

namespace fsplit {

using Vector6d = Eigen::Matrix<double, 6, 1>;

struct HullFacet {
  std::array<int, 6> vertices;  // indices into the input point set
  Vector6d normal;              // unit, outward
  double offset = 0.0;          // normal . x = offset on the facet plane
};

/// Incremental (beneath-beyond) convex hull of 6-D points. Returns false when
/// the input is not full-dimensional (affine dimension < 6); facets is left
/// empty in that case.
bool convex_hull_6d(const std::vector<Vector6d>& points,
                    std::vector<HullFacet>& facets);

/// Radius of the largest origin-centered ball contained in the convex hull of
/// `points`: the minimum origin-to-facet distance. Returns 0 when the hull is
/// degenerate or the origin is not strictly inside.
double inscribed_radius_6d(const std::vector<Vector6d>& points);

}  // namespace fsplit
