#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "fsplit/geometry.hpp"
#include "fsplit/hull.hpp"

namespace fsplit::testing {

// Orthogonal projection of g onto null(A), computed from a full SVD. The
// maximizer of g.d over {A d = 0, |d| <= s} is s * project / |project|, so
// this doubles as an equality-constrained QP reference solution.
Eigen::VectorXd nullspace_project(const Eigen::MatrixXd& a,
                                  const Eigen::VectorXd& g);

// Cosine of the angle between two vectors; -2 when either is zero.
double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Central finite differences.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double h);
Eigen::MatrixXd fd_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h);

// 4x4 matrix exponential: scaling-and-squaring over a truncated series.
Eigen::Matrix4d expm4(const Eigen::Matrix4d& m);

// Largest origin-centered ball inside the convex hull of 6-D points, by
// exhaustive supporting-hyperplane enumeration over all 6-point subsets.
// Exact for points in general position; independent of the incremental hull.
double inscribed_radius_bruteforce(const std::vector<Vector6d>& points);

// Linear-scan nearest vertex, ties toward the lowest index.
int brute_force_nn(const std::vector<Vec3>& vertices, const Vec3& p);

}  // namespace fsplit::testing
