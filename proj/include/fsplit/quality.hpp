#pragma once

#include <array>

#include <Eigen/Dense>

#include "fsplit/geometry.hpp"
#include "fsplit/kinematics.hpp"

namespace fsplit {

/// Composite quality Q = w1 * q_object + w2 * q_hand. q_hand is negative
/// semidefinite, so a positive w2 penalizes deviation from joint centers;
/// w2 < 0 is accepted for experimentation (flips the hand term into a
/// reward).
struct QualityWeights {
  double w1 = 1.0;
  double w2 = 0.01;
};

/// Twice the area of the contact triangle: ||(c2-c1) x (c3-c1)||.
double q_object(const std::array<Vec3, 3>& contacts);

/// Analytic gradient of q_object, stacked per contact (9-vector). Zero for
/// collinear contacts.
Eigen::Matrix<double, 9, 1> grad_q_object(const std::array<Vec3, 3>& contacts);

/// Joint-centering score: -0.5 * sum(((q - mid)/range)^2). Always <= 0 and
/// zero exactly at the midpoints.
double q_hand(const Eigen::VectorXd& q, const Eigen::VectorXd& lower,
              const Eigen::VectorXd& upper);
double q_hand(const HandModel& hand, const Eigen::VectorXd& q);

/// Analytic gradient of q_hand: per joint -(q - mid)/range^2.
Eigen::VectorXd grad_q_hand(const Eigen::VectorXd& q,
                            const Eigen::VectorXd& lower,
                            const Eigen::VectorXd& upper);
Eigen::VectorXd grad_q_hand(const HandModel& hand, const Eigen::VectorXd& q);

/// Composite quality at a state.
double grasp_quality(const QualityWeights& w,
                     const std::array<Vec3, 3>& contacts,
                     const HandModel& hand, const Eigen::VectorXd& q);

/// sigma_min(G) / sigma_max(G); 0 when sigma_max is 0.
double grasp_isotropy(const Eigen::Matrix<double, 6, 9>& g);

/// sqrt(det(G G^T)) == product of the singular values of G.
double wrench_volume(const Eigen::Matrix<double, 6, 9>& g);

/// Ferrari-Canny ball radius: each friction cone is discretized into m_edges
/// forces with unit inward-normal component, wrenches are [f; (c x f)/rho]
/// with rho the largest contact radius, and the result is the radius of the
/// largest origin-centered ball inside their convex hull (0 if the origin is
/// outside or the hull is degenerate).
double ferrari_canny(const std::array<Vec3, 3>& contacts,
                     const std::array<Vec3, 3>& normals, double mu,
                     int m_edges);

/// Discretized friction-cone wrenches used by ferrari_canny, exposed for
/// independent verification.
std::vector<Eigen::Matrix<double, 6, 1>> cone_wrenches(
    const std::array<Vec3, 3>& contacts, const std::array<Vec3, 3>& normals,
    double mu, int m_edges);

struct MetricReport {
  double q_total = 0.0;
  double q_object = 0.0;
  double q_hand = 0.0;
  double isotropy = 0.0;
  double wrench_volume = 0.0;
  double ferrari_canny = 0.0;
};

MetricReport evaluate_metrics(const std::array<SurfacePoint, 3>& contacts,
                              const HandModel& hand, const Eigen::VectorXd& q,
                              const QualityWeights& w, double mu = 0.5,
                              int m_edges = 8);

}  // namespace fsplit
