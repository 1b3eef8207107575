#include "fsplit/quality.hpp"

#include <cmath>
#include <stdexcept>

#include "fsplit/hull.hpp"

namespace fsplit {

double q_object(const std::array<Vec3, 3>& contacts) {
  return (contacts[1] - contacts[0]).cross(contacts[2] - contacts[0]).norm();
}

Eigen::Matrix<double, 9, 1> grad_q_object(
    const std::array<Vec3, 3>& contacts) {
  Eigen::Matrix<double, 9, 1> grad = Eigen::Matrix<double, 9, 1>::Zero();
  const Vec3 u =
      (contacts[1] - contacts[0]).cross(contacts[2] - contacts[0]);
  const double norm = u.norm();
  if (norm < 1e-14) return grad;  // collinear: gradient defined as zero
  const Vec3 uh = u / norm;
  grad.segment<3>(0) = uh.cross(contacts[2] - contacts[1]);
  grad.segment<3>(3) = uh.cross(contacts[0] - contacts[2]);
  grad.segment<3>(6) = uh.cross(contacts[1] - contacts[0]);
  return grad;
}

double q_hand(const Eigen::VectorXd& q, const Eigen::VectorXd& lower,
              const Eigen::VectorXd& upper) {
  double s = 0.0;
  for (int i = 0; i < q.size(); ++i) {
    const double range = upper[i] - lower[i];
    const double dev = (q[i] - 0.5 * (lower[i] + upper[i])) / range;
    s += dev * dev;
  }
  return -0.5 * s;
}

double q_hand(const HandModel& hand, const Eigen::VectorXd& q) {
  return q_hand(q, hand.lower_limits(), hand.upper_limits());
}

Eigen::VectorXd grad_q_hand(const Eigen::VectorXd& q,
                            const Eigen::VectorXd& lower,
                            const Eigen::VectorXd& upper) {
  Eigen::VectorXd g(q.size());
  for (int i = 0; i < q.size(); ++i) {
    const double range = upper[i] - lower[i];
    g[i] = -(q[i] - 0.5 * (lower[i] + upper[i])) / (range * range);
  }
  return g;
}

Eigen::VectorXd grad_q_hand(const HandModel& hand, const Eigen::VectorXd& q) {
  return grad_q_hand(q, hand.lower_limits(), hand.upper_limits());
}

double grasp_quality(const QualityWeights& w,
                     const std::array<Vec3, 3>& contacts,
                     const HandModel& hand, const Eigen::VectorXd& q) {
  return w.w1 * q_object(contacts) + w.w2 * q_hand(hand, q);
}

double grasp_isotropy(const Eigen::Matrix<double, 6, 9>& g) {
  Eigen::JacobiSVD<Eigen::Matrix<double, 6, 9>> svd(g);
  const auto& s = svd.singularValues();
  if (s(0) <= 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

double wrench_volume(const Eigen::Matrix<double, 6, 9>& g) {
  Eigen::JacobiSVD<Eigen::Matrix<double, 6, 9>> svd(g);
  const auto& s = svd.singularValues();
  double v = 1.0;
  for (int i = 0; i < s.size(); ++i) v *= s(i);
  return v;
}

std::vector<Eigen::Matrix<double, 6, 1>> cone_wrenches(
    const std::array<Vec3, 3>& contacts, const std::array<Vec3, 3>& normals,
    double mu, int m_edges) {
  if (!(mu > 0.0) || m_edges < 3) {
    throw std::invalid_argument("cone_wrenches: need mu > 0 and m_edges >= 3");
  }
  double rho = 0.0;
  for (const auto& c : contacts) rho = std::max(rho, c.norm());
  if (rho < 1e-12) rho = 1.0;

  std::vector<Eigen::Matrix<double, 6, 1>> wrenches;
  wrenches.reserve(3 * static_cast<size_t>(m_edges));
  for (int i = 0; i < 3; ++i) {
    const Mat3 frame = contact_frame(normals[i]);  // z = inward normal
    for (int k = 0; k < m_edges; ++k) {
      const double theta = 2.0 * M_PI * k / m_edges;
      // Unit normal component: the cone edge set for friction mu is nested
      // inside the edge set for any mu' > mu, preserving metric monotonicity.
      const Vec3 f = frame.col(2) +
                     mu * (std::cos(theta) * frame.col(0) +
                           std::sin(theta) * frame.col(1));
      Eigen::Matrix<double, 6, 1> w;
      w.head<3>() = f;
      w.tail<3>() = contacts[i].cross(f) / rho;
      wrenches.push_back(w);
    }
  }
  return wrenches;
}

double ferrari_canny(const std::array<Vec3, 3>& contacts,
                     const std::array<Vec3, 3>& normals, double mu,
                     int m_edges) {
  return inscribed_radius_6d(cone_wrenches(contacts, normals, mu, m_edges));
}

MetricReport evaluate_metrics(const std::array<SurfacePoint, 3>& contacts,
                              const HandModel& hand, const Eigen::VectorXd& q,
                              const QualityWeights& w, double mu,
                              int m_edges) {
  const std::array<Vec3, 3> pos{contacts[0].position, contacts[1].position,
                                contacts[2].position};
  const std::array<Vec3, 3> nrm{contacts[0].normal, contacts[1].normal,
                                contacts[2].normal};
  MetricReport r;
  r.q_object = q_object(pos);
  r.q_hand = q_hand(hand, q);
  r.q_total = w.w1 * r.q_object + w.w2 * r.q_hand;
  const Eigen::Matrix<double, 6, 9> g = grasp_map(pos, nrm);
  r.isotropy = grasp_isotropy(g);
  r.wrench_volume = wrench_volume(g);
  r.ferrari_canny = ferrari_canny(pos, nrm, mu, m_edges);
  return r;
}

}  // namespace fsplit
