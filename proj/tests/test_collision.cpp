#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fsplit/collision.hpp"
#include "fsplit/kinematics.hpp"
#include "support/fixtures.hpp"

using namespace fsplit;

namespace {

CollisionPrimitive capsule(double radius, double half_length) {
  CollisionPrimitive prim;
  prim.kind = PrimitiveKind::kCapsule;
  prim.radius = radius;
  prim.half_length = half_length;
  return prim;
}

CollisionPrimitive box(const Vec3& half_extents) {
  CollisionPrimitive prim;
  prim.kind = PrimitiveKind::kBox;
  prim.half_extents = half_extents;
  return prim;
}

// Jointless hand carrying a single capsule with a +y pad marker; lets the
// pad-exclusion rule be probed without full-chain bookkeeping.
HandModel pad_probe_hand() {
  HandModel hand;
  hand.name = "probe";
  CollisionPrimitive prim = capsule(0.01, 0.02);
  prim.joint_index = -1;
  prim.pad_direction = Vec3(0, 1, 0);
  hand.fingers[0].links.push_back(prim);
  return hand;
}

Pose random_pose(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::Quaterniond quat(n(rng), n(rng), n(rng), n(rng));
  quat.normalize();
  return Pose{quat.toRotationMatrix(), Vec3(n(rng), n(rng), n(rng)) * 0.1};
}

}  // namespace

TEST_CASE("capsule signed distance: axis, lateral, caps") {
  const CollisionPrimitive prim = capsule(0.01, 0.02);
  CHECK(primitive_signed_distance(prim, Vec3(0, 0, 0)) ==
        doctest::Approx(-0.01).epsilon(1e-14));
  CHECK(primitive_signed_distance(prim, Vec3(0, 0, 0.02)) ==
        doctest::Approx(-0.01).epsilon(1e-14));
  CHECK(primitive_signed_distance(prim, Vec3(0.01, 0, 0.005)) ==
        doctest::Approx(0.0).epsilon(1e-14));
  CHECK(primitive_signed_distance(prim, Vec3(0.03, 0, 0)) ==
        doctest::Approx(0.02).epsilon(1e-14));
  CHECK(primitive_signed_distance(prim, Vec3(0, 0, 0.03)) ==
        doctest::Approx(0.0).epsilon(1e-14));
  CHECK(primitive_signed_distance(prim, Vec3(0, 0, -0.05)) ==
        doctest::Approx(0.02).epsilon(1e-14));
  // Diagonal past a cap: distance to the cap sphere.
  CHECK(primitive_signed_distance(prim, Vec3(0.003, 0.004, 0.025)) ==
        doctest::Approx(std::sqrt(9e-6 + 16e-6 + 25e-6) - 0.01).epsilon(1e-12));
}

TEST_CASE("box signed distance: faces, edges, corners, interior") {
  const CollisionPrimitive prim = box(Vec3(0.06, 0.045, 0.012));
  CHECK(primitive_signed_distance(prim, Vec3::Zero()) ==
        doctest::Approx(-0.012).epsilon(1e-14));
  CHECK(primitive_signed_distance(prim, Vec3(0.05, 0.04, 0.005)) ==
        doctest::Approx(-0.005).epsilon(1e-14));
  CHECK(primitive_signed_distance(prim, Vec3(0.06, 0.0, 0.0)) ==
        doctest::Approx(0.0).epsilon(1e-14));
  CHECK(primitive_signed_distance(prim, Vec3(0.08, 0.0, 0.0)) ==
        doctest::Approx(0.02).epsilon(1e-14));
  CHECK(primitive_signed_distance(prim, Vec3(0.09, 0.085, 0.0)) ==
        doctest::Approx(std::hypot(0.03, 0.04)).epsilon(1e-12));
  CHECK(primitive_signed_distance(prim, Vec3(0.09, 0.085, 0.062)) ==
        doctest::Approx(std::sqrt(0.0009 + 0.0016 + 0.0025)).epsilon(1e-12));
}

TEST_CASE("placement instantiates every palm and finger primitive") {
  const HandModel& hand = testing::default_hand();
  const auto placed =
      place_primitives(hand, Pose::identity(), Eigen::VectorXd::Zero(8));
  CHECK(placed.size() == 7);  // 1 palm box + 2 capsules per finger

  // Palm box sits at its configured local offset when the palm is at origin.
  CHECK(placed[0].prim->kind == PrimitiveKind::kBox);
  CHECK((placed[0].world.translation - Vec3(0, 0, -0.012)).norm() < 1e-15);

  // Moving the palm moves every primitive rigidly.
  Pose palm;
  palm.translation = Vec3(0.3, -0.2, 0.1);
  const auto moved = place_primitives(hand, palm, Eigen::VectorXd::Zero(8));
  for (size_t k = 0; k < placed.size(); ++k) {
    CHECK((moved[k].world.translation - placed[k].world.translation -
           palm.translation)
              .norm() < 1e-15);
    CHECK((moved[k].world.rotation - placed[k].world.rotation).norm() == 0.0);
  }
}

TEST_CASE("finger-link primitives follow their joint frames") {
  const HandModel& hand = testing::default_hand();
  Eigen::VectorXd q = Eigen::VectorXd::Zero(8);
  q[1] = 0.6;  // flex finger 1; its joint-1 and joint-2 capsules must move
  const auto at_zero =
      place_primitives(hand, Pose::identity(), Eigen::VectorXd::Zero(8));
  const auto flexed = place_primitives(hand, Pose::identity(), q);
  CHECK((at_zero[1].world.translation - flexed[1].world.translation).norm() >
        1e-3);
  // Palm and other fingers are untouched.
  CHECK((at_zero[0].world.translation - flexed[0].world.translation).norm() ==
        0.0);
  for (size_t k = 3; k < at_zero.size(); ++k) {
    CHECK((at_zero[k].world.translation - flexed[k].world.translation)
              .norm() == 0.0);
  }
}

TEST_CASE("collision test: empty proxy, far object, containment") {
  const HandModel& hand = testing::default_hand();
  const Eigen::VectorXd q = hand.midpoint_q();
  CollisionProxy proxy;
  CHECK(!col_detect(hand, Pose::identity(), q, proxy));

  proxy.points.push_back(Vec3(5, 5, 5));
  CHECK(!col_detect(hand, Pose::identity(), q, proxy));

  proxy.points.push_back(Vec3(0, 0, -0.012));  // palm box center
  CHECK(col_detect(hand, Pose::identity(), q, proxy));
}

TEST_CASE("collision flag is monotone in the clearance") {
  const HandModel& hand = testing::default_hand();
  const Eigen::VectorXd q = hand.midpoint_q();
  CollisionProxy proxy;
  proxy.points.push_back(Vec3(0, 0, 0.02));  // slightly above the palm box
  bool prev = false;
  for (double clearance = 0.0; clearance <= 0.05; clearance += 0.002) {
    const bool hit = col_detect(hand, Pose::identity(), q, proxy, clearance);
    CHECK((!prev || hit));  // once true, stays true as clearance grows
    prev = hit;
  }
  CHECK(prev);  // 5 cm clearance certainly reaches the point
}

TEST_CASE("collision result is invariant under a common rigid motion") {
  const HandModel& hand = testing::default_hand();
  const Eigen::VectorXd q = hand.midpoint_q();
  std::mt19937_64 rng(37);
  std::normal_distribution<double> n(0.0, 0.08);

  CollisionProxy proxy;
  for (int k = 0; k < 200; ++k) {
    proxy.points.push_back(Vec3(n(rng), n(rng), n(rng)));
  }
  const Pose palm = random_pose(rng);
  const bool base = col_detect(hand, palm, q, proxy, 0.001);

  for (int trial = 0; trial < 5; ++trial) {
    const Pose t = random_pose(rng);
    CollisionProxy moved;
    moved.source_cell = proxy.source_cell;
    for (const auto& p : proxy.points) moved.points.push_back(t.apply(p));
    CHECK(col_detect(hand, t.compose(palm), q, moved, 0.001) == base);
  }
}

TEST_CASE("broad phase never changes the outcome") {
  // Oracle: exact signed distances against every placed primitive, same pad
  // rule, no bounding-box rejection.
  const HandModel& hand = testing::default_hand();
  std::mt19937_64 rng(41);
  std::normal_distribution<double> n(0.0, 0.1);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd q = hand.lower_limits();
    for (int i = 0; i < q.size(); ++i) {
      q[i] += u(rng) * (hand.upper_limits()[i] - hand.lower_limits()[i]);
    }
    const Pose palm = random_pose(rng);
    const double clearance = 0.002 * trial;
    const double pad_exclusion = 1e-3;

    CollisionProxy proxy;
    proxy.source_cell = 0.001;
    for (int k = 0; k < 300; ++k) {
      proxy.points.push_back(Vec3(n(rng), n(rng), n(rng)));
    }

    const auto placed = place_primitives(hand, palm, q);
    const double allowance = pad_exclusion + 0.5 * proxy.source_cell;
    bool oracle = false;
    for (const auto& pp : placed) {
      const bool has_pad = pp.prim->pad_direction.norm() > 1e-12;
      for (const auto& p : proxy.points) {
        const Vec3 local =
            pp.world.rotation.transpose() * (p - pp.world.translation);
        double threshold = clearance;
        if (has_pad && local.dot(pp.prim->pad_direction) > 0.0) {
          threshold -= allowance;
        }
        oracle = oracle ||
                 primitive_signed_distance(*pp.prim, local) < threshold;
      }
    }
    CHECK(col_detect(hand, palm, q, proxy, clearance, pad_exclusion) == oracle);
  }
}

TEST_CASE("pad side tolerates intended contact depth, back side does not") {
  const HandModel hand = pad_probe_hand();
  const Eigen::VectorXd q;  // no joints
  const double pad_exclusion = 2e-3;

  CollisionProxy shallow_pad;
  shallow_pad.points.push_back(Vec3(0, 0.009, 0));  // 1 mm deep, pad side
  CHECK(!col_detect(hand, Pose::identity(), q, shallow_pad, 0.0, pad_exclusion));

  CollisionProxy shallow_back;
  shallow_back.points.push_back(Vec3(0, -0.009, 0));  // same depth, back side
  CHECK(col_detect(hand, Pose::identity(), q, shallow_back, 0.0, pad_exclusion));

  CollisionProxy deep_pad;
  deep_pad.points.push_back(Vec3(0, 0.007, 0));  // 3 mm deep beats the allowance
  CHECK(col_detect(hand, Pose::identity(), q, deep_pad, 0.0, pad_exclusion));
}

TEST_CASE("proxy resolution widens the pad allowance") {
  const HandModel hand = pad_probe_hand();
  const Eigen::VectorXd q;

  CollisionProxy proxy;
  proxy.points.push_back(Vec3(0, 0.0075, 0));  // 2.5 mm deep on the pad side
  proxy.source_cell = 0.0;
  CHECK(col_detect(hand, Pose::identity(), q, proxy, 0.0, 2e-3));
  proxy.source_cell = 0.002;  // half-cell bonus lifts the allowance to 3 mm
  CHECK(!col_detect(hand, Pose::identity(), q, proxy, 0.0, 2e-3));
}
