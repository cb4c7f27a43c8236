#include <doctest.h>

#include <cmath>
#include <limits>

#include "gaitsim/biped.hpp"
#include "gaitsim/contact.hpp"
#include "gaitsim/params.hpp"
#include "gaitsim/rng.hpp"
#include "test_util.hpp"

using namespace gaitsim;

namespace {

// Free planar block with one contact point at its frame origin, so the
// contact kinematics are trivially the base coordinates.
struct Block {
  ArticulatedModel model;
  std::vector<ContactPoint> points;
};

Block make_block(double mass) {
  Block b;
  SegmentSpec seg;
  seg.name = "block";
  seg.mass = mass;
  seg.length = 0.2;
  seg.inertia = 0.05;
  b.model.segments = {seg};
  b.model.parent = {-1};
  b.model.joint_anchor = {Vector2d::Zero()};
  b.points = {{0, Vector2d::Zero()}};
  return b;
}

DynamicsState block_state(double z, double vx, double vz) {
  DynamicsState s;
  s.q = VectorXd::Zero(3);
  s.qdot = VectorXd::Zero(3);
  s.q[1] = z;
  s.qdot[0] = vx;
  s.qdot[1] = vz;
  return s;
}

}  // namespace

TEST_CASE("airborne points produce zero force but report their position") {
  const Block b = make_block(1.0);
  const DynamicsState s = block_state(0.05, 3.0, -2.0);
  const auto forces = contact_forces(b.model, s, b.points, ContactParams{});
  REQUIRE(forces.size() == 1);
  CHECK(forces[0].point_index == 0);
  CHECK(forces[0].force == Vector2d(0.0, 0.0));
  CHECK(forces[0].penetration == 0.0);
  CHECK(forces[0].position == Vector2d(0.0, 0.05));
}

TEST_CASE("static normal force follows the penetration power law") {
  const Block b = make_block(1.0);
  ContactParams p;
  p.stiffness = 2.0e4;
  p.exponent = 1.5;
  p.dissipation = 0.4;
  for (double depth : {1e-4, 1e-3, 7.5e-3, 0.02}) {
    const DynamicsState s = block_state(-depth, 0.0, 0.0);
    const auto forces = contact_forces(b.model, s, b.points, p);
    const double expect = p.stiffness * std::pow(depth, p.exponent);
    CHECK(forces[0].penetration == depth);
    CHECK(forces[0].force.y() == doctest::Approx(expect).epsilon(1e-12));
    CHECK(forces[0].force.x() == 0.0);  // no slip, no friction
  }
}

TEST_CASE("the dissipation term scales with penetration rate and never pulls") {
  const Block b = make_block(1.0);
  ContactParams p;
  const double depth = 0.005;
  const double base = p.stiffness * std::pow(depth, p.exponent);

  // Penetrating faster than rest ⇒ stiffer; withdrawing ⇒ softer.
  const auto fn_at = [&](double vz) {
    const DynamicsState s = block_state(-depth, 0.0, vz);
    return contact_forces(b.model, s, b.points, p)[0].force.y();
  };
  CHECK(fn_at(-0.2) ==
        doctest::Approx(base * (1.0 + 1.5 * p.dissipation * 0.2)).epsilon(1e-12));
  CHECK(fn_at(0.2) ==
        doctest::Approx(base * (1.0 - 1.5 * p.dissipation * 0.2)).epsilon(1e-12));
  // Fast withdrawal would go negative; the force clamps at zero instead.
  CHECK(fn_at(5.0) == 0.0);
}

TEST_CASE("friction is regularized Coulomb and bounded by sigma times normal") {
  const Block b = make_block(1.0);
  ContactParams p;
  p.friction_coeff = 0.7;
  const double depth = 0.004;
  for (double vx : {-2.0, -0.02, -0.001, 0.001, 0.02, 2.0}) {
    const DynamicsState s = block_state(-depth, vx, 0.0);
    const auto f = contact_forces(b.model, s, b.points, p)[0];
    const double expect = -p.friction_coeff * f.force.y() * std::tanh(vx / p.v_reg);
    CHECK(f.force.x() == doctest::Approx(expect).epsilon(1e-12));
    // Opposes motion, magnitude within the Coulomb cone.
    CHECK(f.force.x() * vx <= 0.0);
    CHECK(std::abs(f.force.x()) <= p.friction_coeff * f.force.y() + 1e-12);
  }
  // Deep in the sliding regime the bound is essentially attained.
  const DynamicsState s = block_state(-depth, 1.0, 0.0);
  const auto f = contact_forces(b.model, s, b.points, p)[0];
  CHECK(std::abs(f.force.x()) ==
        doctest::Approx(p.friction_coeff * f.force.y()).epsilon(1e-6));
}

TEST_CASE("normal force is never negative across random contact states") {
  const Block b = make_block(1.0);
  ContactParams p;
  Rng rng(71);
  for (int trial = 0; trial < 2000; ++trial) {
    const DynamicsState s = block_state(rng.uniform(-0.03, 0.03),
                                        rng.uniform(-3.0, 3.0),
                                        rng.uniform(-3.0, 3.0));
    const auto f = contact_forces(b.model, s, b.points, p)[0];
    CHECK(f.force.y() >= 0.0);
    CHECK(std::abs(f.force.x()) <= p.friction_coeff * f.force.y() + 1e-12);
  }
}

TEST_CASE("grf_total aggregates forces and load-weights the COP") {
  std::vector<ContactForce> forces(2);
  forces[0].position = {0.1, 0.0};
  forces[0].force = {2.0, 30.0};
  forces[1].position = {0.4, 0.0};
  forces[1].force = {-1.0, 10.0};
  const GrfTotal g = grf_total(forces);
  CHECK(g.tangential == doctest::Approx(1.0));
  CHECK(g.vertical == doctest::Approx(40.0));
  CHECK(g.cop_x == doctest::Approx((30.0 * 0.1 + 10.0 * 0.4) / 40.0));

  const GrfTotal unloaded = grf_total({});
  CHECK(unloaded.vertical == 0.0);
  CHECK(std::isnan(unloaded.cop_x));
}

TEST_CASE("contact_externals keeps only loaded points, always active") {
  const SubjectSpec subject = testutil::test_subject();
  const Biped biped = build_biped(subject, nominal_params(subject.height_m()));
  DynamicsState s = standing_state(biped);
  s.q[1] -= 0.002;  // press all four points into the ground
  const auto forces =
      contact_forces(biped.model, s, biped.contact_points, ContactParams{});
  auto ext = contact_externals(biped.contact_points, forces);
  CHECK(ext.size() == 4);
  for (std::size_t i = 0; i < ext.size(); ++i) {
    CHECK(ext[i].body == biped.contact_points[i].body);
    CHECK(ext[i].point == biped.contact_points[i].local);
    CHECK(ext[i].force == forces[i].force);
    CHECK(ext[i].active(0.0));
    CHECK(ext[i].active(1e9));
  }

  // Lift one foot: its two points drop out of the list.
  s.q[3] = 0.4;  // left hip flexion swings the leg forward and up
  const auto lifted =
      contact_forces(biped.model, s, biped.contact_points, ContactParams{});
  const auto ext2 = contact_externals(biped.contact_points, lifted);
  CHECK(ext2.size() == 2);
  for (const auto& e : ext2) CHECK(e.body == kFootR);
}

TEST_CASE("a dropped biped settles to support its own weight") {
  const SubjectSpec subject = testutil::test_subject();
  const Biped biped = build_biped(subject, nominal_params(subject.height_m()));
  ContactParams contact;
  DynamicsState s = standing_state(biped);

  // Hold the pose with the PD servo at zero targets and let the vertical
  // dynamics settle into the compliant ground.
  const VectorXd target = VectorXd::Zero(kNumJoints);
  for (int i = 0; i < 20000; ++i) {
    const VectorXd tau =
        pd_torques(biped.model, s, target, biped.gains.kp, biped.gains.kd);
    const auto forces =
        contact_forces(biped.model, s, biped.contact_points, contact);
    const auto ext = contact_externals(biped.contact_points, forces);
    s = step(biped.model, s, tau, ext, 1e-3).state;
  }
  const auto forces =
      contact_forces(biped.model, s, biped.contact_points, contact);
  const GrfTotal g = grf_total(forces);
  const double weight = subject.mass * 9.81;
  CHECK(g.vertical == doctest::Approx(weight).epsilon(0.01));
  CHECK(std::abs(g.tangential) < 0.5);
  // COP stays within the feet.
  CHECK(g.cop_x > -0.25 * biped.params.foot_len);
  CHECK(g.cop_x < 0.75 * biped.params.foot_len);
}

TEST_CASE("contact parameter validation rejects unphysical values") {
  ContactParams p;
  p.stiffness = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.exponent = 0.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.dissipation = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.v_reg = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  ContactParams{}.validate();
}
