#include "gaitsim/biped.hpp"

#include <cmath>
#include <stdexcept>

namespace gaitsim {

namespace {

// Mass fractions per side and rod-model inertia. Trunk takes the remainder
// (head-arms-trunk lump) so the model total equals the subject mass.
constexpr double kThighFrac = 0.100;
constexpr double kShankFrac = 0.0465;
constexpr double kFootFrac = 0.0145;
constexpr double kTrunkFrac = 1.0 - 2.0 * (kThighFrac + kShankFrac + kFootFrac);

// Proximal-to-COM fractions (thigh/shank measured from the proximal joint).
constexpr double kLegComFrac = 0.433;

double rod_inertia(double mass, double length) { return mass * length * length / 12.0; }

SegmentSpec make_segment(const std::string& name, double mass, double length,
                         const Vector2d& com_offset) {
  if (mass <= 0.0 || length <= 0.0)
    throw std::invalid_argument("build_biped: non-positive segment mass/length for " + name);
  SegmentSpec s;
  s.name = name;
  s.mass = mass;
  s.length = length;
  s.com_offset = com_offset;
  s.inertia = rod_inertia(mass, length);
  return s;
}

}  // namespace

PdGains default_gains() {
  PdGains g;
  g.kp = VectorXd::Constant(kNumJoints, 300.0);
  g.kd = VectorXd::Constant(kNumJoints, 30.0);
  return g;
}

Biped build_biped(const SubjectSpec& subject, const ParamVector& params) {
  subject.validate();
  const double h = subject.height_m();
  const double m = subject.mass;
  if (params.ankle_height <= 0.0)
    throw std::invalid_argument("build_biped: ankle height must be positive");

  Biped b;
  b.subject = subject;
  b.params = params;

  ArticulatedModel& model = b.model;
  model.segments.resize(kNumSegments);
  model.parent = {-1, kTrunk, kThighL, kShinL, kTrunk, kThighR, kShinR};
  model.joint_anchor.assign(kNumSegments, Vector2d::Zero());

  // Trunk: head-arms-trunk lump modeled as a rod, COM above the hips.
  const double trunk_len = 0.4 * h;
  model.segments[kTrunk] =
      make_segment("trunk", kTrunkFrac * m, trunk_len, {0.0, 0.185 * h});

  const struct {
    Segment thigh, shin, foot;
    const char* suffix;
  } sides[2] = {{kThighL, kShinL, kFootL, "_l"}, {kThighR, kShinR, kFootR, "_r"}};

  for (const auto& side : sides) {
    const std::string sfx = side.suffix;
    model.segments[side.thigh] =
        make_segment("thigh" + sfx, kThighFrac * m, params.thigh_len,
                     {0.0, -kLegComFrac * params.thigh_len});
    model.segments[side.shin] =
        make_segment("shin" + sfx, kShankFrac * m, params.shank_len,
                     {0.0, -kLegComFrac * params.shank_len});
    // Foot frame sits at the ankle axis; the sole is ankle_height below it
    // and the foot body extends ankle_off_x behind the axis nominal split
    // (25% heel, 75% toe). COM at mid-foot, halfway down to the sole.
    model.segments[side.foot] =
        make_segment("foot" + sfx, kFootFrac * m, params.foot_len,
                     {0.25 * params.foot_len - params.ankle_off_x,
                      -0.5 * params.ankle_height});

    model.joint_anchor[side.thigh] = params.hip_off;             // hip, base frame
    model.joint_anchor[side.shin] = {params.knee_off_x, -params.thigh_len};
    model.joint_anchor[side.foot] = {0.0, -params.shank_len};    // ankle
  }

  // Joint order: hip, knee, ankle per leg. Positive hip/ankle swing the limb
  // forward (flexion/dorsiflexion); knee flexion is negative.
  model.joint_damping.resize(kNumJoints);
  model.torque_limit.assign(kNumJoints, 150.0);
  model.joint_lo.resize(kNumJoints);
  model.joint_hi.resize(kNumJoints);
  for (int leg = 0; leg < 2; ++leg) {
    const int j = 3 * leg;
    model.joint_damping[j + 0] = params.beta_hip;
    model.joint_damping[j + 1] = params.beta_knee;
    model.joint_damping[j + 2] = params.beta_ankle;
    model.joint_lo[j + 0] = -1.6;
    model.joint_hi[j + 0] = 1.6;
    model.joint_lo[j + 1] = -2.6;
    model.joint_hi[j + 1] = 0.0;
    model.joint_lo[j + 2] = -0.9;
    model.joint_hi[j + 2] = 0.9;
  }
  model.validate();

  const double heel_x = -0.25 * params.foot_len - params.ankle_off_x;
  const double toe_x = 0.75 * params.foot_len - params.ankle_off_x;
  b.contact_points = {
      {kFootL, {heel_x, -params.ankle_height}},
      {kFootL, {toe_x, -params.ankle_height}},
      {kFootR, {heel_x, -params.ankle_height}},
      {kFootR, {toe_x, -params.ankle_height}},
  };

  b.gains = default_gains();
  b.leg_length = params.thigh_len + params.shank_len + params.ankle_height;
  b.standing_base_z = b.leg_length - params.hip_off.y();
  return b;
}

ArticulatedModel build_model(const SubjectSpec& subject, const ParamVector& params) {
  return build_biped(subject, params).model;
}

DynamicsState standing_state(const Biped& biped) {
  DynamicsState s;
  s.q = VectorXd::Zero(kNq);
  s.qdot = VectorXd::Zero(kNq);
  s.q[1] = biped.standing_base_z;
  return s;
}

}  // namespace gaitsim
