#pragma once

#include <vector>

#include "gaitsim/contact.hpp"
#include "gaitsim/dynamics.hpp"
#include "gaitsim/params.hpp"
#include "gaitsim/subject.hpp"

namespace gaitsim {

// Segment order: trunk (base), then left and right legs top-down. Joint
// coordinate for a segment is joint_coord(seg); the actuated block of q is
// [hip_l, knee_l, ankle_l, hip_r, knee_r, ankle_r].
enum Segment : int {
  kTrunk = 0,
  kThighL = 1,
  kShinL = 2,
  kFootL = 3,
  kThighR = 4,
  kShinR = 5,
  kFootR = 6,
};
constexpr int kNumSegments = 7;
constexpr int kNumJoints = 6;
constexpr int kBaseDof = 3;
constexpr int kNq = kBaseDof + kNumJoints;

struct PdGains {
  VectorXd kp, kd;  // per actuated joint
};

PdGains default_gains();  // kp = 300, kd = 30 on all six joints

// Plant bundle the rest of the pipeline works with: dynamics model, foot
// contact points (heel/toe per foot, order heel_l toe_l heel_r toe_r), PD
// gains, and a few derived geometric quantities.
struct Biped {
  ArticulatedModel model;
  std::vector<ContactPoint> contact_points;
  PdGains gains;
  SubjectSpec subject;
  ParamVector params;
  double leg_length = 0.0;    // hip axis to sole, legs straight [m]
  double standing_base_z = 0.0;  // base height with straight legs, soles on ground
};

// Anthropometric construction: segment lengths and joint-axis locations come
// from `params`; masses are fixed fractions of subject mass (thigh 0.100,
// shank 0.0465, foot 0.0145 per side, trunk lump the remaining 0.678) with
// uniform-rod inertias. Throws on non-positive lengths or masses.
Biped build_biped(const SubjectSpec& subject, const ParamVector& params);

ArticulatedModel build_model(const SubjectSpec& subject, const ParamVector& params);

// Zero joint angles, base at standing height, at rest.
DynamicsState standing_state(const Biped& biped);

// Actuated-joint slice helpers.
inline VectorXd actuated(const VectorXd& q) { return q.tail(kNumJoints); }

}  // namespace gaitsim
