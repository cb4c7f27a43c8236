#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "gaitsim/subject.hpp"

namespace gaitsim {

// One phase sample of the reference gait. qhat packs [base_z, base_pitch,
// hip_l, knee_l, ankle_l, hip_r, knee_r, ankle_r]; base x is not stored
// (translation invariance) — COM/end-effector x are expressed in cycle
// coordinates, i.e. relative to the base x position at phase 0.
struct ReferenceFrame {
  Eigen::VectorXd qhat;                     // 8
  Eigen::Vector2d com{0.0, 0.0};
  std::array<Eigen::Vector2d, 4> ee{};      // heel_l, toe_l, heel_r, toe_r
};

constexpr int kRefPoseDim = 8;
constexpr int kNumEndEffectors = 4;

// Phase-indexed cyclic gait: frames at ascending phase nodes in [0, 1],
// linearly interpolated and periodically extended by sample(). The
// biomechanics "% gait cycle" files carry 101 rows with both endpoints.
struct ReferenceMotion {
  std::vector<double> phase;
  std::vector<ReferenceFrame> frames;
  double cycle_duration = 1.0;  // s
  double speed = 0.0;           // m/s

  double stride() const { return speed * cycle_duration; }
  void validate() const;  // throws std::invalid_argument

  // Linear interpolation at phase phi (wrapped modulo 1). On the wrap
  // segment past the last node the first frame re-enters advanced by one
  // stride in x.
  ReferenceFrame sample(double phi) const;
};

struct ReferenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// CSV schema "gaitsim-reference v1": meta lines cycle_duration and speed;
// columns phase, base_z, base_pitch, hip_l, knee_l, ankle_l, hip_r, knee_r,
// ankle_r, com_x, com_z, heel_l_x, heel_l_z, toe_l_x, toe_l_z, heel_r_x,
// heel_r_z, toe_r_x, toe_r_z. Malformed cells are rejected with row/column
// context.
ReferenceMotion load_reference(const std::string& path);
void save_reference(const std::string& path, const ReferenceMotion& motion);

// Subject roster CSV: columns id, sex, mass_kg, height_cm, age, speed_mps.
std::vector<SubjectSpec> load_subjects(const std::string& path);
const SubjectSpec& find_subject(const std::vector<SubjectSpec>& roster, int id);

// Synthetic gait generation (see gait_synth.cpp). Joint trajectories are
// truncated Fourier series (3 harmonics) shaped after normative walking
// curves; hip amplitude is solved from the stride, pelvis height from the
// ground-contact condition, COM and end-effectors by forward kinematics on
// the subject's nominal model.
struct GaitParams {
  double stride = 0.0;          // m per full cycle; 0 = derive from subject
  double cycle_duration = 0.0;  // s; 0 = derive from subject
  double amp_scale = 1.0;       // knee/ankle amplitude multiplier

  void validate() const;
};

GaitParams default_gait_params(const SubjectSpec& subject);
ReferenceMotion synthesize_gait(const SubjectSpec& subject, const GaitParams& params);

}  // namespace gaitsim
