#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace gaitsim {

struct RewardTerms {
  double q_term = 0.0;    // pose tracking
  double com_term = 0.0;  // COM tracking
  double ee_term = 0.0;   // end-effector tracking
  double tau_penalty = 0.0;
  double total = 0.0;
};

// One control step of a rollout. GRF channels are per foot (left, right),
// averaged over the physics substeps of the control interval; cop_x is the
// load-weighted center of pressure (NaN while the foot is unloaded).
struct GaitStep {
  double time = 0.0;
  double phi = 0.0;  // wrapped phase in [0, 1)
  Eigen::VectorXd q, qdot;
  Eigen::VectorXd tau;  // actuated joints, mean applied torque [N m]
  double grf_tan[2] = {0.0, 0.0};
  double grf_vert[2] = {0.0, 0.0};
  double cop_x[2] = {0.0, 0.0};
  RewardTerms reward;
};

struct GaitRecord {
  std::vector<GaitStep> steps;
  double control_dt = 0.0;
  double body_mass = 0.0;
  double leg_length = 0.0;

  int size() const { return static_cast<int>(steps.size()); }
};

// CSV round-trip (one row per control step, documented header; body mass,
// control dt and leg length as metadata).
void save_record(const std::string& path, const GaitRecord& record);
GaitRecord load_record(const std::string& path);

}  // namespace gaitsim
