#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitsim/gait_record.hpp"

namespace gaitsim {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr int kCyclePoints = 101;  // 0..100% of the gait cycle

extern const std::array<const char*, 6> kJointNames;

// Heel-strike detection: vertical GRF rising through this fraction of body
// weight after at least kStrikeDebounce seconds below it.
constexpr double kStrikeThresholdFrac = 0.05;
constexpr double kStrikeDebounce = 0.050;  // s

struct MetricsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One gait cycle cut from a record at consecutive same-foot heel strikes,
// with every channel resampled onto the 101-point phase grid (endpoints
// preserved). Mass and leg length ride along for normalization.
struct GaitCycle {
  int start = 0, end = 0;  // inclusive step-index span in the source record
  double duration = 0.0;   // s
  double body_mass = 0.0;  // kg
  double leg_length = 0.0; // m
  MatrixXd q;        // 6 x 101 joint angles [rad]
  MatrixXd qdot;     // 6 x 101 [rad/s]
  MatrixXd tau;      // 6 x 101 applied torques [N m]
  MatrixXd grf;      // 4 x 101: tan_l, vert_l, tan_r, vert_r [N]
  VectorXd base_z, base_pitch;  // 101
};

// Indices with a heel strike of the given foot (0 = left, 1 = right).
std::vector<int> detect_heel_strikes(const GaitRecord& record, int foot);

// Cuts the record into cycles on the left foot's strikes (right foot as a
// fallback when the left never yields two). Throws MetricsError when fewer
// than two strikes exist on either foot.
std::vector<GaitCycle> segment_cycles(const GaitRecord& record);

// Channel-wise average of cycles from one record.
GaitCycle mean_cycle(const std::vector<GaitCycle>& cycles);

// Dimensionless gait error between two resampled cycles: per-point Euclidean
// norms of the joint-angle, torque, and GRF differences summed over the
// cycle, torques scaled by 0.1*m*g*L and forces by body weight.
struct GaitError {
  double q_term = 0.0;
  double tau_term = 0.0;
  double grf_term = 0.0;
  double total = 0.0;
};

GaitError compute_error(const GaitCycle& cycle, const GaitCycle& reference);

double rmse(const VectorXd& a, const VectorXd& b);

// Channel-wise RMSE between two resampled cycles: joint angles [rad],
// mass-normalized moments [N m / kg], and GRFs [N], each pooled over the
// 101-point grid.
struct ChannelRmse {
  double q = 0.0;
  double moments = 0.0;
  double grf = 0.0;
};

ChannelRmse cycle_rmse(const GaitCycle& cycle, const GaitCycle& reference);

// Mass-normalized torque curves [N m / kg], joint-major 6 x 101.
MatrixXd joint_moments(const GaitCycle& cycle);
MatrixXd joint_moments(const GaitRecord& record);  // mean over cycles

// Angle-torque trajectory of one joint over the mean cycle, closed by
// repeating the first point, with phase markers at 0/50/100%.
struct TorqueLoop {
  VectorXd angle, torque;  // kCyclePoints + 1 entries
  std::array<int, 3> markers{0, 50, 100};
};

TorqueLoop cycle_torque_loop(const GaitCycle& cycle, int joint);
TorqueLoop torque_loop(const GaitRecord& record, int joint);

// Signed area of the closed loop, oriented so it equals the net joint work
// over the cycle (the trapezoidal integral of tau dq).
double loop_area(const TorqueLoop& loop);

// Mean of left+right vertical GRF over the cycle; body weight for a steady
// gait.
double mean_vertical_grf(const GaitCycle& cycle);

// CSV round-trip for reference cycles (101 rows; duration, mass and leg
// length in the metadata).
void save_cycle(const std::string& path, const GaitCycle& cycle);
GaitCycle load_cycle(const std::string& path);

}  // namespace gaitsim
