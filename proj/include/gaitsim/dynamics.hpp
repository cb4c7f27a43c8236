#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaitsim {

using Eigen::Matrix2d;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

// rotate 90 degrees counterclockwise: z x v for unit angular velocity
inline Vector2d rot90(const Vector2d& v) { return Vector2d(-v.y(), v.x()); }

inline Matrix2d rotation(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Matrix2d r;
  r << c, -s, s, c;
  return r;
}

struct SegmentSpec {
  std::string name;
  double mass = 1.0;       // kg
  double length = 1.0;     // m
  Vector2d com_offset{0.0, 0.0};  // m, in segment frame
  double inertia = 0.01;   // kg m^2 about the COM
};

// Planar articulated tree. Segment 0 is the base; when floating_base is set
// the first three coordinates are (x, z, pitch) of the base frame. Every
// further segment hangs off its parent through a revolute joint anchored at
// joint_anchor (parent frame) and contributes one coordinate.
struct ArticulatedModel {
  std::vector<SegmentSpec> segments;
  std::vector<int> parent;                  // parent[0] == -1
  std::vector<Vector2d> joint_anchor;       // per segment; unused for base
  std::vector<double> joint_damping;        // per joint, N m s / rad
  std::vector<double> torque_limit;         // per joint, N m
  std::vector<double> joint_lo, joint_hi;   // per joint, rad (+-inf = free)
  bool floating_base = true;
  Vector2d gravity{0.0, -9.81};
  double limit_stiffness = 2000.0;  // one-sided joint stop spring
  double limit_damping = 50.0;

  int num_segments() const { return static_cast<int>(segments.size()); }
  int num_joints() const { return num_segments() - 1; }
  int base_dof() const { return floating_base ? 3 : 0; }
  int nq() const { return base_dof() + num_joints(); }
  // coordinate index of the joint driving segment `seg` (seg >= 1)
  int joint_coord(int seg) const { return base_dof() + seg - 1; }

  int segment_index(const std::string& name) const;
  void validate() const;  // throws std::invalid_argument
};

struct DynamicsState {
  VectorXd q;
  VectorXd qdot;
  double time = 0.0;
};

struct ExternalForce {
  int body = 0;               // segment index
  Vector2d point{0.0, 0.0};   // m, segment frame
  Vector2d force{0.0, 0.0};   // N, world frame
  double t_start = 0.0;
  double t_end = std::numeric_limits<double>::infinity();

  bool active(double t) const { return t >= t_start && t < t_end; }
};

// World-frame pose and velocity of every segment plus the anchor points the
// Coriolis terms need. Computed once per dynamics evaluation.
struct Kinematics {
  std::vector<Vector2d> origin, origin_vel;  // segment frame origin
  std::vector<Vector2d> com, com_vel;
  std::vector<double> angle, omega;
};

Kinematics compute_kinematics(const ArticulatedModel& model, const VectorXd& q,
                              const VectorXd& qdot);

// 2 x nq Jacobian of a world point attached to `body` at `local` coordinates
MatrixXd point_jacobian(const ArticulatedModel& model, const Kinematics& kin,
                        int body, const Vector2d& local);

Vector2d world_point(const ArticulatedModel& model, const Kinematics& kin,
                     int body, const Vector2d& local);
Vector2d world_point_velocity(const ArticulatedModel& model,
                              const Kinematics& kin, int body,
                              const Vector2d& local);

MatrixXd mass_matrix(const ArticulatedModel& model, const VectorXd& q);

// accelerations solving M qdd = tau - C(q,qd) - g(q) - beta.qd + J^T f_ext
VectorXd forward_dynamics(const ArticulatedModel& model,
                          const DynamicsState& state,
                          const VectorXd& joint_torques,
                          const std::vector<ExternalForce>& externals);

struct StepResult {
  DynamicsState state;
  bool diverged = false;
};

struct StepLimits {
  double max_abs_q = 1.0e3;
  double max_abs_qdot = 1.0e3;
};

// semi-implicit Euler: vel first, then position with the new velocity
StepResult step(const ArticulatedModel& model, const DynamicsState& state,
                const VectorXd& joint_torques,
                const std::vector<ExternalForce>& externals, double dt,
                const StepLimits& limits = {});

// PD servo toward actuated-joint targets; base rows zero, clamped per joint
VectorXd pd_torques(const ArticulatedModel& model, const DynamicsState& state,
                    const VectorXd& q_target, const VectorXd& kp,
                    const VectorXd& kd);

struct ComState {
  Vector2d position;
  Vector2d velocity;
  double omega = 0.0;  // angular momentum about COM / scalar inertia about COM
};

ComState com_state(const ArticulatedModel& model, const DynamicsState& state);

double total_mass(const ArticulatedModel& model);
double kinetic_energy(const ArticulatedModel& model, const DynamicsState& state);
double potential_energy(const ArticulatedModel& model,
                        const DynamicsState& state);

}  // namespace gaitsim
