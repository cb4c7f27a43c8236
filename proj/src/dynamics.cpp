#include "gaitsim/dynamics.hpp"

#include <cmath>

namespace gaitsim {

int ArticulatedModel::segment_index(const std::string& name) const {
  for (int i = 0; i < num_segments(); ++i) {
    if (segments[i].name == name) return i;
  }
  throw std::invalid_argument("unknown segment '" + name + "'");
}

void ArticulatedModel::validate() const {
  if (segments.empty()) throw std::invalid_argument("model has no segments");
  if (parent.size() != segments.size() ||
      joint_anchor.size() != segments.size()) {
    throw std::invalid_argument("model arrays disagree on segment count");
  }
  if (parent[0] != -1) throw std::invalid_argument("segment 0 must be the root");
  for (int i = 1; i < num_segments(); ++i) {
    if (parent[i] < 0 || parent[i] >= i) {
      throw std::invalid_argument("parents must precede children");
    }
  }
  const std::size_t nj = static_cast<std::size_t>(num_joints());
  if (joint_damping.size() != nj || torque_limit.size() != nj ||
      joint_lo.size() != nj || joint_hi.size() != nj) {
    throw std::invalid_argument("model arrays disagree on joint count");
  }
  for (const auto& s : segments) {
    if (!(s.mass > 0.0)) throw std::invalid_argument(s.name + ": mass <= 0");
    if (!(s.length > 0.0)) throw std::invalid_argument(s.name + ": length <= 0");
    if (!(s.inertia > 0.0)) throw std::invalid_argument(s.name + ": inertia <= 0");
  }
  for (double b : joint_damping) {
    if (b < 0.0) throw std::invalid_argument("negative joint damping");
  }
}

Kinematics compute_kinematics(const ArticulatedModel& model, const VectorXd& q,
                              const VectorXd& qdot) {
  const int ns = model.num_segments();
  Kinematics kin;
  kin.origin.resize(ns);
  kin.origin_vel.resize(ns);
  kin.com.resize(ns);
  kin.com_vel.resize(ns);
  kin.angle.resize(ns);
  kin.omega.resize(ns);

  if (model.floating_base) {
    kin.origin[0] = Vector2d(q[0], q[1]);
    kin.origin_vel[0] = Vector2d(qdot[0], qdot[1]);
    kin.angle[0] = q[2];
    kin.omega[0] = qdot[2];
  } else {
    kin.origin[0] = Vector2d::Zero();
    kin.origin_vel[0] = Vector2d::Zero();
    kin.angle[0] = 0.0;
    kin.omega[0] = 0.0;
  }

  for (int i = 1; i < ns; ++i) {
    const int p = model.parent[i];
    const int jc = model.joint_coord(i);
    const Vector2d anchor =
        kin.origin[p] + rotation(kin.angle[p]) * model.joint_anchor[i];
    kin.origin[i] = anchor;
    kin.origin_vel[i] =
        kin.origin_vel[p] + kin.omega[p] * rot90(anchor - kin.origin[p]);
    kin.angle[i] = kin.angle[p] + q[jc];
    kin.omega[i] = kin.omega[p] + qdot[jc];
  }

  for (int i = 0; i < ns; ++i) {
    const Vector2d r = rotation(kin.angle[i]) * model.segments[i].com_offset;
    kin.com[i] = kin.origin[i] + r;
    kin.com_vel[i] = kin.origin_vel[i] + kin.omega[i] * rot90(r);
  }
  return kin;
}

Vector2d world_point(const ArticulatedModel& model, const Kinematics& kin,
                     int body, const Vector2d& local) {
  (void)model;
  return kin.origin[body] + rotation(kin.angle[body]) * local;
}

Vector2d world_point_velocity(const ArticulatedModel& model,
                              const Kinematics& kin, int body,
                              const Vector2d& local) {
  const Vector2d r = rotation(kin.angle[body]) * local;
  (void)model;
  return kin.origin_vel[body] + kin.omega[body] * rot90(r);
}

namespace {

// collect the chain of segments from `body` up to the root (exclusive of base)
inline void path_to_root(const ArticulatedModel& model, int body,
                         int* path, int& count) {
  count = 0;
  for (int s = body; s > 0; s = model.parent[s]) path[count++] = s;
}

}  // namespace

MatrixXd point_jacobian(const ArticulatedModel& model, const Kinematics& kin,
                        int body, const Vector2d& local) {
  const Vector2d x = world_point(model, kin, body, local);
  MatrixXd jac = MatrixXd::Zero(2, model.nq());
  if (model.floating_base) {
    jac(0, 0) = 1.0;
    jac(1, 1) = 1.0;
    jac.col(2) = rot90(x - kin.origin[0]);
  }
  int path[16];
  int count = 0;
  path_to_root(model, body, path, count);
  for (int k = 0; k < count; ++k) {
    const int s = path[k];
    jac.col(model.joint_coord(s)) = rot90(x - kin.origin[s]);
  }
  return jac;
}

MatrixXd mass_matrix(const ArticulatedModel& model, const VectorXd& q) {
  const VectorXd qd = VectorXd::Zero(model.nq());
  const Kinematics kin = compute_kinematics(model, q, qd);
  const int nq = model.nq();
  MatrixXd m = MatrixXd::Zero(nq, nq);
  int path[16];
  int count = 0;
  for (int i = 0; i < model.num_segments(); ++i) {
    const SegmentSpec& seg = model.segments[i];
    const MatrixXd jac = point_jacobian(model, kin, i, seg.com_offset);
    m.noalias() += seg.mass * jac.transpose() * jac;
    // angular selector: pitch plus every joint on the path
    path_to_root(model, i, path, count);
    if (model.floating_base) m(2, 2) += seg.inertia;
    for (int a = 0; a < count; ++a) {
      const int ca = model.joint_coord(path[a]);
      if (model.floating_base) {
        m(2, ca) += seg.inertia;
        m(ca, 2) += seg.inertia;
      }
      for (int b = 0; b < count; ++b) {
        m(ca, model.joint_coord(path[b])) += seg.inertia;
      }
    }
  }
  return m;
}

namespace {

// generalized force assembly shared by forward_dynamics
struct Assembled {
  MatrixXd m;
  VectorXd rhs;
};

Assembled assemble(const ArticulatedModel& model, const DynamicsState& state,
                   const VectorXd& joint_torques,
                   const std::vector<ExternalForce>& externals) {
  const int nq = model.nq();
  const Kinematics kin = compute_kinematics(model, state.q, state.qdot);
  MatrixXd m = MatrixXd::Zero(nq, nq);
  VectorXd rhs = joint_torques;

  int path[16];
  int count = 0;
  for (int i = 0; i < model.num_segments(); ++i) {
    const SegmentSpec& seg = model.segments[i];
    const MatrixXd jac = point_jacobian(model, kin, i, seg.com_offset);
    m.noalias() += seg.mass * jac.transpose() * jac;
    path_to_root(model, i, path, count);
    if (model.floating_base) m(2, 2) += seg.inertia;
    for (int a = 0; a < count; ++a) {
      const int ca = model.joint_coord(path[a]);
      if (model.floating_base) {
        m(2, ca) += seg.inertia;
        m(ca, 2) += seg.inertia;
      }
      for (int b = 0; b < count; ++b) {
        m(ca, model.joint_coord(path[b])) += seg.inertia;
      }
    }

    // gravity
    rhs.noalias() += seg.mass * (jac.transpose() * model.gravity);

    // Coriolis/centrifugal bias: Jdot*qdot for the COM point. Angle columns
    // of J are rot90(x - a_k); their time derivative is rot90(xdot - adot_k).
    Vector2d bias = Vector2d::Zero();
    if (model.floating_base) {
      bias += state.qdot[2] * rot90(kin.com_vel[i] - kin.origin_vel[0]);
    }
    for (int a = 0; a < count; ++a) {
      const int s = path[a];
      bias += state.qdot[model.joint_coord(s)] *
              rot90(kin.com_vel[i] - kin.origin_vel[s]);
    }
    rhs.noalias() -= seg.mass * (jac.transpose() * bias);
  }

  // joint damping and limit stops
  for (int j = 0; j < model.num_joints(); ++j) {
    const int c = model.base_dof() + j;
    rhs[c] -= model.joint_damping[j] * state.qdot[c];
    const double qj = state.q[c];
    if (qj > model.joint_hi[j]) {
      rhs[c] -= model.limit_stiffness * (qj - model.joint_hi[j]) +
                model.limit_damping * state.qdot[c];
    } else if (qj < model.joint_lo[j]) {
      rhs[c] -= model.limit_stiffness * (qj - model.joint_lo[j]) +
                model.limit_damping * state.qdot[c];
    }
  }

  // external point forces
  for (const ExternalForce& f : externals) {
    if (!f.active(state.time)) continue;
    const MatrixXd jac = point_jacobian(model, kin, f.body, f.point);
    rhs.noalias() += jac.transpose() * f.force;
  }

  return {std::move(m), std::move(rhs)};
}

}  // namespace

VectorXd forward_dynamics(const ArticulatedModel& model,
                          const DynamicsState& state,
                          const VectorXd& joint_torques,
                          const std::vector<ExternalForce>& externals) {
  Assembled sys = assemble(model, state, joint_torques, externals);
  Eigen::LDLT<MatrixXd> ldlt(sys.m);
  if (ldlt.info() != Eigen::Success) {
    throw std::runtime_error("singular mass matrix");
  }
  return ldlt.solve(sys.rhs);
}

StepResult step(const ArticulatedModel& model, const DynamicsState& state,
                const VectorXd& joint_torques,
                const std::vector<ExternalForce>& externals, double dt,
                const StepLimits& limits) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const VectorXd qdd = forward_dynamics(model, state, joint_torques, externals);
  DynamicsState next;
  next.qdot = state.qdot + dt * qdd;
  next.q = state.q + dt * next.qdot;
  next.time = state.time + dt;
  if (!next.q.allFinite() || !next.qdot.allFinite() ||
      next.q.cwiseAbs().maxCoeff() > limits.max_abs_q ||
      next.qdot.cwiseAbs().maxCoeff() > limits.max_abs_qdot) {
    return {state, true};
  }
  return {std::move(next), false};
}

VectorXd pd_torques(const ArticulatedModel& model, const DynamicsState& state,
                    const VectorXd& q_target, const VectorXd& kp,
                    const VectorXd& kd) {
  const int nj = model.num_joints();
  VectorXd tau = VectorXd::Zero(model.nq());
  for (int j = 0; j < nj; ++j) {
    const int c = model.base_dof() + j;
    double t = kp[j] * (q_target[j] - state.q[c]) - kd[j] * state.qdot[c];
    const double lim = model.torque_limit[j];
    if (t > lim) t = lim;
    if (t < -lim) t = -lim;
    tau[c] = t;
  }
  return tau;
}

ComState com_state(const ArticulatedModel& model, const DynamicsState& state) {
  const Kinematics kin = compute_kinematics(model, state.q, state.qdot);
  double mtot = 0.0;
  Vector2d pos = Vector2d::Zero(), vel = Vector2d::Zero();
  for (int i = 0; i < model.num_segments(); ++i) {
    const double m = model.segments[i].mass;
    mtot += m;
    pos += m * kin.com[i];
    vel += m * kin.com_vel[i];
  }
  pos /= mtot;
  vel /= mtot;
  double ang_mom = 0.0, inertia = 0.0;
  for (int i = 0; i < model.num_segments(); ++i) {
    const double m = model.segments[i].mass;
    const Vector2d r = kin.com[i] - pos;
    const Vector2d v = kin.com_vel[i] - vel;
    ang_mom += model.segments[i].inertia * kin.omega[i] +
               m * (r.x() * v.y() - r.y() * v.x());
    inertia += model.segments[i].inertia + m * r.squaredNorm();
  }
  return {pos, vel, inertia > 0.0 ? ang_mom / inertia : 0.0};
}

double total_mass(const ArticulatedModel& model) {
  double m = 0.0;
  for (const auto& s : model.segments) m += s.mass;
  return m;
}

double kinetic_energy(const ArticulatedModel& model,
                      const DynamicsState& state) {
  const MatrixXd m = mass_matrix(model, state.q);
  return 0.5 * state.qdot.dot(m * state.qdot);
}

double potential_energy(const ArticulatedModel& model,
                        const DynamicsState& state) {
  const Kinematics kin =
      compute_kinematics(model, state.q, VectorXd::Zero(model.nq()));
  double u = 0.0;
  for (int i = 0; i < model.num_segments(); ++i) {
    u -= model.segments[i].mass * model.gravity.dot(kin.com[i]);
  }
  return u;
}

}  // namespace gaitsim
