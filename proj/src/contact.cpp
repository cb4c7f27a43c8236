#include "gaitsim/contact.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gaitsim {

void ContactParams::validate() const {
  if (stiffness <= 0.0) throw std::invalid_argument("ContactParams: stiffness must be > 0");
  if (exponent < 1.0) throw std::invalid_argument("ContactParams: exponent must be >= 1");
  if (dissipation < 0.0) throw std::invalid_argument("ContactParams: dissipation must be >= 0");
  if (friction_coeff < 0.0) throw std::invalid_argument("ContactParams: friction must be >= 0");
  if (v_reg <= 0.0) throw std::invalid_argument("ContactParams: v_reg must be > 0");
}

std::vector<ContactForce> contact_forces(const ArticulatedModel& model,
                                         const DynamicsState& state,
                                         const std::vector<ContactPoint>& points,
                                         const ContactParams& params) {
  const Kinematics kin = compute_kinematics(model, state.q, state.qdot);
  std::vector<ContactForce> out(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    const ContactPoint& cp = points[i];
    if (cp.body < 0 || cp.body >= model.num_segments())
      throw std::invalid_argument("contact_forces: contact point body out of range");
    ContactForce& f = out[i];
    f.point_index = static_cast<int>(i);
    f.position = world_point(model, kin, cp.body, cp.local);
    const Eigen::Vector2d vel = world_point_velocity(model, kin, cp.body, cp.local);
    const double delta = std::max(0.0, -f.position.y());
    f.penetration = delta;
    if (delta <= 0.0) continue;
    const double delta_dot = -vel.y();
    const double fn = std::max(
        0.0, params.stiffness * std::pow(delta, params.exponent) *
                 (1.0 + 1.5 * params.dissipation * delta_dot));
    const double ft =
        -params.friction_coeff * fn * std::tanh(vel.x() / params.v_reg);
    f.force = {ft, fn};
  }
  return out;
}

GrfTotal grf_total(const std::vector<ContactForce>& forces) {
  GrfTotal g;
  double moment = 0.0;
  for (const ContactForce& f : forces) {
    g.tangential += f.force.x();
    g.vertical += f.force.y();
    moment += f.force.y() * f.position.x();
  }
  g.cop_x = g.vertical > 0.0 ? moment / g.vertical
                             : std::numeric_limits<double>::quiet_NaN();
  return g;
}

std::vector<ExternalForce> contact_externals(const std::vector<ContactPoint>& points,
                                             const std::vector<ContactForce>& forces) {
  std::vector<ExternalForce> out;
  out.reserve(forces.size());
  for (const ContactForce& f : forces) {
    if (f.force.isZero()) continue;
    ExternalForce e;
    e.body = points[f.point_index].body;
    e.point = points[f.point_index].local;
    e.force = f.force;
    e.t_start = -std::numeric_limits<double>::infinity();
    e.t_end = std::numeric_limits<double>::infinity();
    out.push_back(e);
  }
  return out;
}

}  // namespace gaitsim
