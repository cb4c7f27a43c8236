#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gaitsim/dynamics.hpp"

namespace gaitsim {

// Flat ground at z = 0. Normal force follows Hunt-Crossley,
//   f_n = max(0, k δ^p (1 + 3/2 α δ̇)),  δ = max(0, -z),
// and tangential force is Coulomb friction regularized with tanh,
//   f_t = -σ f_n tanh(v_t / v_reg).
struct ContactParams {
  double stiffness = 1e5;  // N/m^p
  double exponent = 1.5;
  double dissipation = 0.9;  // s/m
  double friction_coeff = 0.9;
  double v_reg = 0.01;  // m/s

  void validate() const;
};

struct ContactPoint {
  int body = 0;                        // segment index
  Eigen::Vector2d local{0.0, 0.0};     // offset in segment frame
};

struct ContactForce {
  int point_index = -1;
  Eigen::Vector2d position{0.0, 0.0};  // world contact point
  Eigen::Vector2d force{0.0, 0.0};     // world force on the body
  double penetration = 0.0;            // δ
};

// One force entry per contact point (zero force when airborne).
std::vector<ContactForce> contact_forces(const ArticulatedModel& model,
                                         const DynamicsState& state,
                                         const std::vector<ContactPoint>& points,
                                         const ContactParams& params);

struct GrfTotal {
  double tangential = 0.0;  // N, +x
  double vertical = 0.0;    // N, +z
  double cop_x = 0.0;       // force-weighted contact x; NaN when unloaded
};

GrfTotal grf_total(const std::vector<ContactForce>& forces);

// Contact list converted to the external-force representation the
// integrator consumes (always-active window).
std::vector<ExternalForce> contact_externals(const std::vector<ContactPoint>& points,
                                             const std::vector<ContactForce>& forces);

}  // namespace gaitsim
