#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gaitsim/rng.hpp"

namespace gaitsim {

// Identified quantities: joint damping per joint group, ground friction,
// segment lengths, and joint-axis locations relative to the nominal
// skeleton. Axis coordinates that run along a bone are absorbed into the
// adjacent segment length, so the planar vector has 12 entries:
//   [beta_hip, beta_knee, beta_ankle, sigma, foot_len, shank_len, thigh_len,
//    hip_off_x, hip_off_z, knee_off_x, ankle_off_x, ankle_height]
struct ParamVector {
  double beta_hip = 0.5;   // N m s / rad
  double beta_knee = 0.5;
  double beta_ankle = 0.5;
  double sigma = 0.9;      // foot-ground friction coefficient
  double foot_len = 0.26;  // m
  double shank_len = 0.42;
  double thigh_len = 0.42;
  Eigen::Vector2d hip_off{0.0, 0.0};  // hip axis offset in base frame
  double knee_off_x = 0.0;   // knee axis fore/aft offset in thigh frame
  double ankle_off_x = 0.0;  // ankle axis fore/aft position within the foot
  double ankle_height = 0.067;  // ankle axis height above the sole

  static constexpr int kDim = 12;

  Eigen::VectorXd flatten() const;
  static ParamVector unflatten(const Eigen::VectorXd& v);
  static const std::vector<std::string>& names();
};

struct ParamBounds {
  Eigen::VectorXd lo, hi;  // kDim each

  bool contains(const ParamVector& p) const;
  Eigen::VectorXd width() const { return hi - lo; }
  ParamVector clamp(const ParamVector& p) const;
  void validate() const;  // lo <= hi elementwise (lo == hi pins a component)
};

// Anthropometric nominal parameters for a subject of the given height [m].
ParamVector nominal_params(double height_m);

// Default identification/randomization box around a nominal vector:
// damping in [0.05, 2], friction in [0.3, 1.5], +-20% on segment lengths,
// +-3 cm on axis locations.
ParamBounds default_param_bounds(const ParamVector& nominal);

// Each component uniform within its box bounds.
ParamVector randomize_params(Rng& rng, const ParamBounds& bounds);

}  // namespace gaitsim
