#include "gaitsim/params.hpp"

#include <stdexcept>

namespace gaitsim {

Eigen::VectorXd ParamVector::flatten() const {
  Eigen::VectorXd v(kDim);
  v << beta_hip, beta_knee, beta_ankle, sigma, foot_len, shank_len, thigh_len,
      hip_off.x(), hip_off.y(), knee_off_x, ankle_off_x, ankle_height;
  return v;
}

ParamVector ParamVector::unflatten(const Eigen::VectorXd& v) {
  if (v.size() != kDim) throw std::invalid_argument("ParamVector::unflatten: bad size");
  ParamVector p;
  p.beta_hip = v[0];
  p.beta_knee = v[1];
  p.beta_ankle = v[2];
  p.sigma = v[3];
  p.foot_len = v[4];
  p.shank_len = v[5];
  p.thigh_len = v[6];
  p.hip_off = {v[7], v[8]};
  p.knee_off_x = v[9];
  p.ankle_off_x = v[10];
  p.ankle_height = v[11];
  return p;
}

const std::vector<std::string>& ParamVector::names() {
  static const std::vector<std::string> n = {
      "beta_hip",  "beta_knee", "beta_ankle", "sigma",
      "foot_len",  "shank_len", "thigh_len",  "hip_off_x",
      "hip_off_z", "knee_off_x", "ankle_off_x", "ankle_height"};
  return n;
}

bool ParamBounds::contains(const ParamVector& p) const {
  const Eigen::VectorXd v = p.flatten();
  return (v.array() >= lo.array() - 1e-12).all() &&
         (v.array() <= hi.array() + 1e-12).all();
}

ParamVector ParamBounds::clamp(const ParamVector& p) const {
  Eigen::VectorXd v = p.flatten();
  v = v.cwiseMax(lo).cwiseMin(hi);
  return ParamVector::unflatten(v);
}

void ParamBounds::validate() const {
  if (lo.size() != ParamVector::kDim || hi.size() != ParamVector::kDim)
    throw std::invalid_argument("ParamBounds: bad dimension");
  if ((lo.array() > hi.array()).any())
    throw std::invalid_argument("ParamBounds: lo > hi");
}

ParamVector nominal_params(double height_m) {
  if (height_m <= 0.0) throw std::invalid_argument("nominal_params: height must be positive");
  ParamVector p;
  p.beta_hip = p.beta_knee = p.beta_ankle = 0.5;
  p.sigma = 0.9;
  p.foot_len = 0.152 * height_m;
  p.shank_len = 0.246 * height_m;
  p.thigh_len = 0.245 * height_m;
  p.hip_off = {0.0, 0.0};
  p.knee_off_x = 0.0;
  p.ankle_off_x = 0.0;
  p.ankle_height = 0.039 * height_m;
  return p;
}

ParamBounds default_param_bounds(const ParamVector& nominal) {
  const Eigen::VectorXd v = nominal.flatten();
  ParamBounds b;
  b.lo.resize(ParamVector::kDim);
  b.hi.resize(ParamVector::kDim);
  for (int i = 0; i < 3; ++i) {  // damping groups
    b.lo[i] = 0.05;
    b.hi[i] = 2.0;
  }
  b.lo[3] = 0.3;  // friction
  b.hi[3] = 1.5;
  for (int i = 4; i < 7; ++i) {  // segment lengths
    b.lo[i] = 0.8 * v[i];
    b.hi[i] = 1.2 * v[i];
  }
  for (int i = 7; i < 12; ++i) {  // axis locations
    b.lo[i] = v[i] - 0.03;
    b.hi[i] = v[i] + 0.03;
  }
  b.validate();
  return b;
}

ParamVector randomize_params(Rng& rng, const ParamBounds& bounds) {
  bounds.validate();
  Eigen::VectorXd v(ParamVector::kDim);
  for (int i = 0; i < ParamVector::kDim; ++i)
    v[i] = bounds.lo[i] == bounds.hi[i] ? bounds.lo[i]
                                        : rng.uniform(bounds.lo[i], bounds.hi[i]);
  return ParamVector::unflatten(v);
}

}  // namespace gaitsim
