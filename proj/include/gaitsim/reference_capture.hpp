#pragma once

#include <stdexcept>

#include "gaitsim/mdp.hpp"
#include "gaitsim/metrics.hpp"
#include "gaitsim/policy.hpp"

namespace gaitsim {

struct CaptureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reference bundle extracted from a rollout: the phase-indexed motion
// (kinematics for the imitation reward), the matching resampled cycle
// carrying torques and GRFs for the gait-error metric, and the raw record.
struct CaptureResult {
  ReferenceMotion motion;
  GaitCycle cycle;
  GaitRecord record;
  int cycle_index = 0;  // which segmented cycle was converted
};

// Rolls the policy mean on the plant built from mu_star (perturbations off,
// phase 0 start) and converts the last complete gait cycle into a reference.
// The cut runs heel strike to heel strike, so phase 0 of the captured motion
// is a left heel strike; the seam is closed exactly by re-entering the first
// frame one stride ahead. Throws CaptureError when the policy falls or
// fewer than three complete cycles exist.
CaptureResult record_reference_from_rollout(
    const Agent& policy, const EnvConfig& env_config,
    const ReferenceMotion& tracking_motion, const ParamVector& mu_star,
    Rng& rng);

}  // namespace gaitsim
