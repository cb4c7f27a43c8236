#include "gaitsim/reference_capture.hpp"

#include <cmath>

#include "gaitsim/biped.hpp"
#include "gaitsim/rollout.hpp"

namespace gaitsim {
namespace {

// Full 9-dof pose linearly interpolated at fractional step index u.
VectorXd pose_at(const GaitRecord& record, double u, int end) {
  const int lo = std::min(static_cast<int>(std::floor(u)), end - 1);
  const double frac = u - lo;
  return (1.0 - frac) * record.steps[lo].q + frac * record.steps[lo + 1].q;
}

}  // namespace

CaptureResult record_reference_from_rollout(
    const Agent& policy, const EnvConfig& env_config,
    const ReferenceMotion& tracking_motion, const ParamVector& mu_star,
    Rng& rng) {
  EnvConfig cfg = env_config;
  cfg.randomize = false;
  cfg.fixed_mu = mu_star;
  cfg.perturb.enabled = false;
  cfg.random_init_phase = false;

  Environment env(cfg, tracking_motion);
  const EpisodeResult res = rollout(policy, &env, rng, true);
  if (res.termination != "horizon") {
    throw CaptureError("reference capture: policy fell (" + res.termination +
                       " after " + std::to_string(res.record.size()) +
                       " steps)");
  }

  std::vector<GaitCycle> cycles;
  try {
    cycles = segment_cycles(res.record);
  } catch (const MetricsError& e) {
    throw CaptureError(std::string("reference capture: ") + e.what());
  }
  if (cycles.size() < 3) {
    throw CaptureError("reference capture: only " +
                       std::to_string(cycles.size()) +
                       " complete cycles, need at least 3");
  }

  CaptureResult result;
  result.record = res.record;
  result.cycle_index = static_cast<int>(cycles.size()) - 1;
  result.cycle = cycles[result.cycle_index];

  const Biped biped = build_biped(cfg.subject, mu_star);
  const int start = result.cycle.start;
  const int end = result.cycle.end;

  ReferenceMotion motion;
  motion.cycle_duration = result.cycle.duration;
  motion.phase.resize(kCyclePoints);
  motion.frames.resize(kCyclePoints);

  DynamicsState fk_state;
  fk_state.qdot = VectorXd::Zero(kNq);
  const double base_x0 = res.record.steps[start].q(0);

  for (int i = 0; i < kCyclePoints; ++i) {
    motion.phase[i] = i / double(kCyclePoints - 1);
    const double u = start + (end - start) * i / double(kCyclePoints - 1);
    fk_state.q = pose_at(res.record, u, end);

    ReferenceFrame& frame = motion.frames[i];
    frame.qhat.resize(kRefPoseDim);
    frame.qhat(0) = fk_state.q(1);
    frame.qhat(1) = fk_state.q(2);
    frame.qhat.tail(6) = fk_state.q.tail(6);

    const ComState com = com_state(biped.model, fk_state);
    frame.com = com.position - Eigen::Vector2d(base_x0, 0.0);

    const Kinematics kin =
        compute_kinematics(biped.model, fk_state.q, fk_state.qdot);
    for (int e = 0; e < kNumEndEffectors; ++e) {
      const ContactPoint& cp = biped.contact_points[e];
      frame.ee[e] = world_point(biped.model, kin, cp.body, cp.local) -
                    Eigen::Vector2d(base_x0, 0.0);
    }
  }

  const double stride =
      motion.frames.back().com.x() - motion.frames.front().com.x();
  motion.speed = stride / motion.cycle_duration;

  // Close the seam exactly: the final node is the first frame advanced by
  // one stride, so wrap interpolation and finite differences across phase 0
  // see a periodic signal. The (small) residual between the measured last
  // pose and the first is absorbed into the final segment.
  ReferenceFrame closing = motion.frames.front();
  const double exact_stride = motion.stride();
  closing.com.x() += exact_stride;
  for (auto& ee : closing.ee) ee.x() += exact_stride;
  motion.frames.back() = closing;

  motion.validate();
  result.motion = motion;
  return result;
}

}  // namespace gaitsim
