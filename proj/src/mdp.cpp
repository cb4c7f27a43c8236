#include "gaitsim/mdp.hpp"

#include <cmath>
#include <stdexcept>

namespace gaitsim {

void EnvConfig::validate() const {
  subject.validate();
  if (physics_dt <= 0.0) throw std::invalid_argument("EnvConfig: physics_dt must be > 0");
  if (substeps < 1) throw std::invalid_argument("EnvConfig: substeps must be >= 1");
  if (horizon < 1) throw std::invalid_argument("EnvConfig: horizon must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("EnvConfig: gamma must be in (0, 1]");
  if (action_limit <= 0.0) throw std::invalid_argument("EnvConfig: action_limit must be > 0");
  if (!(pelvis_term_frac > 0.0 && pelvis_term_frac < 1.0))
    throw std::invalid_argument("EnvConfig: pelvis_term_frac must be in (0, 1)");
  if (pitch_term <= 0.0) throw std::invalid_argument("EnvConfig: pitch_term must be > 0");
  if (weights.w_q < 0.0 || weights.w_c < 0.0 || weights.w_e < 0.0 || weights.w_tau < 0.0)
    throw std::invalid_argument("EnvConfig: reward weights must be non-negative");
  if (perturb.magnitude_lo < 0.0 || perturb.magnitude_hi < perturb.magnitude_lo)
    throw std::invalid_argument("EnvConfig: bad perturbation magnitude range");
  if (perturb.duration <= 0.0)
    throw std::invalid_argument("EnvConfig: perturbation duration must be > 0");
  if (randomize) dr_bounds.validate();
  contact.validate();
}

VectorXd observe(const ArticulatedModel& model, const DynamicsState& state,
                 double phi, const ParamVector& mu) {
  const ComState com = com_state(model, state);
  VectorXd obs(kObsDim);
  int k = 0;
  for (int i = 1; i < kNq; ++i) obs[k++] = state.q[i];  // base x excluded
  for (int i = 0; i < kNq; ++i) obs[k++] = state.qdot[i];
  obs[k++] = com.velocity.x();
  obs[k++] = com.velocity.y();
  obs[k++] = com.omega;
  obs[k++] = phi - std::floor(phi);
  obs.segment(k, ParamVector::kDim) = mu.flatten();
  k += ParamVector::kDim;
  if (k != kObsDim) throw std::logic_error("observe: dimension bookkeeping error");
  return obs;
}

VectorXd action_to_target(const VectorXd& action, double phi,
                          const ReferenceMotion& motion, double action_limit) {
  if (action.size() != kNumJoints)
    throw std::invalid_argument("action_to_target: action must have 6 entries");
  const ReferenceFrame f = motion.sample(phi);
  VectorXd target = f.qhat.tail(kNumJoints);
  for (int j = 0; j < kNumJoints; ++j)
    target[j] += std::clamp(action[j], -action_limit, action_limit);
  return target;
}

std::optional<std::string> check_termination(const DynamicsState& state,
                                             double standing_base_z,
                                             double pelvis_term_frac,
                                             double pitch_term) {
  if (!state.q.allFinite() || !state.qdot.allFinite()) return "divergence";
  if (state.q[1] < pelvis_term_frac * standing_base_z) return "pelvis_low";
  if (std::abs(state.q[2]) > pitch_term) return "base_rotation";
  return std::nullopt;
}

ExternalForce sample_perturbation(Rng& rng, const PerturbationConfig& config,
                                  double onset_time) {
  const double magnitude = rng.uniform(config.magnitude_lo, config.magnitude_hi);
  const double sign = rng.sign();
  ExternalForce f;
  f.body = kTrunk;
  f.point = Vector2d::Zero();  // pelvis origin
  f.force = {sign * magnitude, 0.0};
  f.t_start = onset_time;
  f.t_end = onset_time + config.duration;
  return f;
}

Environment::Environment(const EnvConfig& config, ReferenceMotion motion)
    : config_(config), motion_(std::move(motion)) {
  config_.validate();
  motion_.validate();
  if (!config_.randomize) {
    const ParamVector mu =
        config_.fixed_mu ? *config_.fixed_mu : nominal_params(config_.subject.height_m());
    biped_ = build_biped(config_.subject, mu);  // fail fast on bad mu
  }
}

ReferenceFrame Environment::target_at(double unwrapped_phase) const {
  ReferenceFrame f = motion_.sample(unwrapped_phase);
  const double shift = ref_x_offset_ + motion_.stride() * std::floor(unwrapped_phase);
  f.com.x() += shift;
  for (auto& e : f.ee) e.x() += shift;
  return f;
}

VectorXd Environment::reset(Rng& rng) {
  // Draw order matters for the determinism contract: mu, then phase, then
  // perturbation parameters last (so disabling the perturbation leaves the
  // rest of the episode's draws unchanged).
  mu_ = config_.randomize
            ? randomize_params(rng, config_.dr_bounds)
            : (config_.fixed_mu ? *config_.fixed_mu
                                : nominal_params(config_.subject.height_m()));
  biped_ = build_biped(config_.subject, mu_);
  contact_ = config_.contact;
  contact_.friction_coeff = mu_.sigma;

  start_phase_ = config_.random_init_phase ? rng.uniform() : 0.0;
  unwrapped_phase_ = start_phase_;

  perturbation_.reset();
  if (config_.perturb.enabled) {
    // Uniform over the gait cycle, at least a quarter cycle into the episode.
    const double onset_phase = 0.25 + rng.uniform();
    const double onset_time = onset_phase * motion_.cycle_duration;
    perturbation_ = sample_perturbation(rng, config_.perturb, onset_time);
  }

  // Reference-state initialization: pose from the reference frame, joint and
  // base velocities from its phase derivative.
  const ReferenceFrame f0 = motion_.sample(start_phase_);
  const double dphi = 1e-4;
  const ReferenceFrame fa = motion_.sample(start_phase_ - dphi + 1.0);
  const ReferenceFrame fb = motion_.sample(start_phase_ + dphi);
  Eigen::VectorXd qhat_dot = (fb.qhat - fa.qhat) / (2.0 * dphi * motion_.cycle_duration);
  // The backward sample wraps a full cycle, which is fine for the periodic
  // pose channels used here.

  state_.q = VectorXd::Zero(kNq);
  state_.qdot = VectorXd::Zero(kNq);
  state_.time = 0.0;
  state_.q[0] = 0.0;
  state_.q[1] = f0.qhat[0];
  state_.q[2] = f0.qhat[1];
  state_.q.tail(kNumJoints) = f0.qhat.tail(kNumJoints);
  state_.qdot[0] = motion_.stride() / motion_.cycle_duration;
  state_.qdot[1] = qhat_dot[0];
  state_.qdot[2] = qhat_dot[1];
  state_.qdot.tail(kNumJoints) = qhat_dot.tail(kNumJoints);

  // Align the reference x track with this episode's world frame.
  ref_x_offset_ = 0.0;
  const ReferenceFrame t0 = motion_.sample(start_phase_);
  const double com_x = com_state(biped_.model, state_).position.x();
  ref_x_offset_ = com_x - (t0.com.x() + motion_.stride() * std::floor(start_phase_));

  record_ = GaitRecord{};
  record_.control_dt = config_.control_dt();
  record_.body_mass = config_.subject.mass;
  record_.leg_length = biped_.leg_length;
  steps_taken_ = 0;
  done_ = false;
  return observe(biped_.model, state_, phase(), mu_);
}

RewardTerms Environment::compute_reward(const VectorXd& mean_tau) const {
  const RewardWeights& w = config_.weights;
  const ReferenceFrame target = target_at(unwrapped_phase_);

  Eigen::Matrix<double, kRefPoseDim, 1> q_err;
  q_err[0] = state_.q[1] - target.qhat[0];
  q_err[1] = state_.q[2] - target.qhat[1];
  for (int j = 0; j < kNumJoints; ++j)
    q_err[2 + j] = state_.q[kBaseDof + j] - target.qhat[2 + j];

  const ComState com = com_state(biped_.model, state_);
  const Vector2d c_err = com.position - target.com;

  const Kinematics kin = compute_kinematics(biped_.model, state_.q, state_.qdot);
  double ee_sq = 0.0;
  for (int e = 0; e < kNumEndEffectors; ++e) {
    const Vector2d p = world_point(biped_.model, kin, biped_.contact_points[e].body,
                                   biped_.contact_points[e].local);
    ee_sq += (p - target.ee[e]).squaredNorm();
  }

  // Torque penalty on mass-normalized torques [N m / kg], the biomechanics
  // scale that keeps the penalty comparable across subjects.
  const double tau_sq = (mean_tau / config_.subject.mass).squaredNorm();

  RewardTerms r;
  r.q_term = w.w_q * std::exp(-2.0 * q_err.squaredNorm());
  r.com_term = w.w_c * std::exp(-10.0 * c_err.squaredNorm());
  r.ee_term = w.w_e * std::exp(-40.0 * ee_sq);
  r.tau_penalty = w.w_tau * tau_sq;
  r.total = r.q_term + r.com_term + r.ee_term - r.tau_penalty;
  return r;
}

StepOutcome Environment::step(const VectorXd& action) {
  if (done_) throw std::logic_error("Environment::step called on finished episode");

  const VectorXd q_target =
      action_to_target(action, phase(), motion_, config_.action_limit);

  VectorXd tau_accum = VectorXd::Zero(kNumJoints);
  double grf_tan[2] = {0.0, 0.0}, grf_vert[2] = {0.0, 0.0};
  double cop_moment[2] = {0.0, 0.0};
  bool diverged = false;

  for (int s = 0; s < config_.substeps; ++s) {
    const VectorXd tau =
        pd_torques(biped_.model, state_, q_target, biped_.gains.kp, biped_.gains.kd);
    const std::vector<ContactForce> cf =
        contact_forces(biped_.model, state_, biped_.contact_points, contact_);
    std::vector<ExternalForce> ext = contact_externals(biped_.contact_points, cf);
    if (perturbation_ && perturbation_->active(state_.time))
      ext.push_back(*perturbation_);

    const StepResult sr = gaitsim::step(biped_.model, state_, tau, ext, config_.physics_dt);
    state_ = sr.state;
    if (sr.diverged) {
      diverged = true;
      break;
    }

    tau_accum += tau.tail(kNumJoints);
    // Contact points 0,1 belong to the left foot, 2,3 to the right.
    for (int foot = 0; foot < 2; ++foot) {
      for (int p = 2 * foot; p < 2 * foot + 2; ++p) {
        grf_tan[foot] += cf[p].force.x();
        grf_vert[foot] += cf[p].force.y();
        cop_moment[foot] += cf[p].force.y() * cf[p].position.x();
      }
    }
  }

  const double inv_n = 1.0 / config_.substeps;
  const VectorXd mean_tau = tau_accum * inv_n;
  unwrapped_phase_ += config_.control_dt() / motion_.cycle_duration;
  ++steps_taken_;

  const RewardTerms reward = diverged ? RewardTerms{} : compute_reward(mean_tau);

  GaitStep log;
  log.time = state_.time;
  log.phi = phase();
  log.q = state_.q;
  log.qdot = state_.qdot;
  log.tau = mean_tau;
  for (int foot = 0; foot < 2; ++foot) {
    log.grf_tan[foot] = grf_tan[foot] * inv_n;
    log.grf_vert[foot] = grf_vert[foot] * inv_n;
    log.cop_x[foot] = grf_vert[foot] > 0.0
                          ? cop_moment[foot] / grf_vert[foot]
                          : std::numeric_limits<double>::quiet_NaN();
  }
  log.reward = reward;
  record_.steps.push_back(std::move(log));

  StepOutcome out;
  out.reward = reward;
  if (diverged) {
    out.done = true;
    out.termination = "divergence";
  } else if (auto term = check_termination(state_, biped_.standing_base_z,
                                           config_.pelvis_term_frac,
                                           config_.pitch_term)) {
    out.done = true;
    out.termination = *term;
  } else if (steps_taken_ >= config_.horizon) {
    out.done = true;
    out.termination = "horizon";
  }
  done_ = out.done;
  out.observation = diverged ? VectorXd::Zero(kObsDim)
                             : observe(biped_.model, state_, phase(), mu_);
  return out;
}

}  // namespace gaitsim
