#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "gaitsim/biped.hpp"
#include "gaitsim/contact.hpp"
#include "gaitsim/gait_record.hpp"
#include "gaitsim/params.hpp"
#include "gaitsim/reference.hpp"
#include "gaitsim/rng.hpp"
#include "gaitsim/subject.hpp"

namespace gaitsim {

struct RewardWeights {
  double w_q = 5.0;
  double w_c = 2.0;
  double w_e = 0.5;
  double w_tau = 0.005;
};

struct PerturbationConfig {
  bool enabled = true;
  double magnitude_lo = 0.0;    // N
  double magnitude_hi = 800.0;  // N
  double duration = 0.050;      // s
};

struct EnvConfig {
  SubjectSpec subject;
  RewardWeights weights;
  PerturbationConfig perturb;
  ContactParams contact;  // friction_coeff is overridden from the episode mu

  // Domain randomization: when randomize is set each reset draws mu from
  // dr_bounds; otherwise fixed_mu (or the subject nominal) is used.
  bool randomize = true;
  ParamBounds dr_bounds;
  std::optional<ParamVector> fixed_mu;

  double physics_dt = 1e-3;  // s
  int substeps = 33;         // control period = substeps * physics_dt (~30 Hz)
  int horizon = 300;         // control steps (10 s)
  double gamma = 0.99;
  double action_limit = 0.5;       // rad, PD-target offset clamp
  double pelvis_term_frac = 0.6;   // terminate below this fraction of standing
  double pitch_term = 0.8;         // rad
  bool random_init_phase = true;   // reference-state init at uniform phi

  double control_dt() const { return physics_dt * substeps; }
  void validate() const;
};

constexpr int kObsDim = 2 * kNq - 1 + 3 + 1 + ParamVector::kDim;  // 33

// Observation assembly: [q minus base x (8), qdot (9), v_com (2), w_com (1),
// phi (1), mu (12)]. Raw, unnormalized.
VectorXd observe(const ArticulatedModel& model, const DynamicsState& state,
                 double phi, const ParamVector& mu);

// Eq-style PD target: reference joint pose at phi plus the clamped action.
VectorXd action_to_target(const VectorXd& action, double phi,
                          const ReferenceMotion& motion, double action_limit);

std::optional<std::string> check_termination(const DynamicsState& state,
                                             double standing_base_z,
                                             double pelvis_term_frac,
                                             double pitch_term);

ExternalForce sample_perturbation(Rng& rng, const PerturbationConfig& config,
                                  double onset_time);

struct StepOutcome {
  VectorXd observation;
  RewardTerms reward;
  bool done = false;
  std::string termination;  // empty while running; "horizon" at the cap
};

// The imitation environment. One instance owns its plant (rebuilt per reset
// from the episode's mu), the reference, and the episode log.
class Environment {
 public:
  Environment(const EnvConfig& config, ReferenceMotion motion);

  // Draws mu / initial phase / perturbation from rng, rebuilds the plant,
  // and returns the initial observation.
  VectorXd reset(Rng& rng);

  // Applies one control step of `substeps` physics steps. The action is the
  // PD target offset (clamped to +-action_limit).
  StepOutcome step(const VectorXd& action);

  const EnvConfig& config() const { return config_; }
  const ReferenceMotion& motion() const { return motion_; }
  const Biped& biped() const { return biped_; }
  const ParamVector& mu() const { return mu_; }
  const DynamicsState& state() const { return state_; }
  const GaitRecord& record() const { return record_; }
  double phase() const { return unwrapped_phase_ - std::floor(unwrapped_phase_); }
  int steps_taken() const { return steps_taken_; }

  // Reference targets at unwrapped phase, in world coordinates of this
  // episode (x origin aligned at reset).
  ReferenceFrame target_at(double unwrapped_phase) const;

 private:
  EnvConfig config_;
  ReferenceMotion motion_;
  Biped biped_;
  ContactParams contact_;
  ParamVector mu_;
  DynamicsState state_;
  double unwrapped_phase_ = 0.0;
  double start_phase_ = 0.0;
  double ref_x_offset_ = 0.0;
  std::optional<ExternalForce> perturbation_;
  GaitRecord record_;
  int steps_taken_ = 0;
  bool done_ = true;

  RewardTerms compute_reward(const VectorXd& mean_tau) const;
};

struct EpisodeResult {
  GaitRecord record;
  std::string termination;
  double ret = 0.0;  // discounted return
};

}  // namespace gaitsim
