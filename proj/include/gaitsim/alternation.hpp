#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gaitsim/identify.hpp"
#include "gaitsim/metrics.hpp"
#include "gaitsim/ppo.hpp"

namespace gaitsim {

// Reference bundle the loop tracks and measures against: the phase-indexed
// kinematics for the imitation reward plus the resampled cycle with torques
// and GRFs for the gait error.
struct ReferenceData {
  ReferenceMotion motion;
  GaitCycle cycle;
};

struct LoopConfig {
  PpoConfig ppo;
  std::int64_t train_iterations = 30;  // PPO iterations per alternation round
  IdentifyConfig identify;
  RewardWeights weights;
  ContactParams contact;
  double kappa = 15.0;  // gait-error threshold
  int max_iters = 3;
  // Identification start for the first round; nominal parameters when
  // absent. Later rounds start from the previous round's identified mu.
  std::optional<ParamVector> initial_mu;
  int retry_cap = 2;       // extra re-seeded training attempts per round
  std::string out_dir;     // report + checkpoints; empty = keep in memory
  bool verbose = false;

  void validate() const;
};

struct LoopIteration {
  int iteration = 0;
  bool failed = false;          // no segmentable evaluation gait
  std::string diagnostics;      // failure reason, empty otherwise
  GaitError error;              // epsilon breakdown (total = +inf on failure)
  ChannelRmse rmse;
  ParamVector mu;               // identified parameters
  double identify_fitness = 0.0;
  double train_return = 0.0;    // best mean episode return while training
  int checkpoint_id = 0;        // policy_iter<id>.ckpt under out_dir
  double best_epsilon = std::numeric_limits<double>::infinity();
};

struct LoopReport {
  std::vector<LoopIteration> iterations;
  bool converged = false;
  double final_epsilon = std::numeric_limits<double>::infinity();
  ParamVector final_mu;
  Agent final_agent;
};

// Deterministic evaluation rollout: plant fixed at mu, perturbations off,
// phase starting at 0, policy mean actions.
EpisodeResult evaluation_rollout(const Agent& policy,
                                 const EnvConfig& env_config,
                                 const ReferenceMotion& motion,
                                 const ParamVector& mu);

// The alternation driver: repeat {refine policy on the randomized model
// family (warm-started); identify mu under the refined policy; rebuild the
// plant and measure the gait error of a deterministic rollout} until the
// error drops to kappa or the iteration cap. The report file under out_dir
// is rewritten after every iteration so partial runs stay inspectable.
//
// Passing prior (a report reloaded from an interrupted run) resumes after
// its last iteration; all per-iteration random streams derive from the
// iteration index, so a resumed run replays exactly like an uninterrupted
// one given the same rng.
LoopReport run_alternation(const SubjectSpec& subject,
                           const ReferenceData& reference,
                           const LoopConfig& config, Rng& rng,
                           const Agent* warm_start = nullptr,
                           const LoopReport* prior = nullptr);

void save_loop_report(const std::string& path, const LoopReport& report);
LoopReport load_loop_report(const std::string& path);

}  // namespace gaitsim
