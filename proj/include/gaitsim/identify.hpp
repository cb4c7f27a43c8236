#pragma once

#include <functional>
#include <optional>

#include "gaitsim/cma.hpp"
#include "gaitsim/mdp.hpp"
#include "gaitsim/policy.hpp"

namespace gaitsim {

// Fitness of a model-parameter candidate under a trained policy: the plant
// is rebuilt from mu (which the policy also observes), the policy mean is
// rolled out from phase 0 with perturbations disabled, and the undiscounted
// reward sum is averaged over n_rollouts.
double evaluate_candidate(const ParamVector& mu, const Agent& policy,
                          const ReferenceMotion& motion,
                          const EnvConfig& env_config, Rng& rng,
                          int n_rollouts = 1);

struct IdentifyConfig {
  int lambda = 8;
  double sigma0 = 0.3;   // step size in box-scaled coordinates
  int max_evals = 1600;  // 200 generations at lambda 8
  int n_rollouts = 1;
  int workers = 1;  // threads for candidate evaluation within a generation

  void validate() const;
};

struct GenerationStats {
  int generation = 0;
  double best = 0.0;    // this generation's best return
  double median = 0.0;
  double mean = 0.0;
  double best_ever = 0.0;
  VectorXd best_mu;     // best-ever candidate so far
};

struct IdentifyResult {
  ParamVector mu;          // best-ever candidate
  double fitness = 0.0;    // its return
  int evaluations = 0;     // candidate evaluations spent
  bool converged = false;  // step size collapsed before the budget ran out
  std::vector<GenerationStats> history;
};

// Higher is better; non-finite values rank as worst. The rng is a stream
// derived from (generation, candidate index), so evaluations may run in any
// order or thread without changing the result.
using FitnessFn = std::function<double(const ParamVector& mu, Rng& rng)>;

// CMA-ES over mu in box-scaled [0,1] coordinates, started at `start`
// (clamped into the box; components with collapsed bounds stay pinned).
// Maximizes `fitness`; exceptions inside an evaluation rank as worst rather
// than aborting the run.
IdentifyResult identify_parameters(const FitnessFn& fitness,
                                   const ParamVector& start,
                                   const ParamBounds& bounds,
                                   const IdentifyConfig& config, Rng& rng);

// The production entry: fitness = evaluate_candidate under `policy`,
// started from `start` if given, else the subject's nominal parameters.
IdentifyResult identify_parameters(const Agent& policy,
                                   const ReferenceMotion& motion,
                                   const EnvConfig& env_config,
                                   const ParamBounds& bounds,
                                   const IdentifyConfig& config, Rng& rng,
                                   std::optional<ParamVector> start = std::nullopt);

void save_identify_history(const std::string& path,
                           const IdentifyResult& result);

}  // namespace gaitsim
