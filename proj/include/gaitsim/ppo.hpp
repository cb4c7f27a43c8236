#pragma once

#include <string>
#include <vector>

#include "gaitsim/mdp.hpp"
#include "gaitsim/policy.hpp"

namespace gaitsim {

// Adam moments over the flat parameter vector (policy weights, log-std,
// value weights, in that order).
struct AdamState {
  VectorXd m, v;
  std::int64_t t = 0;

  static AdamState make(int dim) {
    return AdamState{VectorXd::Zero(dim), VectorXd::Zero(dim), 0};
  }
};

// Flat-vector views of the agent's trainable parameters. The layout is the
// contract between the optimizer, the gradient assembly, and the checkpoint
// tests, so both directions live next to each other here.
int param_count(const Agent& agent);
VectorXd flatten_params(const Agent& agent);
void unflatten_params(const VectorXd& theta, Agent* agent);

// Generalized advantage estimation over the contiguous episode spans in the
// batch. Bootstraps each episode with its final_value (zero for terminals),
// then sets returns = advantages + values.
void gae(TrajectoryBatch* batch, double gamma, double lam);

struct UpdateStats {
  double policy_loss = 0.0;   // clipped surrogate, minibatch average
  double value_loss = 0.0;    // MSE before the value_coef weighting
  double entropy = 0.0;
  double clip_fraction = 0.0; // samples with |ratio - 1| > clip
  double approx_kl = 0.0;     // mean(logp_old - logp_new)
  double grad_norm = 0.0;     // pre-clip global norm, minibatch average
  int minibatches = 0;
};

// Loss terms for one minibatch at the agent's current parameters, and,
// when grad is non-null, the gradient over the flat parameter vector.
// ppo_update consumes this per shuffled minibatch; it is exposed so
// gradient checks can probe the exact objective the optimizer sees.
struct MinibatchEval {
  double policy_loss = 0.0;  // clipped surrogate, negated to minimize
  double value_loss = 0.0;   // MSE against returns
  double entropy = 0.0;      // Gaussian policy entropy
  double total = 0.0;        // policy + value_coef*value - entropy_coef*entropy
  double clip_hits = 0.0;    // samples with |ratio - 1| > clip
  double kl_sum = 0.0;       // sum(logp_old - logp_new)
};

MinibatchEval ppo_minibatch(const Agent& agent, const MatrixXd& X,
                            const MatrixXd& A, const VectorXd& logp_old,
                            const VectorXd& adv, const VectorXd& ret,
                            const PpoConfig& config, VectorXd* grad);

// One PPO update: normalizes advantages over the whole batch, then runs
// `epochs` passes of shuffled minibatch SGD with the clipped surrogate,
// value MSE, and (optionally) an entropy bonus. Mutates the agent in place.
UpdateStats ppo_update(Agent* agent, const TrajectoryBatch& batch,
                       const PpoConfig& config, AdamState* adam, Rng& rng);

// Runs whole episodes until at least config.batch_steps samples are banked.
// The normalizer stays frozen during collection and absorbs the new raw
// observations afterwards in episode order; each episode draws its
// randomness from a stream derived per (iteration, episode index). Batch
// contents therefore do not depend on collection order.
TrajectoryBatch collect_batch(Agent* agent, Environment* env,
                              const PpoConfig& config, const Rng& base,
                              std::int64_t iteration,
                              std::vector<double>* episode_returns,
                              std::vector<int>* episode_lengths);

struct IterationRecord {
  std::int64_t iteration = 0;
  int episodes = 0;
  int steps = 0;
  double mean_return = 0.0;  // undiscounted per-episode reward sum
  double mean_length = 0.0;  // control steps
  UpdateStats stats;
  double log_std_mean = 0.0;
};

struct TrainOptions {
  std::int64_t iterations = 50;
  std::string checkpoint_path;  // best-mean-return checkpoint; empty = skip
  std::string curve_path;       // per-iteration CSV; empty = skip
  bool verbose = false;         // one progress line per iteration to stderr
};

struct TrainResult {
  Agent agent;       // final (last-iteration) agent
  Agent best_agent;  // agent at the best mean return
  double best_return = 0.0;
  std::vector<IterationRecord> curve;
};

// Full training run: repeat collect -> GAE -> update, tracking the best
// iteration by mean episode return. Pass warm_start to continue from an
// existing agent instead of a fresh initialization.
TrainResult train_policy(const EnvConfig& env_config,
                         const ReferenceMotion& motion,
                         const PpoConfig& config, std::uint64_t seed,
                         const TrainOptions& options,
                         const Agent* warm_start = nullptr);

void save_training_curve(const std::string& path,
                         const std::vector<IterationRecord>& curve);

}  // namespace gaitsim
