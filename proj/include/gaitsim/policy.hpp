#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gaitsim/rng.hpp"

namespace gaitsim {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Fixed-topology MLP: affine layers with tanh on the hidden ones. Batched
// forward/backward operate on column-per-sample matrices; backward is the
// hand-written reverse sweep for exactly this chain.
struct MlpGrads {
  std::vector<MatrixXd> W;
  std::vector<VectorXd> b;

  void zero();
  double squared_norm() const;
};

struct MlpCache {
  std::vector<MatrixXd> acts;  // acts[0] = input, acts[i] = layer-i output
};

struct MlpNet {
  std::vector<MatrixXd> W;
  std::vector<VectorXd> b;

  int num_layers() const { return static_cast<int>(W.size()); }
  int in_dim() const { return static_cast<int>(W.front().cols()); }
  int out_dim() const { return static_cast<int>(W.back().rows()); }

  // Orthogonal initialization, hidden gain 1.0, output-layer gain as given.
  static MlpNet make(const std::vector<int>& sizes, Rng& rng, double out_gain);

  VectorXd forward(const VectorXd& x) const;
  MatrixXd forward_batch(const MatrixXd& X, MlpCache* cache = nullptr) const;
  // Accumulates parameter gradients for dL/d(output) = dY.
  void backward(const MlpCache& cache, const MatrixXd& dY, MlpGrads* grads) const;

  MlpGrads zero_grads() const;
};

// Welford running mean/variance used for observation normalization; the
// statistics update during collection and stay frozen everywhere else.
struct RunningStat {
  VectorXd mean, m2;
  double count = 0.0;

  explicit RunningStat(int dim = 0)
      : mean(VectorXd::Zero(dim)), m2(VectorXd::Zero(dim)) {}

  void observe(const VectorXd& x);
  VectorXd variance() const;
  VectorXd normalize(const VectorXd& x) const;      // clipped to +-10
  MatrixXd normalize_batch(const MatrixXd& X) const;
};

constexpr double kLogStdFloor = -4.0;
constexpr double kLogStdCeil = 1.0;

// Gaussian policy (state-independent log-std), value net, and the shared
// observation normalizer.
struct Agent {
  MlpNet pi;
  VectorXd log_std;
  MlpNet value;
  RunningStat norm;

  int obs_dim() const { return pi.in_dim(); }
  int act_dim() const { return pi.out_dim(); }

  VectorXd mean_action(const VectorXd& obs) const;
  VectorXd sample_action(const VectorXd& obs, Rng& rng, double* logp) const;
  double log_prob(const VectorXd& obs, const VectorXd& action) const;
  double state_value(const VectorXd& obs) const;
  void clamp_log_std();
};

// 2 x 128 hidden layers; policy output layer scaled down (gain 0.01),
// log-std initialized at -1.
Agent make_agent(int obs_dim, int act_dim, Rng& rng, int hidden = 128);

struct PpoConfig {
  double clip = 0.2;
  double gamma = 0.99;
  double lam = 0.95;
  double learning_rate = 3e-4;
  int epochs = 4;
  int minibatch = 256;
  int batch_steps = 16384;
  double entropy_coef = 0.0;
  double value_coef = 1.0;
  double max_grad_norm = 0.5;

  void validate() const;
};

// Flattened on-policy batch. Episodes are contiguous spans; final_value
// carries V(s_T) for horizon-truncated episodes and 0 for true terminals.
struct TrajectoryBatch {
  MatrixXd obs;      // obs_dim x N (normalized as collected)
  MatrixXd actions;  // act_dim x N
  VectorXd logp;
  VectorXd rewards;
  VectorXd values;
  std::vector<int> episode_start;   // ascending, episode_start[0] == 0
  std::vector<double> final_value;  // one per episode
  VectorXd advantages;
  VectorXd returns;

  int size() const { return static_cast<int>(rewards.size()); }
  int num_episodes() const { return static_cast<int>(episode_start.size()); }
  void check_aligned() const;
};

// Versioned binary checkpoint (bit-exact round trip).
struct Checkpoint {
  Agent agent;
  PpoConfig config;
  std::string rng_state;
  std::int64_t iteration = 0;
  double best_return = 0.0;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gaitsim
