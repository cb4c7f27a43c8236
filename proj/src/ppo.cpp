#include "gaitsim/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "gaitsim/csv.hpp"

namespace gaitsim {
namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
constexpr double kAdvEps = 1e-8;
constexpr double kLog2Pi = 1.8378770664093453;

// Independent sub-streams hanging off the run seed. The base generator is
// never advanced, so stream layout alone fixes every random draw.
constexpr std::uint64_t kInitStream = 0x496e6974ULL;     // fresh-agent init
constexpr std::uint64_t kEpisodeStream = 0x45706973ULL;  // per-episode env+policy
constexpr std::uint64_t kUpdateStream = 0x55706474ULL;   // minibatch shuffles

int net_param_count(const MlpNet& net) {
  int n = 0;
  for (int i = 0; i < net.num_layers(); ++i) {
    n += static_cast<int>(net.W[i].size() + net.b[i].size());
  }
  return n;
}

void write_net(const MlpNet& net, VectorXd* out, int* pos) {
  for (int i = 0; i < net.num_layers(); ++i) {
    const auto& W = net.W[i];
    out->segment(*pos, W.size()) =
        Eigen::Map<const VectorXd>(W.data(), W.size());
    *pos += static_cast<int>(W.size());
    out->segment(*pos, net.b[i].size()) = net.b[i];
    *pos += static_cast<int>(net.b[i].size());
  }
}

void read_net(const VectorXd& theta, MlpNet* net, int* pos) {
  for (int i = 0; i < net->num_layers(); ++i) {
    auto& W = net->W[i];
    Eigen::Map<VectorXd>(W.data(), W.size()) =
        theta.segment(*pos, W.size());
    *pos += static_cast<int>(W.size());
    net->b[i] = theta.segment(*pos, net->b[i].size());
    *pos += static_cast<int>(net->b[i].size());
  }
}

void write_grads(const MlpGrads& g, VectorXd* out, int* pos) {
  for (std::size_t i = 0; i < g.W.size(); ++i) {
    out->segment(*pos, g.W[i].size()) =
        Eigen::Map<const VectorXd>(g.W[i].data(), g.W[i].size());
    *pos += static_cast<int>(g.W[i].size());
    out->segment(*pos, g.b[i].size()) = g.b[i];
    *pos += static_cast<int>(g.b[i].size());
  }
}

}  // namespace

int param_count(const Agent& agent) {
  return net_param_count(agent.pi) + static_cast<int>(agent.log_std.size()) +
         net_param_count(agent.value);
}

VectorXd flatten_params(const Agent& agent) {
  VectorXd theta(param_count(agent));
  int pos = 0;
  write_net(agent.pi, &theta, &pos);
  theta.segment(pos, agent.log_std.size()) = agent.log_std;
  pos += static_cast<int>(agent.log_std.size());
  write_net(agent.value, &theta, &pos);
  return theta;
}

void unflatten_params(const VectorXd& theta, Agent* agent) {
  if (theta.size() != param_count(*agent)) {
    throw std::invalid_argument("unflatten_params: size mismatch");
  }
  int pos = 0;
  read_net(theta, &agent->pi, &pos);
  agent->log_std = theta.segment(pos, agent->log_std.size());
  pos += static_cast<int>(agent->log_std.size());
  read_net(theta, &agent->value, &pos);
}

void gae(TrajectoryBatch* batch, double gamma, double lam) {
  batch->check_aligned();
  const int n = batch->size();
  batch->advantages.resize(n);
  batch->returns.resize(n);
  for (int ep = 0; ep < batch->num_episodes(); ++ep) {
    const int begin = batch->episode_start[ep];
    const int end = ep + 1 < batch->num_episodes()
                        ? batch->episode_start[ep + 1]
                        : n;
    double running = 0.0;
    for (int t = end - 1; t >= begin; --t) {
      const double next_value =
          t == end - 1 ? batch->final_value[ep] : batch->values(t + 1);
      const double delta =
          batch->rewards(t) + gamma * next_value - batch->values(t);
      running = delta + gamma * lam * running;
      batch->advantages(t) = running;
    }
  }
  batch->returns = batch->advantages + batch->values;
}

MinibatchEval ppo_minibatch(const Agent& agent, const MatrixXd& X,
                            const MatrixXd& A, const VectorXd& logp_old,
                            const VectorXd& adv, const VectorXd& ret,
                            const PpoConfig& config, VectorXd* grad) {
  const int b = static_cast<int>(X.cols());
  const int act_dim = agent.act_dim();
  if (A.cols() != b || logp_old.size() != b || adv.size() != b ||
      ret.size() != b) {
    throw std::invalid_argument("ppo_minibatch: misaligned minibatch");
  }

  const Eigen::ArrayXd sigma = agent.log_std.array().exp();
  const double log_sigma_sum = agent.log_std.sum();

  MlpCache pi_cache, v_cache;
  const MatrixXd mean = agent.pi.forward_batch(X, grad ? &pi_cache : nullptr);
  const MatrixXd Z = ((A - mean).array().colwise() / sigma).matrix();

  VectorXd logp_new(b);
  for (int i = 0; i < b; ++i) {
    logp_new(i) = -0.5 * Z.col(i).squaredNorm() - log_sigma_sum -
                  0.5 * act_dim * kLog2Pi;
  }

  const VectorXd ratio = (logp_new - logp_old).array().exp().matrix();
  const VectorXd clipped =
      ratio.cwiseMax(1.0 - config.clip).cwiseMin(1.0 + config.clip);

  MinibatchEval ev;
  VectorXd dlogp = VectorXd::Zero(b);  // dL/dlogp_new per sample
  for (int i = 0; i < b; ++i) {
    const double s1 = ratio(i) * adv(i);
    const double s2 = clipped(i) * adv(i);
    ev.policy_loss -= std::min(s1, s2);
    // grad flows through the ratio branch whenever it attains the min
    if (s1 <= s2) dlogp(i) = -adv(i) * ratio(i) / b;
    if (std::abs(ratio(i) - 1.0) > config.clip) ev.clip_hits += 1.0;
  }
  ev.policy_loss /= b;

  ev.entropy = log_sigma_sum + 0.5 * act_dim * (1.0 + kLog2Pi);

  const MatrixXd V = agent.value.forward_batch(X, grad ? &v_cache : nullptr);
  const VectorXd verr = V.row(0).transpose() - ret;
  ev.value_loss = verr.squaredNorm() / b;

  ev.total = ev.policy_loss + config.value_coef * ev.value_loss -
             config.entropy_coef * ev.entropy;
  if (!std::isfinite(ev.total)) {
    std::ostringstream os;
    os << "ppo_minibatch: non-finite loss (policy " << ev.policy_loss
       << ", value " << ev.value_loss << ", max ratio " << ratio.maxCoeff()
       << ", log_std " << agent.log_std.transpose() << ")";
    throw std::runtime_error(os.str());
  }
  ev.kl_sum = (logp_old - logp_new).sum();

  if (grad) {
    // Policy head: dlogp/dmean_j = z_j / sigma_j per sample.
    const MatrixXd dMean =
        (Z.array().colwise() / sigma).matrix() * dlogp.asDiagonal();
    MlpGrads pi_grads = agent.pi.zero_grads();
    agent.pi.backward(pi_cache, dMean, &pi_grads);

    // log-std gradient: dlogp/dlog_sigma_j = z_j^2 - 1, plus the entropy
    // bonus (dH/dlog_sigma_j = 1).
    VectorXd g_log_std =
        (Z.array().square().matrix() * dlogp).eval() -
        dlogp.sum() * VectorXd::Ones(act_dim);
    g_log_std.array() -= config.entropy_coef;

    MlpGrads v_grads = agent.value.zero_grads();
    MatrixXd dV(1, b);
    dV.row(0) = (2.0 * config.value_coef / b) * verr.transpose();
    agent.value.backward(v_cache, dV, &v_grads);

    grad->resize(param_count(agent));
    int pos = 0;
    write_grads(pi_grads, grad, &pos);
    grad->segment(pos, act_dim) = g_log_std;
    pos += act_dim;
    write_grads(v_grads, grad, &pos);
  }
  return ev;
}

UpdateStats ppo_update(Agent* agent, const TrajectoryBatch& batch,
                       const PpoConfig& config, AdamState* adam, Rng& rng) {
  batch.check_aligned();
  config.validate();
  const int n = batch.size();
  const int act_dim = agent->act_dim();
  if (batch.advantages.size() != n || batch.returns.size() != n) {
    throw std::invalid_argument("ppo_update: run gae() first");
  }
  if (adam->m.size() != param_count(*agent)) {
    throw std::invalid_argument("ppo_update: Adam state size mismatch");
  }

  // Batch-wide advantage normalization (population std).
  VectorXd adv = batch.advantages;
  const double adv_mean = adv.mean();
  adv.array() -= adv_mean;
  const double adv_std = std::sqrt(adv.squaredNorm() / n);
  adv /= adv_std + kAdvEps;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  UpdateStats stats;
  double clip_hits = 0.0;
  double kl_sum = 0.0;
  long samples_seen = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    // Fisher-Yates with the run's own stream.
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.uniform_index(i + 1));
      std::swap(order[i], order[j]);
    }

    for (int start = 0; start < n; start += config.minibatch) {
      const int b = std::min(config.minibatch, n - start);

      MatrixXd X(agent->obs_dim(), b);
      MatrixXd A(act_dim, b);
      VectorXd logp_old(b), mb_adv(b), mb_ret(b);
      for (int i = 0; i < b; ++i) {
        const int k = order[start + i];
        X.col(i) = batch.obs.col(k);
        A.col(i) = batch.actions.col(k);
        logp_old(i) = batch.logp(k);
        mb_adv(i) = adv(k);
        mb_ret(i) = batch.returns(k);
      }

      VectorXd g;
      const MinibatchEval ev =
          ppo_minibatch(*agent, X, A, logp_old, mb_adv, mb_ret, config, &g);

      const double gnorm = g.norm();
      if (gnorm > config.max_grad_norm && gnorm > 0.0) {
        g *= config.max_grad_norm / gnorm;
      }

      // Adam on the flat vector.
      adam->t += 1;
      adam->m = kAdamBeta1 * adam->m + (1.0 - kAdamBeta1) * g;
      adam->v =
          (kAdamBeta2 * adam->v.array() + (1.0 - kAdamBeta2) * g.array().square())
              .matrix();
      const double bias1 = 1.0 - std::pow(kAdamBeta1, double(adam->t));
      const double bias2 = 1.0 - std::pow(kAdamBeta2, double(adam->t));
      VectorXd theta = flatten_params(*agent);
      theta.array() -= config.learning_rate * (adam->m.array() / bias1) /
                       ((adam->v.array() / bias2).sqrt() + kAdamEps);
      unflatten_params(theta, agent);
      agent->clamp_log_std();

      stats.policy_loss += ev.policy_loss;
      stats.value_loss += ev.value_loss;
      stats.entropy += ev.entropy;
      stats.grad_norm += gnorm;
      clip_hits += ev.clip_hits;
      kl_sum += ev.kl_sum;
      samples_seen += b;
      stats.minibatches += 1;
    }
  }

  const double inv_mb = 1.0 / stats.minibatches;
  stats.policy_loss *= inv_mb;
  stats.value_loss *= inv_mb;
  stats.entropy *= inv_mb;
  stats.grad_norm *= inv_mb;
  stats.clip_fraction = clip_hits / double(samples_seen);
  stats.approx_kl = kl_sum / double(samples_seen);
  return stats;
}

TrajectoryBatch collect_batch(Agent* agent, Environment* env,
                              const PpoConfig& config, const Rng& base,
                              std::int64_t iteration,
                              std::vector<double>* episode_returns,
                              std::vector<int>* episode_lengths) {
  const Rng iter_stream = base.derive(kEpisodeStream, iteration);

  std::vector<VectorXd> obs_cols, act_cols, raw_cols;
  std::vector<double> logps, rewards, values;
  TrajectoryBatch batch;

  // The normalizer stays frozen while episodes run (so batches are
  // independent of collection order) and absorbs the new observations in
  // episode order at the end.
  int ep_idx = 0;
  while (static_cast<int>(rewards.size()) < config.batch_steps) {
    Rng ep_rng = iter_stream.derive(ep_idx);
    VectorXd raw = env->reset(ep_rng);
    batch.episode_start.push_back(static_cast<int>(rewards.size()));
    double ep_ret = 0.0;
    int ep_len = 0;
    std::string termination;

    for (;;) {
      double logp = 0.0;
      const VectorXd action = agent->sample_action(raw, ep_rng, &logp);
      raw_cols.push_back(raw);
      obs_cols.push_back(agent->norm.normalize(raw));
      act_cols.push_back(action);
      logps.push_back(logp);
      values.push_back(agent->state_value(raw));

      const StepOutcome out = env->step(action);
      rewards.push_back(out.reward.total);
      ep_ret += out.reward.total;
      ep_len += 1;
      raw = out.observation;
      if (out.done) {
        termination = out.termination;
        break;
      }
    }

    // Horizon truncation bootstraps with the value of the cut-off state;
    // genuine terminations bootstrap with zero.
    batch.final_value.push_back(
        termination == "horizon" ? agent->state_value(raw) : 0.0);
    if (episode_returns) episode_returns->push_back(ep_ret);
    if (episode_lengths) episode_lengths->push_back(ep_len);
    ++ep_idx;
  }

  for (const VectorXd& raw : raw_cols) agent->norm.observe(raw);

  const int n = static_cast<int>(rewards.size());
  batch.obs.resize(agent->obs_dim(), n);
  batch.actions.resize(agent->act_dim(), n);
  batch.logp.resize(n);
  batch.rewards.resize(n);
  batch.values.resize(n);
  for (int i = 0; i < n; ++i) {
    batch.obs.col(i) = obs_cols[i];
    batch.actions.col(i) = act_cols[i];
    batch.logp(i) = logps[i];
    batch.rewards(i) = rewards[i];
    batch.values(i) = values[i];
  }
  batch.check_aligned();
  return batch;
}

void save_training_curve(const std::string& path,
                         const std::vector<IterationRecord>& curve) {
  CsvWriter out(path);
  out.header({"iteration", "episodes", "steps", "mean_return", "mean_length",
              "policy_loss", "value_loss", "entropy", "clip_fraction",
              "approx_kl", "grad_norm", "log_std_mean"});
  for (const auto& r : curve) {
    out.row({double(r.iteration), double(r.episodes), double(r.steps),
             r.mean_return, r.mean_length, r.stats.policy_loss,
             r.stats.value_loss, r.stats.entropy, r.stats.clip_fraction,
             r.stats.approx_kl, r.stats.grad_norm, r.log_std_mean});
  }
  out.flush();
}

TrainResult train_policy(const EnvConfig& env_config,
                         const ReferenceMotion& motion,
                         const PpoConfig& config, std::uint64_t seed,
                         const TrainOptions& options,
                         const Agent* warm_start) {
  env_config.validate();
  config.validate();

  const Rng base(seed);
  Agent agent;
  if (warm_start) {
    agent = *warm_start;
  } else {
    Rng init_rng = base.derive(kInitStream);
    agent = make_agent(kObsDim, kNumJoints, init_rng);
  }

  Environment env(env_config, motion);
  AdamState adam = AdamState::make(param_count(agent));

  TrainResult result;
  result.best_agent = agent;
  result.best_return = -std::numeric_limits<double>::infinity();

  for (std::int64_t iter = 0; iter < options.iterations; ++iter) {
    std::vector<double> ep_returns;
    std::vector<int> ep_lengths;
    TrajectoryBatch batch =
        collect_batch(&agent, &env, config, base, iter, &ep_returns,
                      &ep_lengths);
    gae(&batch, config.gamma, config.lam);

    const double mean_return =
        std::accumulate(ep_returns.begin(), ep_returns.end(), 0.0) /
        double(ep_returns.size());
    const double mean_length =
        std::accumulate(ep_lengths.begin(), ep_lengths.end(), 0.0) /
        double(ep_lengths.size());

    // The checkpointed agent is the one that produced these episodes, so
    // snapshot before the update touches it.
    if (mean_return > result.best_return) {
      result.best_return = mean_return;
      result.best_agent = agent;
      if (!options.checkpoint_path.empty()) {
        Checkpoint ckpt;
        ckpt.agent = result.best_agent;
        ckpt.config = config;
        ckpt.rng_state = base.serialize();
        ckpt.iteration = iter;
        ckpt.best_return = result.best_return;
        save_checkpoint(options.checkpoint_path, ckpt);
      }
    }

    Rng update_rng = base.derive(kUpdateStream, iter);
    const UpdateStats stats =
        ppo_update(&agent, batch, config, &adam, update_rng);

    IterationRecord rec;
    rec.iteration = iter;
    rec.episodes = static_cast<int>(ep_returns.size());
    rec.steps = batch.size();
    rec.mean_return = mean_return;
    rec.mean_length = mean_length;
    rec.stats = stats;
    rec.log_std_mean = agent.log_std.mean();
    result.curve.push_back(rec);

    if (!options.curve_path.empty()) {
      save_training_curve(options.curve_path, result.curve);
    }
    if (options.verbose) {
      std::fprintf(stderr,
                   "iter %4lld  return %9.2f  len %6.1f  vloss %8.3f  "
                   "clip %5.3f  kl %8.5f\n",
                   static_cast<long long>(iter), mean_return, mean_length,
                   stats.value_loss, stats.clip_fraction, stats.approx_kl);
    }
  }

  result.agent = agent;
  if (result.best_return == -std::numeric_limits<double>::infinity()) {
    result.best_return = 0.0;  // zero-iteration run
  }
  return result;
}

}  // namespace gaitsim
