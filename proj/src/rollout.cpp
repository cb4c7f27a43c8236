#include "gaitsim/rollout.hpp"

namespace gaitsim {

EpisodeResult rollout(const Agent& agent, Environment* env, Rng& rng,
                      bool deterministic) {
  EpisodeResult result;
  VectorXd obs = env->reset(rng);
  const double gamma = env->config().gamma;
  double discount = 1.0;

  for (;;) {
    VectorXd action;
    if (deterministic) {
      action = agent.mean_action(obs);
    } else {
      double logp = 0.0;
      action = agent.sample_action(obs, rng, &logp);
    }
    const StepOutcome out = env->step(action);
    result.ret += discount * out.reward.total;
    discount *= gamma;
    obs = out.observation;
    if (out.done) {
      result.termination = out.termination;
      break;
    }
  }
  result.record = env->record();
  return result;
}

}  // namespace gaitsim
