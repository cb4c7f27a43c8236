#pragma once

#include "gaitsim/mdp.hpp"
#include "gaitsim/policy.hpp"

namespace gaitsim {

// Runs one full episode under the agent and returns the step log together
// with the termination reason and the discounted return. With deterministic
// set the policy mean is used and rng only feeds the environment reset.
EpisodeResult rollout(const Agent& agent, Environment* env, Rng& rng,
                      bool deterministic);

}  // namespace gaitsim
