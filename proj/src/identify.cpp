#include "gaitsim/identify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "gaitsim/csv.hpp"
#include "gaitsim/rollout.hpp"

namespace gaitsim {
namespace {

constexpr double kSigmaCollapse = 1e-8;

VectorXd to_scaled(const VectorXd& mu, const ParamBounds& bounds) {
  VectorXd s(mu.size());
  for (int i = 0; i < mu.size(); ++i) {
    const double w = bounds.hi(i) - bounds.lo(i);
    s(i) = w > 0.0 ? (mu(i) - bounds.lo(i)) / w : 0.0;
  }
  return s.cwiseMax(0.0).cwiseMin(1.0);
}

VectorXd from_scaled(const VectorXd& s, const ParamBounds& bounds) {
  return bounds.lo.array() + s.array() * (bounds.hi - bounds.lo).array();
}

}  // namespace

double evaluate_candidate(const ParamVector& mu, const Agent& policy,
                          const ReferenceMotion& motion,
                          const EnvConfig& env_config, Rng& rng,
                          int n_rollouts) {
  EnvConfig cfg = env_config;
  cfg.randomize = false;
  cfg.fixed_mu = mu;
  cfg.perturb.enabled = false;
  cfg.random_init_phase = false;

  Environment env(cfg, motion);
  double total = 0.0;
  for (int r = 0; r < n_rollouts; ++r) {
    const EpisodeResult res = rollout(policy, &env, rng, true);
    double ret = 0.0;
    for (const GaitStep& s : res.record.steps) ret += s.reward.total;
    total += ret;
  }
  return total / n_rollouts;
}

void IdentifyConfig::validate() const {
  if (lambda < 2) throw std::invalid_argument("IdentifyConfig: lambda >= 2");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("IdentifyConfig: sigma0 > 0");
  if (max_evals < lambda) {
    throw std::invalid_argument("IdentifyConfig: budget below one generation");
  }
  if (n_rollouts < 1) throw std::invalid_argument("IdentifyConfig: n_rollouts");
  if (workers < 0) throw std::invalid_argument("IdentifyConfig: workers < 0");
}

IdentifyResult identify_parameters(const FitnessFn& fitness,
                                   const ParamVector& start,
                                   const ParamBounds& bounds,
                                   const IdentifyConfig& config, Rng& rng) {
  config.validate();
  bounds.validate();

  IdentifyResult result;
  const VectorXd width = bounds.hi - bounds.lo;

  if (width.maxCoeff() <= 0.0) {
    // Point bounds: nothing to search.
    result.mu = ParamVector::unflatten(bounds.lo);
    Rng eval_rng = rng.derive(0, 0);
    result.fitness = fitness(result.mu, eval_rng);
    result.converged = true;
    result.evaluations = 1;
    return result;
  }

  const VectorXd s0 = to_scaled(bounds.clamp(start).flatten(), bounds);
  BoxBounds unit{VectorXd::Zero(ParamVector::kDim),
                 VectorXd::Ones(ParamVector::kDim)};
  CmaEs es(s0, config.sigma0, config.lambda, unit);

  double best_ever = -std::numeric_limits<double>::infinity();
  VectorXd best_mu = bounds.clamp(start).flatten();

  while (result.evaluations + config.lambda <= config.max_evals) {
    const int gen = es.generation();
    const std::vector<VectorXd> pop = es.ask(rng);
    std::vector<double> returns(pop.size());

    // Each candidate owns a stream derived from (generation, index) and
    // writes its slot by index, so the outcome is the same serial or
    // threaded. Evaluation failures rank as worst.
    std::vector<Rng> streams;
    for (std::size_t k = 0; k < pop.size(); ++k) {
      streams.push_back(rng.derive(gen, k));
    }
    auto eval_one = [&](std::size_t k) {
      const ParamVector mu =
          ParamVector::unflatten(from_scaled(pop[k], bounds));
      try {
        returns[k] = fitness(mu, streams[k]);
      } catch (const std::exception&) {
        returns[k] = -std::numeric_limits<double>::infinity();
      }
    };
    const int workers =
        std::min<int>(std::max(config.workers, 1), int(pop.size()));
    if (workers <= 1) {
      for (std::size_t k = 0; k < pop.size(); ++k) eval_one(k);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> threads;
      for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&]() {
          for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= pop.size()) break;
            eval_one(k);
          }
        });
      }
      for (auto& t : threads) t.join();
    }
    result.evaluations += int(pop.size());

    std::vector<double> neg(pop.size());
    for (std::size_t k = 0; k < pop.size(); ++k) neg[k] = -returns[k];
    es.tell(pop, neg);

    std::vector<double> sorted = returns;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median = n % 2 == 1
                              ? sorted[n / 2]
                              : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    const double gen_best = sorted.back();
    if (gen_best > best_ever) {
      best_ever = gen_best;
      const std::size_t arg = static_cast<std::size_t>(
          std::max_element(returns.begin(), returns.end()) - returns.begin());
      best_mu = from_scaled(pop[arg], bounds);
    }

    GenerationStats stats;
    stats.generation = gen;
    stats.best = gen_best;
    stats.median = median;
    stats.mean =
        std::accumulate(returns.begin(), returns.end(), 0.0) / double(n);
    stats.best_ever = best_ever;
    stats.best_mu = best_mu;
    result.history.push_back(stats);

    if (es.sigma() < kSigmaCollapse) {
      result.converged = true;
      break;
    }
  }

  result.mu = ParamVector::unflatten(best_mu);
  result.fitness = best_ever;
  return result;
}

IdentifyResult identify_parameters(const Agent& policy,
                                   const ReferenceMotion& motion,
                                   const EnvConfig& env_config,
                                   const ParamBounds& bounds,
                                   const IdentifyConfig& config, Rng& rng,
                                   std::optional<ParamVector> start) {
  const FitnessFn fitness = [&](const ParamVector& mu, Rng& stream) {
    return evaluate_candidate(mu, policy, motion, env_config, stream,
                              config.n_rollouts);
  };
  return identify_parameters(
      fitness, start ? *start : nominal_params(env_config.subject.height_m()),
      bounds, config, rng);
}

void save_identify_history(const std::string& path,
                           const IdentifyResult& result) {
  CsvWriter out(path);
  out.meta("evaluations", std::to_string(result.evaluations));
  out.meta("converged", result.converged ? "1" : "0");
  std::vector<std::string> cols{"generation", "best", "median", "mean",
                                "best_ever"};
  for (const std::string& name : ParamVector::names()) {
    cols.push_back("mu_" + name);
  }
  out.header(cols);
  for (const GenerationStats& g : result.history) {
    std::vector<double> row{double(g.generation), g.best, g.median, g.mean,
                            g.best_ever};
    for (int i = 0; i < g.best_mu.size(); ++i) row.push_back(g.best_mu(i));
    out.row(row);
  }
  out.flush();
}

}  // namespace gaitsim
