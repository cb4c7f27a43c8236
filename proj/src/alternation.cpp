#include "gaitsim/alternation.hpp"

#include <cstdio>

#include "gaitsim/csv.hpp"
#include "gaitsim/rollout.hpp"

namespace gaitsim {
namespace {

constexpr std::uint64_t kTrainSeedStream = 0x547261696eULL;
constexpr std::uint64_t kIdentifyStream = 0x4964656e74ULL;

std::string iter_path(const std::string& dir, const char* stem, int iter,
                      const char* ext) {
  return dir + "/" + stem + std::to_string(iter) + ext;
}

}  // namespace

void LoopConfig::validate() const {
  if (!(kappa > 0.0)) {
    throw std::invalid_argument("LoopConfig: kappa must be positive");
  }
  if (max_iters < 0) throw std::invalid_argument("LoopConfig: max_iters < 0");
  if (retry_cap < 0) throw std::invalid_argument("LoopConfig: retry_cap < 0");
  if (train_iterations < 0) {
    throw std::invalid_argument("LoopConfig: train_iterations < 0");
  }
  ppo.validate();
  identify.validate();
}

EpisodeResult evaluation_rollout(const Agent& policy,
                                 const EnvConfig& env_config,
                                 const ReferenceMotion& motion,
                                 const ParamVector& mu) {
  EnvConfig cfg = env_config;
  cfg.randomize = false;
  cfg.fixed_mu = mu;
  cfg.perturb.enabled = false;
  cfg.random_init_phase = false;
  Environment env(cfg, motion);
  Rng rng(0);  // nothing random remains on this path
  return rollout(policy, &env, rng, true);
}

LoopReport run_alternation(const SubjectSpec& subject,
                           const ReferenceData& reference,
                           const LoopConfig& config, Rng& rng,
                           const Agent* warm_start, const LoopReport* prior) {
  config.validate();
  subject.validate();
  reference.motion.validate();

  const ParamVector nominal = nominal_params(subject.height_m());
  const ParamBounds bounds = default_param_bounds(nominal);

  EnvConfig env_cfg;
  env_cfg.subject = subject;
  env_cfg.weights = config.weights;
  env_cfg.contact = config.contact;
  env_cfg.randomize = true;
  env_cfg.dr_bounds = bounds;
  env_cfg.gamma = config.ppo.gamma;

  LoopReport report;
  Agent current;
  bool have_agent = false;
  if (warm_start) {
    current = *warm_start;
    have_agent = true;
  }
  ParamVector last_mu =
      bounds.clamp(config.initial_mu ? *config.initial_mu : nominal);
  double best_eps = std::numeric_limits<double>::infinity();

  int start_iter = 0;
  if (prior && !prior->iterations.empty()) {
    report.iterations = prior->iterations;
    start_iter = static_cast<int>(prior->iterations.size());
    for (const LoopIteration& it : prior->iterations) {
      best_eps = std::min(best_eps, it.error.total);
      if (!it.failed) last_mu = it.mu;
    }
    if (prior->iterations.back().error.total <= config.kappa) {
      report.converged = true;
    }
  }

  const Rng seed_stream = rng.derive(kTrainSeedStream);

  for (int iter = start_iter; iter < config.max_iters && !report.converged;
       ++iter) {
    LoopIteration row;
    row.iteration = iter;
    row.checkpoint_id = -1;
    bool ok = false;

    for (int attempt = 0; attempt <= config.retry_cap && !ok; ++attempt) {
      Rng seed_rng = seed_stream.derive(iter, attempt);
      const std::uint64_t seed = seed_rng.engine()();

      TrainOptions topts;
      topts.iterations = config.train_iterations;
      topts.verbose = config.verbose;
      if (!config.out_dir.empty()) {
        topts.curve_path = iter_path(config.out_dir, "train_iter", iter, ".csv");
      }
      const TrainResult trained =
          train_policy(env_cfg, reference.motion, config.ppo, seed, topts,
                       have_agent ? &current : nullptr);
      const Agent& candidate = trained.best_agent;

      Rng ident_rng =
          rng.derive(kIdentifyStream, std::uint64_t(iter) * 97 + attempt);
      const IdentifyResult ident =
          identify_parameters(candidate, reference.motion, env_cfg, bounds,
                              config.identify, ident_rng, last_mu);

      try {
        const EpisodeResult eval = evaluation_rollout(
            candidate, env_cfg, reference.motion, ident.mu);
        const GaitCycle cycle = mean_cycle(segment_cycles(eval.record));
        row.error = compute_error(cycle, reference.cycle);
        row.rmse = cycle_rmse(cycle, reference.cycle);
        row.mu = ident.mu;
        row.identify_fitness = ident.fitness;
        row.train_return = trained.best_return;
        row.failed = false;
        row.diagnostics.clear();

        current = candidate;
        have_agent = true;
        last_mu = ident.mu;
        ok = true;

        if (!config.out_dir.empty()) {
          row.checkpoint_id = iter;
          Checkpoint ckpt;
          ckpt.agent = candidate;
          ckpt.config = config.ppo;
          ckpt.rng_state = rng.serialize();
          ckpt.iteration = iter;
          ckpt.best_return = trained.best_return;
          save_checkpoint(
              iter_path(config.out_dir, "policy_iter", iter, ".ckpt"), ckpt);
          save_identify_history(
              iter_path(config.out_dir, "identify_iter", iter, ".csv"), ident);
          save_record(iter_path(config.out_dir, "eval_iter", iter, ".csv"),
                      eval.record);
        }
      } catch (const std::exception& e) {
        row.failed = true;
        row.diagnostics = e.what();
        if (config.verbose) {
          std::fprintf(stderr, "loop iter %d attempt %d failed: %s\n", iter,
                       attempt, e.what());
        }
      }
    }

    if (row.failed) {
      row.error = GaitError{};
      row.error.total = std::numeric_limits<double>::infinity();
      row.mu = last_mu;
    }
    best_eps = std::min(best_eps, row.error.total);
    row.best_epsilon = best_eps;
    report.iterations.push_back(row);

    if (!config.out_dir.empty()) {
      save_loop_report(config.out_dir + "/loop_report.csv", report);
    }
    if (config.verbose) {
      std::fprintf(stderr, "loop iter %d  eps %.3f  (best %.3f)\n", iter,
                   row.error.total, best_eps);
    }
    if (row.error.total <= config.kappa) {
      report.converged = true;
      break;
    }
  }

  if (!report.iterations.empty()) {
    report.final_epsilon = report.iterations.back().error.total;
  }
  report.final_mu = last_mu;
  report.final_agent = current;
  if (!config.out_dir.empty() && !report.iterations.empty()) {
    save_loop_report(config.out_dir + "/loop_report.csv", report);
  }
  return report;
}

LoopReport load_loop_report(const std::string& path) {
  const CsvTable table = read_csv(path);
  LoopReport report;
  const auto cm = table.meta.find("converged");
  report.converged = cm != table.meta.end() && cm->second == "1";

  const int c_iter = table.require_column("iteration");
  const int c_failed = table.require_column("failed");
  const int c_eps = table.require_column("epsilon");
  const int c_q = table.require_column("eps_q");
  const int c_tau = table.require_column("eps_tau");
  const int c_grf = table.require_column("eps_grf");
  const int c_rq = table.require_column("rmse_q");
  const int c_rm = table.require_column("rmse_moments");
  const int c_rg = table.require_column("rmse_grf");
  const int c_fit = table.require_column("identify_fitness");
  const int c_ret = table.require_column("train_return");
  const int c_ckpt = table.require_column("checkpoint_id");
  const int c_best = table.require_column("best_epsilon");
  std::vector<int> mu_cols;
  for (const std::string& name : ParamVector::names()) {
    mu_cols.push_back(table.require_column("mu_" + name));
  }

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    LoopIteration it;
    it.iteration = static_cast<int>(table.at(r, c_iter));
    it.failed = table.at(r, c_failed) != 0.0;
    it.error.total = table.at(r, c_eps);
    it.error.q_term = table.at(r, c_q);
    it.error.tau_term = table.at(r, c_tau);
    it.error.grf_term = table.at(r, c_grf);
    it.rmse.q = table.at(r, c_rq);
    it.rmse.moments = table.at(r, c_rm);
    it.rmse.grf = table.at(r, c_rg);
    it.identify_fitness = table.at(r, c_fit);
    it.train_return = table.at(r, c_ret);
    it.checkpoint_id = static_cast<int>(table.at(r, c_ckpt));
    it.best_epsilon = table.at(r, c_best);
    VectorXd mu(ParamVector::kDim);
    for (int i = 0; i < ParamVector::kDim; ++i) mu(i) = table.at(r, mu_cols[i]);
    it.mu = ParamVector::unflatten(mu);
    const auto diag = table.meta.find("diag_iter" + std::to_string(it.iteration));
    if (diag != table.meta.end()) it.diagnostics = diag->second;
    report.iterations.push_back(it);
  }

  if (!report.iterations.empty()) {
    report.final_epsilon = report.iterations.back().error.total;
    for (const LoopIteration& it : report.iterations) {
      if (!it.failed) report.final_mu = it.mu;
    }
  }
  return report;
}

void save_loop_report(const std::string& path, const LoopReport& report) {
  CsvWriter out(path);
  out.meta("converged", report.converged ? "1" : "0");
  for (const LoopIteration& it : report.iterations) {
    if (it.failed) {
      out.meta("diag_iter" + std::to_string(it.iteration),
               it.diagnostics.empty() ? "failed" : it.diagnostics);
    }
  }
  std::vector<std::string> cols{
      "iteration",   "failed",       "epsilon",          "eps_q",
      "eps_tau",     "eps_grf",      "rmse_q",           "rmse_moments",
      "rmse_grf",    "identify_fitness", "train_return", "checkpoint_id",
      "best_epsilon"};
  for (const std::string& name : ParamVector::names()) {
    cols.push_back("mu_" + name);
  }
  out.header(cols);
  for (const LoopIteration& it : report.iterations) {
    std::vector<double> row{double(it.iteration),
                            it.failed ? 1.0 : 0.0,
                            it.error.total,
                            it.error.q_term,
                            it.error.tau_term,
                            it.error.grf_term,
                            it.rmse.q,
                            it.rmse.moments,
                            it.rmse.grf,
                            it.identify_fitness,
                            it.train_return,
                            double(it.checkpoint_id),
                            it.best_epsilon};
    const VectorXd mu = it.mu.flatten();
    for (int i = 0; i < mu.size(); ++i) row.push_back(mu(i));
    out.row(row);
  }
  out.flush();
}

}  // namespace gaitsim
