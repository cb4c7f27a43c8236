#include "gaitsim/run_config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaitsim/csv.hpp"
#include "gaitsim/model_io.hpp"
#include "gaitsim/reference_capture.hpp"
#include "gaitsim/rollout.hpp"

namespace gaitsim {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

void check_keys(const ordered_json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) {
    throw ConfigError("config section '" + where + "' must be an object");
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("unknown config key '" +
                        (where.empty() ? item.key() : where + "." + item.key()) +
                        "'");
    }
  }
}

template <typename T>
void fetch(const ordered_json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

int resolved_workers(const RunConfig& config) {
  if (config.workers > 0) return config.workers;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

SubjectSpec resolve_subject(const RunConfig& config) {
  const std::vector<SubjectSpec> roster = load_subjects(config.subjects_file);
  return find_subject(roster, config.subject);
}

void prepare_out_dir(const RunConfig& config) {
  fs::create_directories(config.out_dir);
  save_run_config(config.out_dir + "/config_resolved.json", config);
}

ReferenceMotion resolve_motion(const RunConfig& config,
                               const SubjectSpec& subject) {
  if (!config.reference.empty()) return load_reference(config.reference);
  return synthesize_gait(subject, config.synth);
}

Agent load_agent(const RunConfig& config) {
  if (config.checkpoint.empty()) {
    throw ConfigError("config key 'checkpoint' is required for this command");
  }
  return load_checkpoint(config.checkpoint).agent;
}

// Minimal text CSV for the tidy exports, which carry string channels.
class TextCsv {
 public:
  explicit TextCsv(const std::string& path) : out_(path) {
    if (!out_) throw ConfigError("cannot write '" + path + "'");
  }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void tidy_channel_rows(TextCsv* csv, const std::string& channel,
                       const VectorXd& values, const char* source) {
  for (int i = 0; i < values.size(); ++i) {
    csv->row({channel, std::to_string(i), format_double(values(i)), source});
  }
}

const std::array<const char*, 4> kGrfChannels = {"grf_tan_l", "grf_vert_l",
                                                 "grf_tan_r", "grf_vert_r"};

}  // namespace

EnvConfig RunConfig::make_env(const SubjectSpec& spec) const {
  EnvConfig env;
  env.subject = spec;
  env.weights = weights;
  env.perturb = perturb;
  env.contact = contact;
  env.randomize = randomize;
  env.dr_bounds = default_param_bounds(nominal_params(spec.height_m()));
  env.physics_dt = physics_dt;
  env.substeps = substeps;
  env.horizon = horizon;
  env.gamma = ppo.gamma;
  env.action_limit = action_limit;
  env.pelvis_term_frac = pelvis_term_frac;
  env.pitch_term = pitch_term;
  return env;
}

LoopConfig RunConfig::make_loop() const {
  LoopConfig loop;
  loop.ppo = ppo;
  loop.train_iterations = loop_train_iterations;
  loop.identify = identify;
  loop.weights = weights;
  loop.contact = contact;
  loop.kappa = kappa;
  loop.max_iters = max_iters;
  loop.retry_cap = retry_cap;
  if (!loop_initial_mu.empty()) {
    if (static_cast<int>(loop_initial_mu.size()) != ParamVector::kDim) {
      throw ConfigError("loop.initial_mu needs exactly " +
                        std::to_string(ParamVector::kDim) + " values");
    }
    loop.initial_mu = ParamVector::unflatten(Eigen::Map<const VectorXd>(
        loop_initial_mu.data(), ParamVector::kDim));
  }
  loop.out_dir = out_dir;
  return loop;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  ordered_json j;
  try {
    j = ordered_json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }

  RunConfig c;
  try {
    check_keys(j, "",
               {"subject", "subjects_file", "reference", "reference_cycle",
                "checkpoint", "seed", "out_dir", "workers", "synth", "env",
                "ppo", "train_iterations", "identify", "loop", "eval"});
    fetch(j, "subject", c.subject);
    fetch(j, "subjects_file", c.subjects_file);
    fetch(j, "reference", c.reference);
    fetch(j, "reference_cycle", c.reference_cycle);
    fetch(j, "checkpoint", c.checkpoint);
    fetch(j, "seed", c.seed);
    fetch(j, "out_dir", c.out_dir);
    fetch(j, "workers", c.workers);

    if (j.contains("synth")) {
      const auto& s = j.at("synth");
      check_keys(s, "synth", {"stride", "cycle_duration", "amp_scale"});
      fetch(s, "stride", c.synth.stride);
      fetch(s, "cycle_duration", c.synth.cycle_duration);
      fetch(s, "amp_scale", c.synth.amp_scale);
    }

    if (j.contains("env")) {
      const auto& e = j.at("env");
      check_keys(e, "env",
                 {"physics_dt", "substeps", "horizon", "action_limit",
                  "pelvis_term_frac", "pitch_term", "randomize", "perturb",
                  "contact", "weights"});
      fetch(e, "physics_dt", c.physics_dt);
      fetch(e, "substeps", c.substeps);
      fetch(e, "horizon", c.horizon);
      fetch(e, "action_limit", c.action_limit);
      fetch(e, "pelvis_term_frac", c.pelvis_term_frac);
      fetch(e, "pitch_term", c.pitch_term);
      fetch(e, "randomize", c.randomize);
      if (e.contains("perturb")) {
        const auto& p = e.at("perturb");
        check_keys(p, "env.perturb",
                   {"enabled", "magnitude_lo", "magnitude_hi", "duration"});
        fetch(p, "enabled", c.perturb.enabled);
        fetch(p, "magnitude_lo", c.perturb.magnitude_lo);
        fetch(p, "magnitude_hi", c.perturb.magnitude_hi);
        fetch(p, "duration", c.perturb.duration);
      }
      if (e.contains("contact")) {
        const auto& k = e.at("contact");
        check_keys(k, "env.contact",
                   {"stiffness", "exponent", "dissipation", "friction_coeff",
                    "v_reg"});
        fetch(k, "stiffness", c.contact.stiffness);
        fetch(k, "exponent", c.contact.exponent);
        fetch(k, "dissipation", c.contact.dissipation);
        fetch(k, "friction_coeff", c.contact.friction_coeff);
        fetch(k, "v_reg", c.contact.v_reg);
      }
      if (e.contains("weights")) {
        const auto& w = e.at("weights");
        check_keys(w, "env.weights", {"q", "com", "ee", "tau"});
        fetch(w, "q", c.weights.w_q);
        fetch(w, "com", c.weights.w_c);
        fetch(w, "ee", c.weights.w_e);
        fetch(w, "tau", c.weights.w_tau);
      }
    }

    if (j.contains("ppo")) {
      const auto& p = j.at("ppo");
      check_keys(p, "ppo",
                 {"clip", "gamma", "lam", "learning_rate", "epochs",
                  "minibatch", "batch_steps", "entropy_coef", "value_coef",
                  "max_grad_norm"});
      fetch(p, "clip", c.ppo.clip);
      fetch(p, "gamma", c.ppo.gamma);
      fetch(p, "lam", c.ppo.lam);
      fetch(p, "learning_rate", c.ppo.learning_rate);
      fetch(p, "epochs", c.ppo.epochs);
      fetch(p, "minibatch", c.ppo.minibatch);
      fetch(p, "batch_steps", c.ppo.batch_steps);
      fetch(p, "entropy_coef", c.ppo.entropy_coef);
      fetch(p, "value_coef", c.ppo.value_coef);
      fetch(p, "max_grad_norm", c.ppo.max_grad_norm);
    }
    fetch(j, "train_iterations", c.train_iterations);

    if (j.contains("identify")) {
      const auto& i = j.at("identify");
      check_keys(i, "identify",
                 {"lambda", "sigma0", "max_evals", "n_rollouts"});
      fetch(i, "lambda", c.identify.lambda);
      fetch(i, "sigma0", c.identify.sigma0);
      fetch(i, "max_evals", c.identify.max_evals);
      fetch(i, "n_rollouts", c.identify.n_rollouts);
    }

    if (j.contains("loop")) {
      const auto& l = j.at("loop");
      check_keys(l, "loop",
                 {"kappa", "max_iters", "retry_cap", "train_iterations",
                  "initial_mu"});
      fetch(l, "kappa", c.kappa);
      fetch(l, "max_iters", c.max_iters);
      fetch(l, "retry_cap", c.retry_cap);
      fetch(l, "train_iterations", c.loop_train_iterations);
      fetch(l, "initial_mu", c.loop_initial_mu);
    }

    if (j.contains("eval")) {
      const auto& e = j.at("eval");
      check_keys(e, "eval", {"mu", "capture_reference"});
      fetch(e, "mu", c.eval_mu);
      fetch(e, "capture_reference", c.capture_reference);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return c;
}

void save_run_config(const std::string& path, const RunConfig& c) {
  ordered_json j;
  j["subject"] = c.subject;
  j["subjects_file"] = c.subjects_file;
  j["reference"] = c.reference;
  j["reference_cycle"] = c.reference_cycle;
  j["checkpoint"] = c.checkpoint;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  j["workers"] = c.workers;
  j["synth"] = {{"stride", c.synth.stride},
                {"cycle_duration", c.synth.cycle_duration},
                {"amp_scale", c.synth.amp_scale}};
  j["env"] = {
      {"physics_dt", c.physics_dt},
      {"substeps", c.substeps},
      {"horizon", c.horizon},
      {"action_limit", c.action_limit},
      {"pelvis_term_frac", c.pelvis_term_frac},
      {"pitch_term", c.pitch_term},
      {"randomize", c.randomize},
      {"perturb",
       {{"enabled", c.perturb.enabled},
        {"magnitude_lo", c.perturb.magnitude_lo},
        {"magnitude_hi", c.perturb.magnitude_hi},
        {"duration", c.perturb.duration}}},
      {"contact",
       {{"stiffness", c.contact.stiffness},
        {"exponent", c.contact.exponent},
        {"dissipation", c.contact.dissipation},
        {"friction_coeff", c.contact.friction_coeff},
        {"v_reg", c.contact.v_reg}}},
      {"weights",
       {{"q", c.weights.w_q},
        {"com", c.weights.w_c},
        {"ee", c.weights.w_e},
        {"tau", c.weights.w_tau}}}};
  j["ppo"] = {{"clip", c.ppo.clip},
              {"gamma", c.ppo.gamma},
              {"lam", c.ppo.lam},
              {"learning_rate", c.ppo.learning_rate},
              {"epochs", c.ppo.epochs},
              {"minibatch", c.ppo.minibatch},
              {"batch_steps", c.ppo.batch_steps},
              {"entropy_coef", c.ppo.entropy_coef},
              {"value_coef", c.ppo.value_coef},
              {"max_grad_norm", c.ppo.max_grad_norm}};
  j["train_iterations"] = c.train_iterations;
  j["identify"] = {{"lambda", c.identify.lambda},
                   {"sigma0", c.identify.sigma0},
                   {"max_evals", c.identify.max_evals},
                   {"n_rollouts", c.identify.n_rollouts}};
  j["loop"] = {{"kappa", c.kappa},
               {"max_iters", c.max_iters},
               {"retry_cap", c.retry_cap},
               {"train_iterations", c.loop_train_iterations},
               {"initial_mu", c.loop_initial_mu}};
  j["eval"] = {{"mu", c.eval_mu},
               {"capture_reference", c.capture_reference}};

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

int cmd_synth_ref(const RunConfig& config) {
  const SubjectSpec subject = resolve_subject(config);
  prepare_out_dir(config);

  const ReferenceMotion motion = synthesize_gait(subject, config.synth);
  const std::string ref_path = config.out_dir + "/reference.csv";
  save_reference(ref_path, motion);

  std::ofstream roster(config.out_dir + "/subject.csv");
  roster << "id,sex,mass_kg,height_cm,age,speed_mps\n"
         << subject.id << ',' << subject.sex << ','
         << format_double(subject.mass) << ','
         << format_double(subject.height_cm) << ',' << subject.age << ','
         << format_double(subject.speed) << '\n';

  std::printf("wrote %s (subject %d, speed %.3f m/s, cycle %.3f s)\n",
              ref_path.c_str(), subject.id, motion.speed,
              motion.cycle_duration);
  return 0;
}

int cmd_train(const RunConfig& config) {
  const SubjectSpec subject = resolve_subject(config);
  prepare_out_dir(config);
  const ReferenceMotion motion = resolve_motion(config, subject);
  const EnvConfig env = config.make_env(subject);

  Agent warm;
  bool have_warm = false;
  if (!config.checkpoint.empty()) {
    warm = load_checkpoint(config.checkpoint).agent;
    have_warm = true;
  }

  TrainOptions options;
  options.iterations = config.train_iterations;
  options.checkpoint_path = config.out_dir + "/policy.ckpt";
  options.curve_path = config.out_dir + "/training_curve.csv";
  options.verbose = true;

  const TrainResult result =
      train_policy(env, motion, config.ppo, config.seed, options,
                   have_warm ? &warm : nullptr);

  // Zero-iteration runs still leave a usable checkpoint behind.
  Checkpoint ckpt;
  ckpt.agent = result.best_agent;
  ckpt.config = config.ppo;
  ckpt.rng_state = Rng(config.seed).serialize();
  ckpt.iteration = config.train_iterations;
  ckpt.best_return = result.best_return;
  save_checkpoint(options.checkpoint_path, ckpt);

  std::printf("trained %lld iterations, best mean return %.2f -> %s\n",
              static_cast<long long>(config.train_iterations),
              result.best_return, options.checkpoint_path.c_str());
  return 0;
}

int cmd_identify(const RunConfig& config) {
  const SubjectSpec subject = resolve_subject(config);
  const Agent agent = load_agent(config);
  prepare_out_dir(config);
  const ReferenceMotion motion = resolve_motion(config, subject);
  const EnvConfig env = config.make_env(subject);
  const ParamBounds bounds =
      default_param_bounds(nominal_params(subject.height_m()));

  IdentifyConfig id_cfg = config.identify;
  id_cfg.workers = resolved_workers(config);

  Rng rng(config.seed);
  const IdentifyResult result =
      identify_parameters(agent, motion, env, bounds, id_cfg, rng);

  save_identify_history(config.out_dir + "/identify_history.csv", result);
  const Biped biped = build_biped(subject, result.mu);
  save_model(config.out_dir + "/identified_model.txt", biped, config.contact);

  const VectorXd mu = result.mu.flatten();
  for (int i = 0; i < mu.size(); ++i) {
    std::printf("%-14s %12.6f\n", ParamVector::names()[i].c_str(), mu(i));
  }
  std::printf("fitness %.3f after %d evaluations\n", result.fitness,
              result.evaluations);
  return 0;
}

int cmd_loop(const RunConfig& config) {
  const SubjectSpec subject = resolve_subject(config);
  if (config.reference.empty() || config.reference_cycle.empty()) {
    throw ConfigError(
        "loop requires config keys 'reference' and 'reference_cycle' "
        "(capture them with eval + eval.capture_reference)");
  }
  prepare_out_dir(config);

  ReferenceData reference;
  reference.motion = load_reference(config.reference);
  reference.cycle = load_cycle(config.reference_cycle);

  LoopConfig loop = config.make_loop();
  loop.identify.workers = resolved_workers(config);
  loop.verbose = true;

  // Resume from a previous partial run in the same directory.
  LoopReport prior;
  bool have_prior = false;
  Agent warm;
  bool have_warm = false;
  const std::string report_path = config.out_dir + "/loop_report.csv";
  if (fs::exists(report_path)) {
    prior = load_loop_report(report_path);
    have_prior = !prior.iterations.empty();
    for (auto it = prior.iterations.rbegin(); it != prior.iterations.rend();
         ++it) {
      if (it->checkpoint_id >= 0) {
        const std::string ckpt = config.out_dir + "/policy_iter" +
                                 std::to_string(it->checkpoint_id) + ".ckpt";
        if (fs::exists(ckpt)) {
          warm = load_checkpoint(ckpt).agent;
          have_warm = true;
        }
        break;
      }
    }
    if (have_prior) {
      std::printf("resuming after %zu completed iterations\n",
                  prior.iterations.size());
    }
  }

  Rng rng(config.seed);
  const LoopReport report =
      run_alternation(subject, reference, loop, rng,
                      have_warm ? &warm : nullptr,
                      have_prior ? &prior : nullptr);

  std::printf("loop %s after %zu iterations, final eps %.3f\n",
              report.converged ? "converged" : "stopped",
              report.iterations.size(), report.final_epsilon);
  return 0;
}

int cmd_eval(const RunConfig& config) {
  const SubjectSpec subject = resolve_subject(config);
  const Agent agent = load_agent(config);
  if (config.reference.empty()) {
    throw ConfigError("config key 'reference' is required for eval");
  }
  prepare_out_dir(config);
  const ReferenceMotion motion = load_reference(config.reference);
  const EnvConfig env = config.make_env(subject);

  ParamVector mu = nominal_params(subject.height_m());
  if (!config.eval_mu.empty()) {
    if (static_cast<int>(config.eval_mu.size()) != ParamVector::kDim) {
      throw ConfigError("eval.mu must hold exactly 12 values");
    }
    mu = ParamVector::unflatten(Eigen::Map<const VectorXd>(
        config.eval_mu.data(), ParamVector::kDim));
  }

  const EpisodeResult res = evaluation_rollout(agent, env, motion, mu);
  save_record(config.out_dir + "/eval_record.csv", res.record);
  const GaitCycle cycle = mean_cycle(segment_cycles(res.record));

  bool have_ref_cycle = false;
  GaitCycle ref_cycle;
  if (!config.reference_cycle.empty()) {
    ref_cycle = load_cycle(config.reference_cycle);
    have_ref_cycle = true;
  }
  // Kinematic fallback: reference joint angles straight from the motion's
  // phase nodes.
  MatrixXd ref_q(6, kCyclePoints);
  if (have_ref_cycle) {
    ref_q = ref_cycle.q;
  } else {
    for (int i = 0; i < kCyclePoints; ++i) {
      ref_q.col(i) =
          motion.sample(i / double(kCyclePoints - 1) *
                        (1.0 - 1e-12)).qhat.tail(6);
    }
  }

  TextCsv angles(config.out_dir + "/joint_angles.csv");
  angles.row({"channel", "phase", "value", "source"});
  TextCsv moments_csv(config.out_dir + "/moments.csv");
  moments_csv.row({"channel", "phase", "value", "source"});
  TextCsv grfs(config.out_dir + "/grfs.csv");
  grfs.row({"channel", "phase", "value", "source"});

  const MatrixXd sim_moments = joint_moments(cycle);
  for (int jnt = 0; jnt < 6; ++jnt) {
    const std::string q_name = std::string("q_") + kJointNames[jnt];
    const std::string m_name = std::string("moment_") + kJointNames[jnt];
    tidy_channel_rows(&angles, q_name, cycle.q.row(jnt).transpose(), "sim");
    tidy_channel_rows(&angles, q_name, ref_q.row(jnt).transpose(),
                      "reference");
    tidy_channel_rows(&moments_csv, m_name,
                      sim_moments.row(jnt).transpose(), "sim");
    if (have_ref_cycle) {
      tidy_channel_rows(&moments_csv, m_name,
                        joint_moments(ref_cycle).row(jnt).transpose(),
                        "reference");
    }
  }
  for (int ch = 0; ch < 4; ++ch) {
    tidy_channel_rows(&grfs, kGrfChannels[ch], cycle.grf.row(ch).transpose(),
                      "sim");
    if (have_ref_cycle) {
      tidy_channel_rows(&grfs, kGrfChannels[ch],
                        ref_cycle.grf.row(ch).transpose(), "reference");
    }
  }

  TextCsv loops(config.out_dir + "/torque_loops.csv");
  loops.row({"joint", "point", "angle", "torque", "marker"});
  for (int jnt = 0; jnt < 6; ++jnt) {
    const TorqueLoop loop = cycle_torque_loop(cycle, jnt);
    for (int i = 0; i < loop.angle.size(); ++i) {
      const bool marked = i == loop.markers[0] || i == loop.markers[1] ||
                          i == loop.markers[2];
      loops.row({kJointNames[jnt], std::to_string(i),
                 format_double(loop.angle(i)), format_double(loop.torque(i)),
                 marked ? "1" : "0"});
    }
  }

  TextCsv rmse_csv(config.out_dir + "/rmse.csv");
  rmse_csv.row({"channel", "rmse"});
  for (int jnt = 0; jnt < 6; ++jnt) {
    rmse_csv.row({std::string("q_") + kJointNames[jnt],
                  format_double(rmse(cycle.q.row(jnt).transpose(),
                                     ref_q.row(jnt).transpose()))});
  }
  if (have_ref_cycle) {
    const MatrixXd ref_moments = joint_moments(ref_cycle);
    for (int jnt = 0; jnt < 6; ++jnt) {
      rmse_csv.row({std::string("moment_") + kJointNames[jnt],
                    format_double(rmse(sim_moments.row(jnt).transpose(),
                                       ref_moments.row(jnt).transpose()))});
    }
    for (int ch = 0; ch < 4; ++ch) {
      rmse_csv.row({kGrfChannels[ch],
                    format_double(rmse(cycle.grf.row(ch).transpose(),
                                       ref_cycle.grf.row(ch).transpose()))});
    }
  }

  if (config.capture_reference) {
    Rng rng(config.seed);
    const CaptureResult captured =
        record_reference_from_rollout(agent, env, motion, mu, rng);
    save_reference(config.out_dir + "/captured_reference.csv",
                   captured.motion);
    save_cycle(config.out_dir + "/captured_cycle.csv", captured.cycle);
  }

  std::printf("eval outputs in %s\n", config.out_dir.c_str());
  return 0;
}

int run_cli(int argc, char** argv) {
  CLI::App app{
      "gaitsim: biomechanically grounded walking via imitation learning "
      "alternated with model-parameter identification"};
  app.require_subcommand(1);

  std::string config_path, out_override;
  std::uint64_t seed_override = 0;
  int workers_override = 0, subject_override = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--seed", seed_override, "override the run seed");
    sub->add_option("--out", out_override, "override the output directory");
    sub->add_option("--workers", workers_override,
                    "worker threads (0 = all cores)");
    sub->add_option("--subject", subject_override, "override the subject id");
    return sub;
  };

  add_common(app.add_subcommand("synth-ref",
                                "synthesize a reference gait for a subject"));
  add_common(app.add_subcommand("train", "train the imitation policy"));
  add_common(app.add_subcommand("identify",
                                "identify model parameters under a policy"));
  add_common(app.add_subcommand("loop", "run the full alternation loop"));
  add_common(app.add_subcommand("eval",
                                "evaluate a policy and export gait metrics"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    RunConfig config =
        config_path.empty() ? RunConfig{} : load_run_config(config_path);
    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed")) config.seed = seed_override;
    if (sub->count("--out")) config.out_dir = out_override;
    if (sub->count("--workers")) config.workers = workers_override;
    if (sub->count("--subject")) config.subject = subject_override;

    const std::string name = sub->get_name();
    if (name == "synth-ref") return cmd_synth_ref(config);
    if (name == "train") return cmd_train(config);
    if (name == "identify") return cmd_identify(config);
    if (name == "loop") return cmd_loop(config);
    return cmd_eval(config);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace gaitsim
