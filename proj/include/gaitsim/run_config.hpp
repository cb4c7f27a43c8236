#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaitsim/alternation.hpp"

namespace gaitsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything a run needs, resolvable from a JSON file plus command-line
// overrides. Unknown keys anywhere in the file are rejected, and each
// subcommand writes the fully resolved config next to its outputs.
struct RunConfig {
  int subject = 1;
  std::string subjects_file = "data/subjects.csv";
  std::string reference;        // ReferenceMotion CSV; empty = synthesize
  std::string reference_cycle;  // reference GaitCycle CSV (loop, eval RMSE)
  std::string checkpoint;       // input policy checkpoint where applicable
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int workers = 0;  // 0 = all hardware threads

  GaitParams synth;

  // environment (the discount comes from the ppo section)
  double physics_dt = 1e-3;
  int substeps = 33;
  int horizon = 300;
  double action_limit = 0.5;
  double pelvis_term_frac = 0.6;
  double pitch_term = 0.8;
  bool randomize = true;
  PerturbationConfig perturb;
  ContactParams contact;
  RewardWeights weights;

  PpoConfig ppo;
  std::int64_t train_iterations = 50;
  IdentifyConfig identify;

  // alternation loop
  double kappa = 15.0;
  int max_iters = 3;
  int retry_cap = 2;
  std::int64_t loop_train_iterations = 30;
  std::vector<double> loop_initial_mu;  // 12 values; empty = subject nominal

  // eval
  std::vector<double> eval_mu;  // 12 values; empty = subject nominal
  bool capture_reference = false;

  EnvConfig make_env(const SubjectSpec& spec) const;
  LoopConfig make_loop() const;
};

RunConfig load_run_config(const std::string& path);
void save_run_config(const std::string& path, const RunConfig& config);

int cmd_synth_ref(const RunConfig& config);
int cmd_train(const RunConfig& config);
int cmd_identify(const RunConfig& config);
int cmd_loop(const RunConfig& config);
int cmd_eval(const RunConfig& config);

// Full command-line entry point (subcommands synth-ref / train / identify /
// loop / eval); returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace gaitsim
