#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "gaitsim/metrics.hpp"
#include "gaitsim/policy.hpp"
#include "gaitsim/reference.hpp"
#include "gaitsim/run_config.hpp"
#include "test_util.hpp"

using namespace gaitsim;
namespace fs = std::filesystem;

namespace {

// Runs the installed binary with the given arguments, captures stdout+stderr
// into log_path, and returns the process exit code.
int run_tool(const std::string& args, const fs::path& log_path) {
  const std::string cmd = std::string(GAITSIM_CLI_PATH) + " " + args + " > " +
                          log_path.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

bool log_contains(const fs::path& log_path, const std::string& needle) {
  return testutil::read_file(log_path.string()).find(needle) !=
         std::string::npos;
}

std::string subjects_json() {
  return "\"subjects_file\": \"" + testutil::data_path("subjects.csv") + "\"";
}

}  // namespace

TEST_CASE("synth-ref writes a loadable reference and a canonical config") {
  const fs::path dir = testutil::scratch_dir("cli_synth");
  const fs::path out = dir / "out";
  const std::string cfg_path = (dir / "cfg.json").string();
  testutil::write_file(cfg_path,
                       "{\n"
                       "  // comments are allowed in run configs\n"
                       "  \"subject\": 1,\n"
                       "  " + subjects_json() + ",\n"
                       "  \"out_dir\": \"" + out.string() + "\"\n"
                       "}\n");

  CHECK(run_tool("synth-ref --config " + cfg_path, dir / "log.txt") == 0);
  CHECK(log_contains(dir / "log.txt", "wrote"));

  const ReferenceMotion motion =
      load_reference((out / "reference.csv").string());
  motion.validate();
  CHECK(motion.cycle_duration > 0.0);
  CHECK(fs::exists(out / "subject.csv"));

  // The resolved config is canonical: loading and re-saving it is a no-op.
  const std::string resolved = (out / "config_resolved.json").string();
  const RunConfig back = load_run_config(resolved);
  CHECK(back.subject == 1);
  CHECK(back.seed == 1);
  CHECK(back.out_dir == out.string());
  const std::string copy = (dir / "copy.json").string();
  save_run_config(copy, back);
  CHECK(testutil::read_file(copy) == testutil::read_file(resolved));
}

TEST_CASE("command-line overrides beat the config file") {
  const fs::path dir = testutil::scratch_dir("cli_override");
  const fs::path out_a = dir / "a";
  const fs::path out_b = dir / "b";
  const std::string cfg_path = (dir / "cfg.json").string();
  testutil::write_file(cfg_path,
                       "{\n"
                       "  \"subject\": 1,\n"
                       "  " + subjects_json() + ",\n"
                       "  \"out_dir\": \"" + out_a.string() + "\"\n"
                       "}\n");

  CHECK(run_tool("synth-ref --config " + cfg_path + " --seed 77 --subject 2" +
                     " --out " + out_b.string(),
                 dir / "log.txt") == 0);
  const RunConfig resolved = load_run_config(
      (out_b / "config_resolved.json").string());
  CHECK(resolved.seed == 77);
  CHECK(resolved.subject == 2);
  CHECK(resolved.out_dir == out_b.string());
  CHECK_FALSE(fs::exists(out_a));
}

TEST_CASE("a synth/train/eval chain produces the full export set") {
  const fs::path dir = testutil::scratch_dir("cli_chain");
  const fs::path synth_out = dir / "ref";
  const fs::path train_out = dir / "train";
  const fs::path eval_out = dir / "eval";

  // A shallow march keeps an untrained policy upright long enough to walk
  // the whole tool chain.
  const std::string synth_cfg = (dir / "synth.json").string();
  testutil::write_file(synth_cfg,
                       "{\n"
                       "  \"subject\": 1,\n"
                       "  " + subjects_json() + ",\n"
                       "  \"out_dir\": \"" + synth_out.string() + "\",\n"
                       "  \"synth\": {\"stride\": 1e-9, \"amp_scale\": 0.5}\n"
                       "}\n");
  REQUIRE(run_tool("synth-ref --config " + synth_cfg, dir / "synth_log.txt") ==
          0);
  const std::string ref_path = (synth_out / "reference.csv").string();

  const std::string train_cfg = (dir / "train.json").string();
  testutil::write_file(train_cfg,
                       "{\n"
                       "  \"subject\": 1,\n"
                       "  " + subjects_json() + ",\n"
                       "  \"reference\": \"" + ref_path + "\",\n"
                       "  \"out_dir\": \"" + train_out.string() + "\",\n"
                       "  \"train_iterations\": 0\n"
                       "}\n");
  REQUIRE(run_tool("train --config " + train_cfg, dir / "train_log.txt") == 0);
  const std::string ckpt_path = (train_out / "policy.ckpt").string();
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  CHECK(ckpt.iteration == 0);

  const std::string eval_cfg = (dir / "eval.json").string();
  testutil::write_file(eval_cfg,
                       "{\n"
                       "  \"subject\": 1,\n"
                       "  " + subjects_json() + ",\n"
                       "  \"reference\": \"" + ref_path + "\",\n"
                       "  \"checkpoint\": \"" + ckpt_path + "\",\n"
                       "  \"out_dir\": \"" + eval_out.string() + "\",\n"
                       "  \"env\": {\"horizon\": 160},\n"
                       "  \"eval\": {\"capture_reference\": true}\n"
                       "}\n");
  REQUIRE(run_tool("eval --config " + eval_cfg, dir / "eval_log.txt") == 0);

  for (const char* name :
       {"eval_record.csv", "joint_angles.csv", "moments.csv", "grfs.csv",
        "torque_loops.csv", "rmse.csv", "captured_reference.csv",
        "captured_cycle.csv", "config_resolved.json"}) {
    CAPTURE(name);
    CHECK(fs::exists(eval_out / name));
  }
  const std::string angles =
      testutil::read_file((eval_out / "joint_angles.csv").string());
  CHECK(angles.rfind("channel,phase,value,source\n", 0) == 0);
  CHECK(angles.find(",reference\n") != std::string::npos);

  const GaitCycle captured =
      load_cycle((eval_out / "captured_cycle.csv").string());
  CHECK(captured.q.rows() == 6);
  CHECK(captured.q.cols() == kCyclePoints);
  CHECK(captured.duration > 0.0);
  CHECK(captured.body_mass == doctest::Approx(74.0));
  const ReferenceMotion captured_motion =
      load_reference((eval_out / "captured_reference.csv").string());
  captured_motion.validate();
}

TEST_CASE("loop refuses to start without a reference bundle") {
  const fs::path dir = testutil::scratch_dir("cli_loop_missing");
  const std::string cfg_path = (dir / "cfg.json").string();
  testutil::write_file(cfg_path,
                       "{\n"
                       "  \"subject\": 1,\n"
                       "  " + subjects_json() + ",\n"
                       "  \"out_dir\": \"" + (dir / "out").string() + "\"\n"
                       "}\n");
  CHECK(run_tool("loop --config " + cfg_path, dir / "log.txt") == 1);
  CHECK(log_contains(dir / "log.txt", "error:"));
  CHECK(log_contains(dir / "log.txt", "reference"));
}

TEST_CASE("unknown config keys are rejected with their full path") {
  const fs::path dir = testutil::scratch_dir("cli_unknown_key");

  const std::string top = (dir / "top.json").string();
  testutil::write_file(top, "{\"subject\": 1, \"bogus\": 3}\n");
  CHECK(run_tool("synth-ref --config " + top, dir / "top_log.txt") == 1);
  CHECK(log_contains(dir / "top_log.txt", "unknown config key 'bogus'"));

  const std::string nested = (dir / "nested.json").string();
  testutil::write_file(nested, "{\"env\": {\"horizons\": 2}}\n");
  CHECK(run_tool("synth-ref --config " + nested, dir / "nested_log.txt") == 1);
  CHECK(log_contains(dir / "nested_log.txt",
                     "unknown config key 'env.horizons'"));
}

TEST_CASE("argument and input errors exit nonzero") {
  const fs::path dir = testutil::scratch_dir("cli_args");

  CHECK(run_tool("", dir / "none.txt") != 0);
  CHECK(run_tool("frobnicate", dir / "unknown.txt") != 0);

  CHECK(run_tool("--help", dir / "help.txt") == 0);
  CHECK(log_contains(dir / "help.txt", "synth-ref"));
  CHECK(log_contains(dir / "help.txt", "loop"));

  CHECK(run_tool("train --config " + (dir / "absent.json").string(),
                 dir / "absent.txt") == 1);
  CHECK(log_contains(dir / "absent.txt", "cannot open config"));

  const std::string cfg_path = (dir / "cfg.json").string();
  testutil::write_file(cfg_path,
                       "{" + subjects_json() + ",\n"
                       " \"out_dir\": \"" + (dir / "out").string() + "\"}\n");
  CHECK(run_tool("identify --config " + cfg_path, dir / "ident.txt") == 1);
  CHECK(log_contains(dir / "ident.txt", "checkpoint"));
}
