#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>

#include "gaitsim/alternation.hpp"
#include "gaitsim/reference_capture.hpp"
#include "test_util.hpp"

using namespace gaitsim;

namespace {

// Shared fixture: a near-PD agent sustaining a shallow march, captured once
// into a self-consistent reference bundle (the cheapest gait the full loop
// can track and evaluate without training).
struct MarchFixture {
  SubjectSpec subject;
  Agent agent;
  ReferenceData reference;
  ParamVector nominal;
};

const MarchFixture& march_fixture() {
  static const MarchFixture fixture = [] {
    MarchFixture f;
    f.subject = testutil::test_subject();
    f.nominal = nominal_params(f.subject.height_m());
    Rng agent_rng(42);
    f.agent = make_agent(kObsDim, kNumJoints, agent_rng, 16);

    GaitParams params;
    params.stride = 1e-9;
    params.amp_scale = 0.5;
    const ReferenceMotion march = synthesize_gait(f.subject, params);

    EnvConfig cfg;
    cfg.subject = f.subject;
    cfg.horizon = 160;
    Rng rng(7);
    const CaptureResult cap =
        record_reference_from_rollout(f.agent, cfg, march, f.nominal, rng);
    f.reference = ReferenceData{cap.motion, cap.cycle};
    return f;
  }();
  return fixture;
}

LoopConfig quick_loop() {
  LoopConfig cfg;
  cfg.train_iterations = 0;  // keep the policy fixed; exercise the plumbing
  cfg.identify.lambda = 2;
  cfg.identify.max_evals = 2;
  cfg.retry_cap = 0;
  return cfg;
}

}  // namespace

TEST_CASE("loop configuration validation") {
  LoopConfig cfg;
  cfg.kappa = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = LoopConfig{};
  cfg.max_iters = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = LoopConfig{};
  cfg.retry_cap = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = LoopConfig{};
  cfg.train_iterations = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = LoopConfig{};
  cfg.identify.lambda = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  LoopConfig{}.validate();
}

TEST_CASE("evaluation rollouts are a pure function of policy and plant") {
  const MarchFixture& f = march_fixture();
  EnvConfig cfg;
  cfg.subject = f.subject;
  cfg.horizon = 80;

  const EpisodeResult a =
      evaluation_rollout(f.agent, cfg, f.reference.motion, f.nominal);
  const EpisodeResult b =
      evaluation_rollout(f.agent, cfg, f.reference.motion, f.nominal);
  CHECK(a.termination == "horizon");
  REQUIRE(a.record.size() == 80);
  REQUIRE(b.record.size() == 80);
  for (int i = 0; i < 80; ++i) {
    CHECK(a.record.steps[i].q == b.record.steps[i].q);
    CHECK(a.record.steps[i].tau == b.record.steps[i].tau);
  }
  CHECK(a.ret == b.ret);
}

TEST_CASE("loop reports survive the CSV round trip") {
  LoopReport report;
  report.converged = true;
  LoopIteration ok;
  ok.iteration = 0;
  ok.error = GaitError{12.5, 3.25, 1.75, 17.5};
  ok.rmse = ChannelRmse{0.21, 0.15, 44.0};
  ok.mu = nominal_params(1.724);
  ok.identify_fitness = 1234.5;
  ok.train_return = 999.25;
  ok.checkpoint_id = 0;
  ok.best_epsilon = 17.5;
  report.iterations.push_back(ok);

  LoopIteration bad;
  bad.iteration = 1;
  bad.failed = true;
  bad.diagnostics = "segment_cycles: fewer than 2 heel strikes";
  bad.error.total = std::numeric_limits<double>::infinity();
  bad.mu = nominal_params(1.724);
  bad.checkpoint_id = -1;
  bad.best_epsilon = 17.5;
  report.iterations.push_back(bad);
  report.final_epsilon = bad.error.total;
  report.final_mu = ok.mu;

  const auto dir = testutil::scratch_dir("loop_report");
  const std::string path = (dir / "loop_report.csv").string();
  save_loop_report(path, report);
  const LoopReport back = load_loop_report(path);

  CHECK(back.converged);
  REQUIRE(back.iterations.size() == 2);
  CHECK(back.iterations[0].error.total == 17.5);
  CHECK(back.iterations[0].error.q_term == 12.5);
  CHECK(back.iterations[0].error.tau_term == 3.25);
  CHECK(back.iterations[0].error.grf_term == 1.75);
  CHECK(back.iterations[0].rmse.q == 0.21);
  CHECK(back.iterations[0].rmse.moments == 0.15);
  CHECK(back.iterations[0].rmse.grf == 44.0);
  CHECK(back.iterations[0].identify_fitness == 1234.5);
  CHECK(back.iterations[0].train_return == 999.25);
  CHECK(back.iterations[0].checkpoint_id == 0);
  CHECK_FALSE(back.iterations[0].failed);
  CHECK(back.iterations[0].mu.flatten() == ok.mu.flatten());

  CHECK(back.iterations[1].failed);
  CHECK(back.iterations[1].diagnostics == bad.diagnostics);
  CHECK(std::isinf(back.iterations[1].error.total));
  CHECK(back.iterations[1].checkpoint_id == -1);
  CHECK(back.final_epsilon ==
        std::numeric_limits<double>::infinity());
  CHECK(back.final_mu.flatten() == ok.mu.flatten());

  const std::string copy = (dir / "copy.csv").string();
  save_loop_report(copy, back);
  CHECK(testutil::read_file(path) == testutil::read_file(copy));
}

TEST_CASE("a permissive threshold converges in one round with artifacts") {
  const MarchFixture& f = march_fixture();
  LoopConfig cfg = quick_loop();
  cfg.kappa = 1e9;
  cfg.max_iters = 2;
  const auto dir = testutil::scratch_dir("loop_one_round");
  cfg.out_dir = dir.string();

  Rng rng(31);
  const LoopReport report =
      run_alternation(f.subject, f.reference, cfg, rng, &f.agent);

  CHECK(report.converged);
  REQUIRE(report.iterations.size() == 1);
  const LoopIteration& it = report.iterations[0];
  CHECK_FALSE(it.failed);
  CHECK(std::isfinite(it.error.total));
  CHECK(it.error.total ==
        doctest::Approx(it.error.q_term + it.error.tau_term + it.error.grf_term)
            .epsilon(1e-12));
  CHECK(it.best_epsilon == it.error.total);
  CHECK(report.final_epsilon == it.error.total);
  const ParamBounds bounds = default_param_bounds(f.nominal);
  CHECK(bounds.contains(it.mu));
  CHECK(report.final_mu.flatten() == it.mu.flatten());

  namespace fs = std::filesystem;
  CHECK(fs::exists(dir / "loop_report.csv"));
  CHECK(fs::exists(dir / "policy_iter0.ckpt"));
  CHECK(fs::exists(dir / "identify_iter0.csv"));
  CHECK(fs::exists(dir / "eval_iter0.csv"));

  const LoopReport loaded = load_loop_report((dir / "loop_report.csv").string());
  CHECK(loaded.converged);
  REQUIRE(loaded.iterations.size() == 1);
  CHECK(loaded.iterations[0].error.total == it.error.total);
  CHECK(loaded.iterations[0].mu.flatten() == it.mu.flatten());

  // The saved checkpoint holds the evaluated policy.
  const Checkpoint ckpt =
      load_checkpoint((dir / "policy_iter0.ckpt").string());
  CHECK(flatten_params(ckpt.agent) == flatten_params(report.final_agent));
}

TEST_CASE("a resumed run replays exactly like an uninterrupted one") {
  const MarchFixture& f = march_fixture();
  LoopConfig cfg = quick_loop();
  cfg.kappa = 1e-9;  // unreachable: force both iterations to run
  cfg.max_iters = 2;

  Rng r_full(5);
  const LoopReport full =
      run_alternation(f.subject, f.reference, cfg, r_full, &f.agent);
  REQUIRE(full.iterations.size() == 2);
  CHECK_FALSE(full.converged);

  LoopConfig first = cfg;
  first.max_iters = 1;
  Rng r_half(5);
  const LoopReport half =
      run_alternation(f.subject, f.reference, first, r_half, &f.agent);
  REQUIRE(half.iterations.size() == 1);
  CHECK(half.iterations[0].error.total == full.iterations[0].error.total);
  CHECK(half.iterations[0].mu.flatten() == full.iterations[0].mu.flatten());

  Rng r_resume(5);
  const LoopReport resumed = run_alternation(f.subject, f.reference, cfg,
                                             r_resume, &f.agent, &half);
  REQUIRE(resumed.iterations.size() == 2);
  CHECK(resumed.iterations[1].error.total == full.iterations[1].error.total);
  CHECK(resumed.iterations[1].mu.flatten() == full.iterations[1].mu.flatten());
  CHECK(resumed.final_epsilon == full.final_epsilon);
  CHECK(resumed.final_mu.flatten() == full.final_mu.flatten());
}

TEST_CASE("an already converged prior is returned untouched") {
  const MarchFixture& f = march_fixture();
  LoopConfig cfg = quick_loop();
  cfg.kappa = 5.0;
  cfg.max_iters = 5;

  LoopReport prior;
  LoopIteration done;
  done.iteration = 0;
  done.error = GaitError{0.5, 0.25, 0.25, 1.0};
  done.mu = f.nominal;
  done.best_epsilon = 1.0;
  prior.iterations.push_back(done);

  Rng rng(9);
  const LoopReport report =
      run_alternation(f.subject, f.reference, cfg, rng, &f.agent, &prior);
  CHECK(report.converged);
  REQUIRE(report.iterations.size() == 1);
  CHECK(report.iterations[0].error.total == 1.0);
  CHECK(report.final_epsilon == 1.0);
  CHECK(report.final_mu.flatten() == f.nominal.flatten());
}

TEST_CASE("evaluation failures are recorded, not fatal") {
  const MarchFixture& f = march_fixture();
  // A standing reference never strikes, so cycle segmentation of the
  // evaluation rollout must fail and the iteration must say why.
  GaitParams still;
  still.amp_scale = 0.0;
  const ReferenceMotion standing = synthesize_gait(f.subject, still);
  const ReferenceData reference{standing, f.reference.cycle};

  LoopConfig cfg = quick_loop();
  cfg.kappa = 1.0;
  cfg.max_iters = 1;

  Rng rng(13);
  const LoopReport report =
      run_alternation(f.subject, reference, cfg, rng, &f.agent);
  CHECK_FALSE(report.converged);
  REQUIRE(report.iterations.size() == 1);
  const LoopIteration& it = report.iterations[0];
  CHECK(it.failed);
  CHECK_FALSE(it.diagnostics.empty());
  CHECK(std::isinf(it.error.total));
  CHECK(std::isinf(it.best_epsilon));
  CHECK(it.mu.flatten() == f.nominal.flatten());
  CHECK(std::isinf(report.final_epsilon));
}
