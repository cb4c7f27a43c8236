#include <doctest.h>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "gaitsim/csv.hpp"
#include "gaitsim/metrics.hpp"
#include "test_util.hpp"

using namespace gaitsim;

namespace {

GaitRecord make_record(int n, double dt,
                       const std::function<void(int, GaitStep*)>& fill) {
  GaitRecord rec;
  rec.control_dt = dt;
  rec.body_mass = 70.0;
  rec.leg_length = 0.85;
  for (int i = 0; i < n; ++i) {
    GaitStep s;
    s.time = i * dt;
    s.q = Eigen::VectorXd::Zero(9);
    s.qdot = Eigen::VectorXd::Zero(9);
    s.tau = Eigen::VectorXd::Zero(6);
    fill(i, &s);
    rec.steps.push_back(s);
  }
  return rec;
}

GaitCycle const_cycle(double q, double tau, double grf, double mass) {
  GaitCycle c;
  c.duration = 1.0;
  c.body_mass = mass;
  c.leg_length = 0.85;
  c.q = MatrixXd::Constant(6, kCyclePoints, q);
  c.qdot = MatrixXd::Constant(6, kCyclePoints, 0.0);
  c.tau = MatrixXd::Constant(6, kCyclePoints, tau);
  c.grf = MatrixXd::Constant(4, kCyclePoints, grf);
  c.base_z = VectorXd::Constant(kCyclePoints, 0.9);
  c.base_pitch = VectorXd::Zero(kCyclePoints);
  return c;
}

}  // namespace

TEST_CASE("heel strikes are rising edges after a debounced unloaded spell") {
  // threshold = 5% of body weight = 34.335 N at 70 kg
  const auto rec = make_record(60, 0.01, [](int i, GaitStep* s) {
    double v = 500.0;
    if (i >= 10 && i < 15) v = 0.0;  // 0.05 s below: long enough
    if (i >= 25 && i < 29) v = 0.0;  // 0.04 s below: bounced, no strike
    if (i >= 40 && i < 50) v = 0.0;  // 0.10 s below
    s->grf_vert[0] = v;
    s->grf_vert[1] = 500.0;  // right foot never unloads
  });
  CHECK(detect_heel_strikes(rec, 0) == std::vector<int>{15, 50});
  CHECK(detect_heel_strikes(rec, 1) == std::vector<int>{});

  // A record that starts in the air counts its first touchdown.
  const auto air = make_record(20, 0.01, [](int i, GaitStep* s) {
    s->grf_vert[0] = i < 7 ? 0.0 : 600.0;
  });
  CHECK(detect_heel_strikes(air, 0) == std::vector<int>{7});
}

TEST_CASE("cycles resample every channel linearly onto the 101-point grid") {
  // Left-foot strikes at 7 and 30 frame one cycle; all channels are linear
  // in the step index, which interpolation must reproduce exactly.
  const auto rec = make_record(40, 0.01, [](int i, GaitStep* s) {
    s->grf_vert[0] = (i < 7 || (i >= 20 && i < 30)) ? 0.0 : 400.0;
    s->grf_vert[1] = 350.0 - i;
    s->grf_tan[0] = 0.3 * i;
    s->grf_tan[1] = -0.2 * i;
    s->q[1] = 3.0 - 0.1 * i;
    s->q[2] = 0.01 * i;
    for (int j = 0; j < 6; ++j) {
      s->q[3 + j] = 2.0 + 0.5 * i + j;
      s->qdot[3 + j] = -1.0 + 0.25 * i - j;
      s->tau[j] = j + 0.01 * i;
    }
  });

  const auto cycles = segment_cycles(rec);
  REQUIRE(cycles.size() == 1);
  const GaitCycle& c = cycles[0];
  CHECK(c.start == 7);
  CHECK(c.end == 30);
  CHECK(c.duration == doctest::Approx(0.23).epsilon(1e-12));
  CHECK(c.body_mass == 70.0);
  CHECK(c.leg_length == 0.85);

  const double span = 23.0;
  for (int k = 0; k < kCyclePoints; ++k) {
    const double u = 7.0 + span * k / 100.0;
    for (int j = 0; j < 6; ++j) {
      CHECK(c.q(j, k) == doctest::Approx(2.0 + 0.5 * u + j).epsilon(1e-12));
      CHECK(c.qdot(j, k) ==
            doctest::Approx(-1.0 + 0.25 * u - j).epsilon(1e-12));
      CHECK(c.tau(j, k) == doctest::Approx(j + 0.01 * u).epsilon(1e-12));
    }
    CHECK(c.grf(0, k) == doctest::Approx(0.3 * u).epsilon(1e-12));
    CHECK(c.grf(2, k) == doctest::Approx(-0.2 * u).epsilon(1e-12));
    CHECK(c.grf(3, k) == doctest::Approx(350.0 - u).epsilon(1e-12));
    CHECK(c.base_z(k) == doctest::Approx(3.0 - 0.1 * u).epsilon(1e-12));
    CHECK(c.base_pitch(k) == doctest::Approx(0.01 * u).epsilon(1e-12));
  }
  // The endpoints land exactly on the strike samples.
  CHECK(c.q(0, 0) == rec.steps[7].q[3]);
  CHECK(c.q(0, 100) == rec.steps[30].q[3]);
}

TEST_CASE("segmentation falls back to the right foot and reports failures") {
  const auto rec = make_record(70, 0.01, [](int i, GaitStep* s) {
    s->grf_vert[0] = 500.0;  // left never unloads -> no left strikes
    s->grf_vert[1] = (i % 20 < 10) ? 500.0 : 0.0;
  });
  const auto cycles = segment_cycles(rec);
  REQUIRE(cycles.size() == 2);
  CHECK(cycles[0].start == 20);
  CHECK(cycles[0].end == 40);
  CHECK(cycles[1].start == 40);
  CHECK(cycles[1].end == 60);

  const auto flat = make_record(50, 0.01, [](int, GaitStep* s) {
    s->grf_vert[0] = 500.0;
    s->grf_vert[1] = 500.0;
  });
  CHECK_THROWS_AS((void)segment_cycles(flat), MetricsError);
  const auto tiny = make_record(1, 0.01, [](int, GaitStep*) {});
  CHECK_THROWS_AS((void)segment_cycles(tiny), MetricsError);
}

TEST_CASE("the mean cycle averages channels and keeps the last endpoint") {
  GaitCycle a = const_cycle(1.0, 10.0, 100.0, 70.0);
  GaitCycle b = const_cycle(3.0, 30.0, 500.0, 70.0);
  a.start = 5;
  a.end = 25;
  a.duration = 1.0;
  b.start = 25;
  b.end = 45;
  b.duration = 1.2;

  const GaitCycle m = mean_cycle({a, b});
  CHECK(m.q(2, 50) == 2.0);
  CHECK(m.tau(4, 10) == 20.0);
  CHECK(m.grf(1, 99) == 300.0);
  CHECK(m.duration == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(m.end == 45);
  CHECK_THROWS_AS((void)mean_cycle({}), MetricsError);
}

TEST_CASE("the gait error uses dimensionless per-point norms") {
  const GaitCycle ref = const_cycle(0.0, 0.0, 0.0, 70.0);
  const GaitCycle cyc = const_cycle(0.1, 3.0, 50.0, 70.0);
  const GaitError err = compute_error(cyc, ref);

  const double q_expect = 101.0 * 0.1 * std::sqrt(6.0);
  const double tau_scale = 70.0 * 9.81 * 0.85 * 0.1;
  const double tau_expect = 101.0 * 3.0 * std::sqrt(6.0) / tau_scale;
  const double grf_expect = 101.0 * 50.0 * 2.0 / (70.0 * 9.81);
  CHECK(err.q_term == doctest::Approx(q_expect).epsilon(1e-9));
  CHECK(err.tau_term == doctest::Approx(tau_expect).epsilon(1e-9));
  CHECK(err.grf_term == doctest::Approx(grf_expect).epsilon(1e-9));
  CHECK(err.total ==
        doctest::Approx(err.q_term + err.tau_term + err.grf_term).epsilon(1e-12));

  GaitCycle ragged = ref;
  ragged.q = MatrixXd::Zero(6, 50);
  CHECK_THROWS_AS((void)compute_error(ragged, ref), MetricsError);

  // Identical cycles carry zero error.
  const GaitError zero = compute_error(ref, ref);
  CHECK(zero.total == 0.0);
}

TEST_CASE("rmse and the channel summary match hand arithmetic") {
  VectorXd a(4), b(4);
  a << 1.0, 2.0, 3.0, 4.0;
  b << 1.0, 2.0, 3.0, 8.0;
  CHECK(rmse(a, b) == doctest::Approx(2.0).epsilon(1e-12));  // sqrt(16/4)
  CHECK_THROWS_AS((void)rmse(a, VectorXd::Zero(3)), MetricsError);

  // Moments are normalized by each cycle's own mass before pooling.
  GaitCycle heavy = const_cycle(0.4, 70.0 * 0.9, 30.0, 70.0);
  GaitCycle light = const_cycle(0.1, 80.0 * 0.8, 10.0, 80.0);
  const ChannelRmse ch = cycle_rmse(heavy, light);
  CHECK(ch.q == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(ch.moments == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(ch.grf == doctest::Approx(20.0).epsilon(1e-12));

  GaitCycle ragged = light;
  ragged.grf = MatrixXd::Zero(4, 50);
  CHECK_THROWS_AS((void)cycle_rmse(heavy, ragged), MetricsError);

  CHECK(joint_moments(heavy)(3, 77) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("torque loops close on themselves and integrate the joint work") {
  GaitCycle c = const_cycle(0.0, 0.0, 0.0, 70.0);
  for (int i = 0; i < kCyclePoints; ++i) {
    const double t = i / 100.0;
    c.q(2, i) = 0.5 * std::sin(2.0 * M_PI * t);
    c.tau(2, i) = 40.0 * std::cos(2.0 * M_PI * t) + 10.0 * std::sin(4.0 * M_PI * t);
  }
  const TorqueLoop loop = cycle_torque_loop(c, 2);
  REQUIRE(loop.angle.size() == kCyclePoints + 1);
  CHECK(loop.angle[kCyclePoints] == loop.angle[0]);
  CHECK(loop.torque[kCyclePoints] == loop.torque[0]);
  CHECK(loop.markers == std::array<int, 3>{0, 50, 100});

  // Shoelace area and the trapezoidal integral of tau dq differ only by a
  // telescoping boundary term, which vanishes on a closed loop.
  double work = 0.0;
  for (int i = 0; i + 1 < loop.angle.size(); ++i) {
    work += 0.5 * (loop.torque[i] + loop.torque[i + 1]) *
            (loop.angle[i + 1] - loop.angle[i]);
  }
  CHECK(std::abs(loop_area(loop) - work) < 1e-9);

  // An elliptic loop has the known signed area.
  GaitCycle e = const_cycle(0.0, 0.0, 0.0, 70.0);
  const double a = 0.3, b = 25.0;
  for (int i = 0; i < kCyclePoints; ++i) {
    const double t = i / 100.0;
    e.q(0, i) = a * std::cos(2.0 * M_PI * t);
    e.tau(0, i) = b * std::sin(2.0 * M_PI * t);
  }
  const double area = loop_area(cycle_torque_loop(e, 0));
  CHECK(area == doctest::Approx(-M_PI * a * b).epsilon(2e-3));
}

TEST_CASE("a periodic record yields per-cycle metrics and a mean loop") {
  // 1 s cycles at 100 steps each: stance for 70, swing for 30.
  const int period = 100;
  const auto rec = make_record(350, 0.01, [&](int i, GaitStep* s) {
    const int ph = i % period;
    const double t = ph / double(period);
    s->grf_vert[0] = ph < 70 ? 800.0 * std::sin(M_PI * t / 0.7) : 0.0;
    s->grf_vert[1] = ph < 70 ? 0.0 : 500.0;
    for (int j = 0; j < 6; ++j) {
      s->q[3 + j] = std::sin(2.0 * M_PI * t + j);
      s->tau[j] = 20.0 * std::cos(2.0 * M_PI * t + j);
    }
  });

  const auto cycles = segment_cycles(rec);
  REQUIRE(cycles.size() == 2);
  CHECK(cycles[0].end - cycles[0].start == period);
  CHECK(cycles[1].end - cycles[1].start == period);

  // Periodicity makes both cycles identical, so the mean matches either.
  const GaitCycle mean = mean_cycle(cycles);
  CHECK((mean.q - cycles[0].q).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((joint_moments(rec) - mean.tau / 70.0).cwiseAbs().maxCoeff() < 1e-12);

  const TorqueLoop l0 = torque_loop(rec, 0);
  const TorqueLoop l1 = cycle_torque_loop(mean, 0);
  CHECK(l0.angle == l1.angle);
  CHECK(l0.torque == l1.torque);

  const double mv = mean_vertical_grf(mean);
  CHECK(mv > 0.0);
  CHECK(mv == doctest::Approx((mean.grf.row(1) + mean.grf.row(3)).mean())
                  .epsilon(1e-12));
}

TEST_CASE("cycle files round-trip exactly and reject structural damage") {
  GaitCycle c = const_cycle(0.0, 0.0, 0.0, 74.0);
  c.duration = 1.07;
  for (int i = 0; i < kCyclePoints; ++i) {
    const double t = i / 100.0;
    for (int j = 0; j < 6; ++j) {
      c.q(j, i) = std::sin(2.0 * M_PI * t + 0.3 * j);
      c.qdot(j, i) = std::cos(2.0 * M_PI * t - j);
      c.tau(j, i) = 35.0 * std::sin(4.0 * M_PI * t + j);
    }
    for (int g = 0; g < 4; ++g) c.grf(g, i) = 200.0 * std::abs(std::sin(M_PI * t + g));
    c.base_z(i) = 0.9 + 0.02 * std::sin(2.0 * M_PI * t);
    c.base_pitch(i) = 0.05 * std::cos(2.0 * M_PI * t);
  }

  const auto dir = testutil::scratch_dir("metrics_cycle");
  const std::string path = (dir / "cycle.csv").string();
  save_cycle(path, c);
  const GaitCycle back = load_cycle(path);
  CHECK(back.duration == c.duration);
  CHECK(back.body_mass == c.body_mass);
  CHECK(back.leg_length == c.leg_length);
  CHECK(back.q == c.q);
  CHECK(back.qdot == c.qdot);
  CHECK(back.tau == c.tau);
  CHECK(back.grf == c.grf);
  CHECK(back.base_z == c.base_z);
  CHECK(back.base_pitch == c.base_pitch);

  const std::string copy = (dir / "copy.csv").string();
  save_cycle(copy, back);
  CHECK(testutil::read_file(path) == testutil::read_file(copy));

  // Strip the duration metadata line.
  std::string text = testutil::read_file(path);
  const auto pos = text.find("# duration");
  REQUIRE(pos != std::string::npos);
  std::string cut = text;
  cut.erase(pos, cut.find('\n', pos) - pos + 1);
  testutil::write_file((dir / "no_meta.csv").string(), cut);
  CHECK_THROWS_AS((void)load_cycle((dir / "no_meta.csv").string()), MetricsError);

  // Drop the last row.
  std::string shorter = text;
  REQUIRE(shorter.rfind("\n100,") != std::string::npos);
  shorter.erase(shorter.rfind("\n100,"));
  testutil::write_file((dir / "short.csv").string(), shorter);
  CHECK_THROWS_AS((void)load_cycle((dir / "short.csv").string()), MetricsError);

  // Rename a required column.
  std::string renamed = text;
  const auto col = renamed.find("q_hip_l");
  REQUIRE(col != std::string::npos);
  renamed.replace(col, 7, "q_hips_");
  testutil::write_file((dir / "renamed.csv").string(), renamed);
  CHECK_THROWS_AS((void)load_cycle((dir / "renamed.csv").string()), CsvError);

  CHECK(std::string(kJointNames[0]) == "hip_l");
  CHECK(std::string(kJointNames[5]) == "ankle_r");
}
