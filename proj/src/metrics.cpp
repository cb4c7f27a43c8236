#include "gaitsim/metrics.hpp"

#include <cmath>
#include <functional>

#include "gaitsim/csv.hpp"

namespace gaitsim {

const std::array<const char*, 6> kJointNames = {
    "hip_l", "knee_l", "ankle_l", "hip_r", "knee_r", "ankle_r"};

namespace {

constexpr double kGravity = 9.81;

// Linear interpolation of a per-step channel onto the 101-point grid
// spanning [start, end] inclusive.
VectorXd resample(const GaitRecord& record, int start, int end,
                  const std::function<double(const GaitStep&)>& channel) {
  VectorXd out(kCyclePoints);
  const double span = end - start;
  for (int i = 0; i < kCyclePoints; ++i) {
    const double u = start + span * i / double(kCyclePoints - 1);
    const int lo = std::min(static_cast<int>(std::floor(u)), end - 1);
    const double frac = u - lo;
    out(i) = (1.0 - frac) * channel(record.steps[lo]) +
             frac * channel(record.steps[lo + 1]);
  }
  return out;
}

GaitCycle cut_cycle(const GaitRecord& record, int start, int end) {
  GaitCycle cycle;
  cycle.start = start;
  cycle.end = end;
  cycle.duration = (end - start) * record.control_dt;
  cycle.body_mass = record.body_mass;
  cycle.leg_length = record.leg_length;
  cycle.q.resize(6, kCyclePoints);
  cycle.qdot.resize(6, kCyclePoints);
  cycle.tau.resize(6, kCyclePoints);
  cycle.grf.resize(4, kCyclePoints);
  for (int j = 0; j < 6; ++j) {
    cycle.q.row(j) = resample(record, start, end, [&](const GaitStep& s) {
                       return s.q(3 + j);
                     }).transpose();
    cycle.qdot.row(j) = resample(record, start, end, [&](const GaitStep& s) {
                          return s.qdot(3 + j);
                        }).transpose();
    cycle.tau.row(j) = resample(record, start, end, [&](const GaitStep& s) {
                         return s.tau(j);
                       }).transpose();
  }
  for (int f = 0; f < 2; ++f) {
    cycle.grf.row(2 * f) =
        resample(record, start, end, [&](const GaitStep& s) {
          return s.grf_tan[f];
        }).transpose();
    cycle.grf.row(2 * f + 1) =
        resample(record, start, end, [&](const GaitStep& s) {
          return s.grf_vert[f];
        }).transpose();
  }
  cycle.base_z = resample(record, start, end,
                          [](const GaitStep& s) { return s.q(1); });
  cycle.base_pitch = resample(record, start, end,
                              [](const GaitStep& s) { return s.q(2); });
  return cycle;
}

}  // namespace

std::vector<int> detect_heel_strikes(const GaitRecord& record, int foot) {
  const double threshold =
      kStrikeThresholdFrac * record.body_mass * kGravity;
  std::vector<int> strikes;
  // below_start tracks where the current sub-threshold spell began; a rising
  // edge only counts after the debounce interval below the threshold.
  int below_start = -1;
  for (int i = 0; i < record.size(); ++i) {
    const double v = record.steps[i].grf_vert[foot];
    if (v >= threshold) {
      if (below_start >= 0 && i > 0) {
        const double below = (i - below_start) * record.control_dt;
        if (below >= kStrikeDebounce - 1e-12) strikes.push_back(i);
      }
      below_start = -1;
    } else if (below_start < 0) {
      below_start = i;
    }
  }
  return strikes;
}

std::vector<GaitCycle> segment_cycles(const GaitRecord& record) {
  if (record.size() < 2) {
    throw MetricsError("segment_cycles: record too short");
  }
  std::vector<int> strikes = detect_heel_strikes(record, 0);
  if (strikes.size() < 2) strikes = detect_heel_strikes(record, 1);
  if (strikes.size() < 2) {
    throw MetricsError("segment_cycles: fewer than 2 heel strikes");
  }
  std::vector<GaitCycle> cycles;
  for (std::size_t k = 0; k + 1 < strikes.size(); ++k) {
    cycles.push_back(cut_cycle(record, strikes[k], strikes[k + 1]));
  }
  return cycles;
}

GaitCycle mean_cycle(const std::vector<GaitCycle>& cycles) {
  if (cycles.empty()) throw MetricsError("mean_cycle: no cycles");
  GaitCycle out = cycles.front();
  for (std::size_t k = 1; k < cycles.size(); ++k) {
    out.q += cycles[k].q;
    out.qdot += cycles[k].qdot;
    out.tau += cycles[k].tau;
    out.grf += cycles[k].grf;
    out.base_z += cycles[k].base_z;
    out.base_pitch += cycles[k].base_pitch;
    out.duration += cycles[k].duration;
  }
  const double inv = 1.0 / double(cycles.size());
  out.q *= inv;
  out.qdot *= inv;
  out.tau *= inv;
  out.grf *= inv;
  out.base_z *= inv;
  out.base_pitch *= inv;
  out.duration *= inv;
  out.end = cycles.back().end;
  return out;
}

GaitError compute_error(const GaitCycle& cycle, const GaitCycle& reference) {
  if (cycle.q.cols() != kCyclePoints || reference.q.cols() != kCyclePoints) {
    throw MetricsError("compute_error: cycles must be resampled to 101 points");
  }
  const double tau_scale =
      cycle.body_mass * kGravity * cycle.leg_length * 0.1;
  const double grf_scale = cycle.body_mass * kGravity;
  GaitError err;
  for (int i = 0; i < kCyclePoints; ++i) {
    err.q_term += (cycle.q.col(i) - reference.q.col(i)).norm();
    err.tau_term += (cycle.tau.col(i) - reference.tau.col(i)).norm() / tau_scale;
    err.grf_term += (cycle.grf.col(i) - reference.grf.col(i)).norm() / grf_scale;
  }
  err.total = err.q_term + err.tau_term + err.grf_term;
  return err;
}

double rmse(const VectorXd& a, const VectorXd& b) {
  if (a.size() != b.size()) throw MetricsError("rmse: length mismatch");
  return std::sqrt((a - b).squaredNorm() / double(a.size()));
}

ChannelRmse cycle_rmse(const GaitCycle& cycle, const GaitCycle& reference) {
  auto pooled = [](const MatrixXd& a, const MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
      throw MetricsError("cycle_rmse: shape mismatch");
    }
    return std::sqrt((a - b).squaredNorm() / double(a.size()));
  };
  ChannelRmse out;
  out.q = pooled(cycle.q, reference.q);
  out.moments = pooled(cycle.tau / cycle.body_mass,
                       reference.tau / reference.body_mass);
  out.grf = pooled(cycle.grf, reference.grf);
  return out;
}

MatrixXd joint_moments(const GaitCycle& cycle) {
  return cycle.tau / cycle.body_mass;
}

MatrixXd joint_moments(const GaitRecord& record) {
  return joint_moments(mean_cycle(segment_cycles(record)));
}

TorqueLoop cycle_torque_loop(const GaitCycle& cycle, int joint) {
  TorqueLoop loop;
  loop.angle.resize(kCyclePoints + 1);
  loop.torque.resize(kCyclePoints + 1);
  loop.angle.head(kCyclePoints) = cycle.q.row(joint).transpose();
  loop.torque.head(kCyclePoints) = cycle.tau.row(joint).transpose();
  loop.angle(kCyclePoints) = loop.angle(0);
  loop.torque(kCyclePoints) = loop.torque(0);
  return loop;
}

TorqueLoop torque_loop(const GaitRecord& record, int joint) {
  return cycle_torque_loop(mean_cycle(segment_cycles(record)), joint);
}

double loop_area(const TorqueLoop& loop) {
  // Cross-product form of the polygon area, oriented to match the work
  // integral of torque over angle.
  double area = 0.0;
  for (int i = 0; i + 1 < loop.angle.size(); ++i) {
    area += loop.torque(i) * loop.angle(i + 1) -
            loop.torque(i + 1) * loop.angle(i);
  }
  return 0.5 * area;
}

double mean_vertical_grf(const GaitCycle& cycle) {
  return (cycle.grf.row(1) + cycle.grf.row(3)).mean();
}

void save_cycle(const std::string& path, const GaitCycle& cycle) {
  CsvWriter out(path);
  out.meta("duration", format_double(cycle.duration));
  out.meta("body_mass", format_double(cycle.body_mass));
  out.meta("leg_length", format_double(cycle.leg_length));
  std::vector<std::string> cols{"percent"};
  for (const char* j : kJointNames) cols.push_back(std::string("q_") + j);
  for (const char* j : kJointNames) cols.push_back(std::string("qd_") + j);
  for (const char* j : kJointNames) cols.push_back(std::string("tau_") + j);
  cols.insert(cols.end(), {"grf_tan_l", "grf_vert_l", "grf_tan_r",
                           "grf_vert_r", "base_z", "base_pitch"});
  out.header(cols);
  for (int i = 0; i < kCyclePoints; ++i) {
    std::vector<double> row{double(i)};
    for (int j = 0; j < 6; ++j) row.push_back(cycle.q(j, i));
    for (int j = 0; j < 6; ++j) row.push_back(cycle.qdot(j, i));
    for (int j = 0; j < 6; ++j) row.push_back(cycle.tau(j, i));
    for (int c = 0; c < 4; ++c) row.push_back(cycle.grf(c, i));
    row.push_back(cycle.base_z(i));
    row.push_back(cycle.base_pitch(i));
    out.row(row);
  }
  out.flush();
}

GaitCycle load_cycle(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (static_cast<int>(table.rows.size()) != kCyclePoints) {
    throw MetricsError("load_cycle: expected 101 rows in " + path);
  }
  GaitCycle cycle;
  auto meta = [&](const char* key) {
    const auto it = table.meta.find(key);
    if (it == table.meta.end()) {
      throw MetricsError(std::string("load_cycle: missing metadata ") + key);
    }
    return std::stod(it->second);
  };
  cycle.duration = meta("duration");
  cycle.body_mass = meta("body_mass");
  cycle.leg_length = meta("leg_length");
  cycle.end = kCyclePoints - 1;
  cycle.q.resize(6, kCyclePoints);
  cycle.qdot.resize(6, kCyclePoints);
  cycle.tau.resize(6, kCyclePoints);
  cycle.grf.resize(4, kCyclePoints);
  cycle.base_z.resize(kCyclePoints);
  cycle.base_pitch.resize(kCyclePoints);
  std::vector<int> q_cols, qd_cols, tau_cols;
  for (const char* j : kJointNames) {
    q_cols.push_back(table.require_column(std::string("q_") + j));
    qd_cols.push_back(table.require_column(std::string("qd_") + j));
    tau_cols.push_back(table.require_column(std::string("tau_") + j));
  }
  const int grf_cols[4] = {table.require_column("grf_tan_l"),
                           table.require_column("grf_vert_l"),
                           table.require_column("grf_tan_r"),
                           table.require_column("grf_vert_r")};
  const int z_col = table.require_column("base_z");
  const int pitch_col = table.require_column("base_pitch");
  for (int i = 0; i < kCyclePoints; ++i) {
    for (int j = 0; j < 6; ++j) {
      cycle.q(j, i) = table.at(i, q_cols[j]);
      cycle.qdot(j, i) = table.at(i, qd_cols[j]);
      cycle.tau(j, i) = table.at(i, tau_cols[j]);
    }
    for (int c = 0; c < 4; ++c) cycle.grf(c, i) = table.at(i, grf_cols[c]);
    cycle.base_z(i) = table.at(i, z_col);
    cycle.base_pitch(i) = table.at(i, pitch_col);
  }
  return cycle;
}

}  // namespace gaitsim
