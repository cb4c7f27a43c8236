#include "gaitsim/gait_record.hpp"

#include <cmath>
#include <stdexcept>

#include "gaitsim/biped.hpp"
#include "gaitsim/csv.hpp"

namespace gaitsim {

namespace {

std::vector<std::string> record_columns() {
  std::vector<std::string> cols = {"time", "phi"};
  const char* joints[kNumJoints] = {"hip_l", "knee_l", "ankle_l",
                                    "hip_r", "knee_r", "ankle_r"};
  cols.insert(cols.end(), {"base_x", "base_z", "base_pitch"});
  for (const char* j : joints) cols.push_back(std::string("q_") + j);
  cols.insert(cols.end(), {"vel_base_x", "vel_base_z", "vel_base_pitch"});
  for (const char* j : joints) cols.push_back(std::string("qd_") + j);
  for (const char* j : joints) cols.push_back(std::string("tau_") + j);
  for (const char* f : {"l", "r"}) {
    cols.push_back(std::string("grf_tan_") + f);
    cols.push_back(std::string("grf_vert_") + f);
    cols.push_back(std::string("cop_x_") + f);
  }
  cols.insert(cols.end(), {"r_q", "r_com", "r_ee", "r_tau", "r_total"});
  return cols;
}

}  // namespace

void save_record(const std::string& path, const GaitRecord& record) {
  CsvWriter w(path);
  w.meta("schema", "gaitsim-record v1");
  w.meta("control_dt", format_double(record.control_dt));
  w.meta("body_mass", format_double(record.body_mass));
  w.meta("leg_length", format_double(record.leg_length));
  w.header(record_columns());
  for (const GaitStep& s : record.steps) {
    std::vector<double> row = {s.time, s.phi};
    for (int i = 0; i < kNq; ++i) row.push_back(s.q[i]);
    for (int i = 0; i < kNq; ++i) row.push_back(s.qdot[i]);
    for (int i = 0; i < kNumJoints; ++i) row.push_back(s.tau[i]);
    for (int f = 0; f < 2; ++f) {
      row.push_back(s.grf_tan[f]);
      row.push_back(s.grf_vert[f]);
      row.push_back(s.cop_x[f]);
    }
    row.insert(row.end(), {s.reward.q_term, s.reward.com_term, s.reward.ee_term,
                           s.reward.tau_penalty, s.reward.total});
    w.row(row);
  }
  w.flush();
}

GaitRecord load_record(const std::string& path) {
  CsvTable t = read_csv(path);
  GaitRecord r;
  const auto meta_num = [&](const char* key) {
    auto it = t.meta.find(key);
    if (it == t.meta.end())
      throw CsvError(std::string("record file missing meta '") + key + "'");
    return std::stod(it->second);
  };
  r.control_dt = meta_num("control_dt");
  r.body_mass = meta_num("body_mass");
  r.leg_length = meta_num("leg_length");

  const std::vector<std::string> cols = record_columns();
  if (t.columns != cols) throw CsvError("record file: unexpected column set");
  for (const auto& row : t.rows) {
    GaitStep s;
    int k = 0;
    s.time = row[k++];
    s.phi = row[k++];
    s.q.resize(kNq);
    for (int i = 0; i < kNq; ++i) s.q[i] = row[k++];
    s.qdot.resize(kNq);
    for (int i = 0; i < kNq; ++i) s.qdot[i] = row[k++];
    s.tau.resize(kNumJoints);
    for (int i = 0; i < kNumJoints; ++i) s.tau[i] = row[k++];
    for (int f = 0; f < 2; ++f) {
      s.grf_tan[f] = row[k++];
      s.grf_vert[f] = row[k++];
      s.cop_x[f] = row[k++];
    }
    s.reward.q_term = row[k++];
    s.reward.com_term = row[k++];
    s.reward.ee_term = row[k++];
    s.reward.tau_penalty = row[k++];
    s.reward.total = row[k++];
    r.steps.push_back(std::move(s));
  }
  return r;
}

}  // namespace gaitsim
