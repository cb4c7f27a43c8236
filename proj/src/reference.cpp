#include "gaitsim/reference.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gaitsim/csv.hpp"

namespace gaitsim {

namespace {

constexpr double kPeriodicityTol = 0.05;  // rad per joint, first vs last frame

const std::vector<std::string>& reference_columns() {
  static const std::vector<std::string> cols = {
      "phase",    "base_z",   "base_pitch", "hip_l",    "knee_l",
      "ankle_l",  "hip_r",    "knee_r",     "ankle_r",  "com_x",
      "com_z",    "heel_l_x", "heel_l_z",   "toe_l_x",  "toe_l_z",
      "heel_r_x", "heel_r_z", "toe_r_x",    "toe_r_z"};
  return cols;
}

ReferenceFrame lerp(const ReferenceFrame& a, const ReferenceFrame& b, double t) {
  ReferenceFrame f;
  f.qhat = (1.0 - t) * a.qhat + t * b.qhat;
  f.com = (1.0 - t) * a.com + t * b.com;
  for (int e = 0; e < kNumEndEffectors; ++e)
    f.ee[e] = (1.0 - t) * a.ee[e] + t * b.ee[e];
  return f;
}

}  // namespace

void ReferenceMotion::validate() const {
  if (frames.size() < 20)
    throw std::invalid_argument("ReferenceMotion: need at least 20 frames");
  if (phase.size() != frames.size())
    throw std::invalid_argument("ReferenceMotion: phase/frame count mismatch");
  if (cycle_duration <= 0.0)
    throw std::invalid_argument("ReferenceMotion: cycle_duration must be positive");
  if (phase.front() != 0.0)
    throw std::invalid_argument("ReferenceMotion: phase must start at 0");
  for (size_t i = 0; i < phase.size(); ++i) {
    if (!(phase[i] >= 0.0 && phase[i] <= 1.0 + 1e-12))
      throw std::invalid_argument("ReferenceMotion: phase outside [0, 1]");
    if (i > 0 && phase[i] <= phase[i - 1])
      throw std::invalid_argument("ReferenceMotion: phase must be strictly increasing");
  }
  // Uniform spacing in phase.
  const double spacing = phase.size() > 1 ? phase[1] - phase[0] : 0.0;
  for (size_t i = 1; i < phase.size(); ++i)
    if (std::abs(phase[i] - phase[i - 1] - spacing) > 1e-9)
      throw std::invalid_argument("ReferenceMotion: frames must be uniformly spaced");
  for (const ReferenceFrame& f : frames) {
    if (f.qhat.size() != kRefPoseDim)
      throw std::invalid_argument("ReferenceMotion: frame pose dimension mismatch");
    if (!f.qhat.allFinite() || !f.com.allFinite())
      throw std::invalid_argument("ReferenceMotion: non-finite frame");
    for (const auto& e : f.ee)
      if (!e.allFinite())
        throw std::invalid_argument("ReferenceMotion: non-finite end effector");
  }
  // Cyclic: joint poses of first and last frame agree.
  const Eigen::VectorXd dq = frames.front().qhat - frames.back().qhat;
  for (int j = 2; j < kRefPoseDim; ++j)
    if (std::abs(dq[j]) > kPeriodicityTol)
      throw std::invalid_argument(
          "ReferenceMotion: first/last frame differ beyond periodicity tolerance");
}

ReferenceFrame ReferenceMotion::sample(double phi) const {
  phi -= std::floor(phi);  // wrap to [0, 1)
  // Find the bracketing segment; nodes are sorted.
  const size_t n = phase.size();
  if (phi >= phase.back()) {
    // Wrap segment: last node -> first node at phase 1, with the first
    // frame shifted forward by one stride.
    const double span = 1.0 - phase.back() + phase.front();
    if (span <= 0.0) return frames.back();
    const double t = (phi - phase.back()) / span;
    ReferenceFrame first = frames.front();
    const double s = stride();
    first.com.x() += s;
    for (auto& e : first.ee) e.x() += s;
    return lerp(frames.back(), first, t);
  }
  size_t hi = 1;
  while (phase[hi] <= phi) ++hi;  // phase.back() > phi, so hi < n
  (void)n;
  const size_t lo = hi - 1;
  const double t = (phi - phase[lo]) / (phase[hi] - phase[lo]);
  if (t == 0.0) return frames[lo];
  return lerp(frames[lo], frames[hi], t);
}

ReferenceMotion load_reference(const std::string& path) {
  CsvTable table = read_csv(path);
  const auto meta_num = [&](const std::string& key) {
    auto it = table.meta.find(key);
    if (it == table.meta.end())
      throw ReferenceError("reference file missing meta '" + key + "': " + path);
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      throw ReferenceError("reference file: bad meta value for '" + key + "'");
    }
  };

  ReferenceMotion m;
  m.cycle_duration = meta_num("cycle_duration");
  m.speed = meta_num("speed");

  std::vector<int> col;
  for (const std::string& name : reference_columns()) {
    const int c = table.column_index(name);
    if (c < 0) throw ReferenceError("reference file missing column '" + name + "'");
    col.push_back(c);
  }
  if (table.rows.empty()) throw ReferenceError("reference file has no rows");

  double prev_phase = -1.0;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    for (size_t c = 0; c < col.size(); ++c)
      if (!std::isfinite(table.at(r, col[c])))
        throw ReferenceError("reference file: non-finite value at row " +
                             std::to_string(r + 1) + ", column '" +
                             reference_columns()[c] + "'");
    const double phi = table.at(r, col[0]);
    if (phi <= prev_phase)
      throw ReferenceError("reference file: phase not increasing at row " +
                           std::to_string(r + 1));
    prev_phase = phi;

    ReferenceFrame f;
    f.qhat.resize(kRefPoseDim);
    for (int j = 0; j < kRefPoseDim; ++j) f.qhat[j] = table.at(r, col[1 + j]);
    f.com = {table.at(r, col[9]), table.at(r, col[10])};
    for (int e = 0; e < kNumEndEffectors; ++e)
      f.ee[e] = {table.at(r, col[11 + 2 * e]), table.at(r, col[12 + 2 * e])};
    m.phase.push_back(phi);
    m.frames.push_back(std::move(f));
  }
  m.validate();
  return m;
}

void save_reference(const std::string& path, const ReferenceMotion& motion) {
  motion.validate();
  CsvWriter w(path);
  w.meta("schema", "gaitsim-reference v1");
  w.meta("cycle_duration", format_double(motion.cycle_duration));
  w.meta("speed", format_double(motion.speed));
  w.header(reference_columns());
  for (size_t i = 0; i < motion.frames.size(); ++i) {
    const ReferenceFrame& f = motion.frames[i];
    std::vector<double> row;
    row.reserve(reference_columns().size());
    row.push_back(motion.phase[i]);
    for (int j = 0; j < kRefPoseDim; ++j) row.push_back(f.qhat[j]);
    row.push_back(f.com.x());
    row.push_back(f.com.y());
    for (const auto& e : f.ee) {
      row.push_back(e.x());
      row.push_back(e.y());
    }
    w.row(row);
  }
  w.flush();
}

// The roster mixes a text column (sex) with numbers, so it gets its own
// small parser instead of the numeric CsvTable.
std::vector<SubjectSpec> load_subjects(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ReferenceError("cannot open subject roster: " + path);

  const auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) {
      const size_t a = field.find_first_not_of(" \t\r");
      const size_t b = field.find_last_not_of(" \t\r");
      out.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
    }
    return out;
  };
  const auto num = [&](const std::string& tok, int lineno) {
    try {
      size_t pos = 0;
      const double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ReferenceError("subject roster line " + std::to_string(lineno) +
                           ": bad number '" + tok + "'");
    }
  };

  std::string line;
  int lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    header = split(line);
    break;
  }
  const std::vector<std::string> expected = {"id",  "sex", "mass_kg",
                                             "height_cm", "age", "speed_mps"};
  if (header != expected)
    throw ReferenceError("subject roster: unexpected header in " + path);

  std::vector<SubjectSpec> roster;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> tok = split(line);
    if (tok.size() != expected.size())
      throw ReferenceError("subject roster line " + std::to_string(lineno) +
                           ": expected " + std::to_string(expected.size()) +
                           " fields");
    SubjectSpec s;
    s.id = static_cast<int>(num(tok[0], lineno));
    s.sex = tok[1];
    s.mass = num(tok[2], lineno);
    s.height_cm = num(tok[3], lineno);
    s.age = static_cast<int>(num(tok[4], lineno));
    s.speed = num(tok[5], lineno);
    s.validate();
    roster.push_back(s);
  }
  return roster;
}

const SubjectSpec& find_subject(const std::vector<SubjectSpec>& roster, int id) {
  for (const SubjectSpec& s : roster)
    if (s.id == id) return s;
  throw ReferenceError("subject id " + std::to_string(id) + " not in roster");
}

}  // namespace gaitsim
