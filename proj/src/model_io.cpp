#include "gaitsim/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gaitsim/csv.hpp"  // format_double

namespace gaitsim {

namespace {

constexpr const char* kHeader = "gaitsim-model v1";

std::string fmt(double v) { return format_double(v); }

double parse_num(const std::string& tok, const std::string& key) {
  try {
    size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ModelIoError("model file: bad number '" + tok + "' in " + key + " record");
  }
}

int parse_int(const std::string& tok, const std::string& key) {
  const double v = parse_num(tok, key);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ModelIoError("model file: expected integer in " + key + " record");
  return i;
}

}  // namespace

void save_model(const std::string& path, const Biped& biped,
                const ContactParams& contact) {
  std::ofstream out(path);
  if (!out) throw ModelIoError("cannot open model file for writing: " + path);
  const ArticulatedModel& m = biped.model;
  const SubjectSpec& s = biped.subject;

  out << kHeader << "\n";
  out << "subject " << s.id << " " << s.sex << " " << fmt(s.mass) << " "
      << fmt(s.height_cm) << " " << s.age << " " << fmt(s.speed) << "\n";
  const Eigen::VectorXd pv = biped.params.flatten();
  for (int i = 0; i < ParamVector::kDim; ++i)
    out << "param " << ParamVector::names()[i] << " " << fmt(pv[i]) << "\n";
  out << "gravity " << fmt(m.gravity.x()) << " " << fmt(m.gravity.y()) << "\n";
  out << "limit_stop " << fmt(m.limit_stiffness) << " " << fmt(m.limit_damping) << "\n";
  for (const SegmentSpec& seg : m.segments)
    out << "segment " << seg.name << " " << fmt(seg.mass) << " " << fmt(seg.length)
        << " " << fmt(seg.com_offset.x()) << " " << fmt(seg.com_offset.y()) << " "
        << fmt(seg.inertia) << "\n";
  for (int seg = 1; seg < m.num_segments(); ++seg)
    out << "tree " << seg << " " << m.parent[seg] << " "
        << fmt(m.joint_anchor[seg].x()) << " " << fmt(m.joint_anchor[seg].y())
        << "\n";
  for (int j = 0; j < m.num_joints(); ++j)
    out << "joint " << j << " " << fmt(m.joint_damping[j]) << " "
        << fmt(m.torque_limit[j]) << " " << fmt(m.joint_lo[j]) << " "
        << fmt(m.joint_hi[j]) << "\n";
  for (int j = 0; j < m.num_joints(); ++j)
    out << "gains " << j << " " << fmt(biped.gains.kp[j]) << " "
        << fmt(biped.gains.kd[j]) << "\n";
  for (const ContactPoint& cp : biped.contact_points)
    out << "contact_point " << cp.body << " " << fmt(cp.local.x()) << " "
        << fmt(cp.local.y()) << "\n";
  out << "contact " << fmt(contact.stiffness) << " " << fmt(contact.exponent)
      << " " << fmt(contact.dissipation) << " " << fmt(contact.friction_coeff)
      << " " << fmt(contact.v_reg) << "\n";
  out << "leg_length " << fmt(biped.leg_length) << "\n";
  out << "standing_base_z " << fmt(biped.standing_base_z) << "\n";
  if (!out.flush()) throw ModelIoError("write failed: " + path);
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelIoError("cannot open model file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw ModelIoError("model file: missing or unsupported version header");

  ModelFile mf;
  ArticulatedModel& m = mf.biped.model;
  m.segments.clear();
  m.parent = {-1};
  m.joint_anchor = {Vector2d::Zero()};
  m.joint_damping.clear();
  m.torque_limit.clear();
  m.joint_lo.clear();
  m.joint_hi.clear();
  mf.biped.contact_points.clear();

  Eigen::VectorXd params(ParamVector::kDim);
  int params_seen = 0;
  std::vector<double> kp, kd;
  bool have_subject = false, have_contact = false;

  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    auto want = [&](size_t n) {
      if (tok.size() != n + 1)
        throw ModelIoError("model file line " + std::to_string(lineno) + ": " + key +
                           " expects " + std::to_string(n) + " fields");
    };
    if (key == "subject") {
      want(6);
      SubjectSpec& s = mf.biped.subject;
      s.id = parse_int(tok[1], key);
      s.sex = tok[2];
      s.mass = parse_num(tok[3], key);
      s.height_cm = parse_num(tok[4], key);
      s.age = parse_int(tok[5], key);
      s.speed = parse_num(tok[6], key);
      have_subject = true;
    } else if (key == "param") {
      want(2);
      const auto& names = ParamVector::names();
      if (params_seen >= ParamVector::kDim || tok[1] != names[params_seen])
        throw ModelIoError("model file: param records must appear once each, in order (got '" +
                           tok[1] + "')");
      params[params_seen++] = parse_num(tok[2], key);
    } else if (key == "gravity") {
      want(2);
      m.gravity = {parse_num(tok[1], key), parse_num(tok[2], key)};
    } else if (key == "limit_stop") {
      want(2);
      m.limit_stiffness = parse_num(tok[1], key);
      m.limit_damping = parse_num(tok[2], key);
    } else if (key == "segment") {
      want(6);
      SegmentSpec seg;
      seg.name = tok[1];
      seg.mass = parse_num(tok[2], key);
      seg.length = parse_num(tok[3], key);
      seg.com_offset = {parse_num(tok[4], key), parse_num(tok[5], key)};
      seg.inertia = parse_num(tok[6], key);
      m.segments.push_back(seg);
    } else if (key == "tree") {
      want(4);
      const int child = parse_int(tok[1], key);
      if (child != static_cast<int>(m.parent.size()))
        throw ModelIoError("model file: tree records must be in segment order");
      m.parent.push_back(parse_int(tok[2], key));
      m.joint_anchor.push_back({parse_num(tok[3], key), parse_num(tok[4], key)});
    } else if (key == "joint") {
      want(5);
      const int j = parse_int(tok[1], key);
      if (j != static_cast<int>(m.joint_damping.size()))
        throw ModelIoError("model file: joint records must be in order");
      m.joint_damping.push_back(parse_num(tok[2], key));
      m.torque_limit.push_back(parse_num(tok[3], key));
      m.joint_lo.push_back(parse_num(tok[4], key));
      m.joint_hi.push_back(parse_num(tok[5], key));
    } else if (key == "gains") {
      want(3);
      const int j = parse_int(tok[1], key);
      if (j != static_cast<int>(kp.size()))
        throw ModelIoError("model file: gains records must be in order");
      kp.push_back(parse_num(tok[2], key));
      kd.push_back(parse_num(tok[3], key));
    } else if (key == "contact_point") {
      want(3);
      ContactPoint cp;
      cp.body = parse_int(tok[1], key);
      cp.local = {parse_num(tok[2], key), parse_num(tok[3], key)};
      mf.biped.contact_points.push_back(cp);
    } else if (key == "contact") {
      want(5);
      mf.contact.stiffness = parse_num(tok[1], key);
      mf.contact.exponent = parse_num(tok[2], key);
      mf.contact.dissipation = parse_num(tok[3], key);
      mf.contact.friction_coeff = parse_num(tok[4], key);
      mf.contact.v_reg = parse_num(tok[5], key);
      have_contact = true;
    } else if (key == "leg_length") {
      want(1);
      mf.biped.leg_length = parse_num(tok[1], key);
    } else if (key == "standing_base_z") {
      want(1);
      mf.biped.standing_base_z = parse_num(tok[1], key);
    } else {
      throw ModelIoError("model file line " + std::to_string(lineno) +
                         ": unknown record key '" + key + "'");
    }
  }

  if (!have_subject) throw ModelIoError("model file: missing subject record");
  if (params_seen != ParamVector::kDim)
    throw ModelIoError("model file: expected " + std::to_string(ParamVector::kDim) +
                       " param records");
  if (!have_contact) throw ModelIoError("model file: missing contact record");
  mf.biped.params = ParamVector::unflatten(params);
  if (m.joint_damping.size() != static_cast<size_t>(m.num_joints()))
    throw ModelIoError("model file: joint record count does not match segments");
  if (kp.size() != static_cast<size_t>(m.num_joints()))
    throw ModelIoError("model file: gains record count does not match joints");
  mf.biped.gains.kp = Eigen::Map<VectorXd>(kp.data(), kp.size());
  mf.biped.gains.kd = Eigen::Map<VectorXd>(kd.data(), kd.size());
  m.validate();
  mf.contact.validate();
  for (const ContactPoint& cp : mf.biped.contact_points)
    if (cp.body < 0 || cp.body >= m.num_segments())
      throw ModelIoError("model file: contact_point body out of range");
  return mf;
}

}  // namespace gaitsim
