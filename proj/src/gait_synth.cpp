#include <cmath>
#include <stdexcept>
#include <vector>

#include "gaitsim/biped.hpp"
#include "gaitsim/reference.hpp"

namespace gaitsim {

namespace {

constexpr int kFine = 512;     // canonical-curve grid for the Fourier fit
constexpr int kHarmonics = 3;  // truncation order for joint trajectories
constexpr int kNodes = 101;    // output frames, "% gait cycle" convention

// Periodic Gaussian bump centered at c with width w (cycle fractions).
double bump(double phi, double c, double w) {
  double d = std::abs(phi - c);
  d = std::min(d, 1.0 - d);
  return std::exp(-0.5 * d * d / (w * w));
}

struct Fourier {
  double a0 = 0.0;
  double a[kHarmonics] = {0.0, 0.0, 0.0};
  double b[kHarmonics] = {0.0, 0.0, 0.0};

  double eval(double phi) const {
    double y = a0;
    for (int k = 0; k < kHarmonics; ++k) {
      const double w = 2.0 * M_PI * (k + 1) * phi;
      y += a[k] * std::cos(w) + b[k] * std::sin(w);
    }
    return y;
  }
};

template <typename F>
Fourier project(F&& f) {
  Fourier out;
  for (int i = 0; i < kFine; ++i) {
    const double phi = static_cast<double>(i) / kFine;
    const double y = f(phi);
    out.a0 += y / kFine;
    for (int k = 0; k < kHarmonics; ++k) {
      const double w = 2.0 * M_PI * (k + 1) * phi;
      out.a[k] += 2.0 * y * std::cos(w) / kFine;
      out.b[k] += 2.0 * y * std::sin(w) / kFine;
    }
  }
  return out;
}

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

}  // namespace

void GaitParams::validate() const {
  if (stride < 0.0) throw std::invalid_argument("GaitParams: stride must be >= 0");
  if (cycle_duration < 0.0)
    throw std::invalid_argument("GaitParams: cycle_duration must be >= 0");
  if (amp_scale < 0.0) throw std::invalid_argument("GaitParams: amp_scale must be >= 0");
}

GaitParams default_gait_params(const SubjectSpec& subject) {
  subject.validate();
  const ParamVector nominal = nominal_params(subject.height_m());
  const double leg = nominal.thigh_len + nominal.shank_len + nominal.ankle_height;
  GaitParams g;
  // Pendular cadence scaling: cycle time grows with sqrt(leg length); the
  // constant puts a 1.72 m adult near 1.1 s per cycle.
  g.cycle_duration = 3.6 * std::sqrt(leg / 9.81);
  g.stride = subject.speed * g.cycle_duration;
  return g;
}

ReferenceMotion synthesize_gait(const SubjectSpec& subject, const GaitParams& params_in) {
  subject.validate();
  params_in.validate();
  GaitParams gp = params_in;
  const GaitParams defaults = default_gait_params(subject);
  if (gp.cycle_duration == 0.0) gp.cycle_duration = defaults.cycle_duration;
  if (gp.stride == 0.0 && gp.amp_scale > 0.0) gp.stride = defaults.stride;

  const ParamVector nominal = nominal_params(subject.height_m());
  const Biped biped = build_biped(subject, nominal);
  if (gp.stride > 2.0 * biped.leg_length)
    throw std::invalid_argument("synthesize_gait: stride exceeds 2 x leg length");

  // Hip amplitude from stride: with near-straight legs a cycle covers about
  // 4 L sin(A) of ground, L being the hip-ankle distance.
  const double hip_ankle = nominal.thigh_len + nominal.shank_len;
  const double a_hip = std::asin(clamp(gp.stride / (4.0 * hip_ankle), 0.0, 0.95));
  // Knee/ankle amplitudes track stride moderately (shallower for slow gaits).
  const double m_amp =
      gp.amp_scale *
      (0.55 + 0.45 * clamp(gp.stride / (0.78 * subject.height_m()), 0.3, 1.6));
  const double k_swing =
      gp.amp_scale * clamp(0.82 * gp.stride, 0.25, 1.35);  // rad, swing flexion

  // Normative sagittal shapes, heel strike of the reference leg at phase 0;
  // knee flexion is negative, ankle dorsiflexion positive.
  const Fourier hip = project([&](double phi) { return a_hip * std::cos(2.0 * M_PI * phi); });
  const Fourier knee = project([&](double phi) {
    return -(0.30 * m_amp * bump(phi, 0.15, 0.09) + k_swing * bump(phi, 0.72, 0.10));
  });
  const Fourier ankle = project([&](double phi) {
    return m_amp * (-0.09 * bump(phi, 0.04, 0.05) + 0.17 * bump(phi, 0.48, 0.12) -
                    0.32 * bump(phi, 0.63, 0.06));
  });

  const auto joints_at = [&](double phi) {
    VectorXd j(kNumJoints);
    j << hip.eval(phi), knee.eval(phi), ankle.eval(phi),      // left leg
        hip.eval(phi + 0.5), knee.eval(phi + 0.5), ankle.eval(phi + 0.5);
    return j;
  };

  // Pelvis height from the ground condition: with the base at z = 0 find
  // how far the lowest sole point hangs, then smooth over the cycle and
  // lift so no frame penetrates.
  std::vector<double> z_raw(kFine);
  for (int i = 0; i < kFine; ++i) {
    const double phi = static_cast<double>(i) / kFine;
    VectorXd q = VectorXd::Zero(kNq);
    q.tail(kNumJoints) = joints_at(phi);
    const Kinematics kin =
        compute_kinematics(biped.model, q, VectorXd::Zero(kNq));
    double lowest = std::numeric_limits<double>::infinity();
    for (const ContactPoint& cp : biped.contact_points)
      lowest = std::min(lowest,
                        world_point(biped.model, kin, cp.body, cp.local).y());
    z_raw[i] = -lowest;
  }
  Fourier base_z = project([&](double phi) {
    return z_raw[static_cast<int>(phi * kFine + 0.5) % kFine];
  });
  double lift = 0.0;
  for (int i = 0; i < kFine; ++i)
    lift = std::max(lift, z_raw[i] - base_z.eval(static_cast<double>(i) / kFine));
  base_z.a0 += lift;

  ReferenceMotion m;
  m.cycle_duration = gp.cycle_duration;
  m.speed = gp.stride / gp.cycle_duration;
  m.phase.resize(kNodes);
  m.frames.resize(kNodes);
  for (int i = 0; i < kNodes; ++i) {
    const double phi = static_cast<double>(i) / (kNodes - 1);
    m.phase[i] = phi;
    VectorXd q = VectorXd::Zero(kNq);
    q[0] = gp.stride * phi;
    q[1] = base_z.eval(phi);
    q.tail(kNumJoints) = joints_at(phi);

    ReferenceFrame& f = m.frames[i];
    f.qhat.resize(kRefPoseDim);
    f.qhat[0] = q[1];
    f.qhat[1] = q[2];
    f.qhat.tail(kNumJoints) = q.tail(kNumJoints);

    DynamicsState s;
    s.q = q;
    s.qdot = VectorXd::Zero(kNq);
    f.com = com_state(biped.model, s).position;
    const Kinematics kin = compute_kinematics(biped.model, q, s.qdot);
    for (int e = 0; e < kNumEndEffectors; ++e)
      f.ee[e] = world_point(biped.model, kin, biped.contact_points[e].body,
                            biped.contact_points[e].local);
  }
  m.validate();
  return m;
}

}  // namespace gaitsim
