// SPDX-License-Identifier: Apache-2.0
#include <array>
#include <cmath>

#include "gagcn/motion.hpp"

// Parametric toy motions driven through a 12-joint forward-kinematics chain.
// All coordinates are millimeters; classes are periodic (walk, wave,
// figure-8) or transition-based (sit_down).

namespace gagcn {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

struct Vec3 {
  double x = 0, y = 0, z = 0;
};

struct Mat3 {
  // row-major 3x3
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 rot_x(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return Mat3{{1, 0, 0, 0, c, -s, 0, s, c}};
  }

  static Mat3 rot_z(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return Mat3{{c, -s, 0, s, c, 0, 0, 0, 1}};
  }

  Mat3 operator*(const Mat3& o) const {
    Mat3 r{{0, 0, 0, 0, 0, 0, 0, 0, 0}};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double acc = 0;
        for (int k = 0; k < 3; ++k) acc += m[static_cast<std::size_t>(i * 3 + k)] * o.m[static_cast<std::size_t>(k * 3 + j)];
        r.m[static_cast<std::size_t>(i * 3 + j)] = acc;
      }
    }
    return r;
  }

  Vec3 apply(const Vec3& v) const {
    return Vec3{m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }
};

enum Joint {
  kPelvis = 0,
  kSpine,
  kNeck,
  kHead,
  kLShoulder,
  kLElbow,
  kRShoulder,
  kRElbow,
  kLHip,
  kLKnee,
  kRHip,
  kRKnee,
  kJointCount
};

// Rest offsets from the parent joint, T-pose-ish with arms hanging.
const std::array<Vec3, kJointCount> kOffsets = {{
    {0, 0, 0},        // pelvis (root)
    {0, 250, 0},      // spine
    {0, 250, 0},      // neck
    {0, 150, 0},      // head
    {-180, -20, 0},   // l_shoulder
    {0, -280, 0},     // l_elbow
    {180, -20, 0},    // r_shoulder
    {0, -280, 0},     // r_elbow
    {-110, -30, 0},   // l_hip
    {0, -450, 0},     // l_knee
    {110, -30, 0},    // r_hip
    {0, -450, 0},     // r_knee
}};

const std::array<int, kJointCount> kParents = {-1, 0, 1, 2, 2, 4, 2, 6, 0, 8, 0, 10};

constexpr double kBaseHeight = 1000.0;
constexpr int kWalkPeriod = 24;
constexpr int kWavePeriod = 12;
constexpr int kFigure8Period = 48;

struct Pose {
  Vec3 root;                                  // pelvis world position
  std::array<double, kJointCount> angle{};    // local rotation angle
  std::array<char, kJointCount> axis{};       // 'x' or 'z'
};

void walk_limbs(Pose& pose, double phi, double a_leg, double a_knee, double a_arm) {
  pose.axis.fill('x');
  pose.angle[kLHip] = a_leg * std::sin(phi);
  pose.angle[kRHip] = a_leg * std::sin(phi + kTau / 2);
  pose.angle[kLKnee] = a_knee * (0.5 - 0.5 * std::cos(phi));
  pose.angle[kRKnee] = a_knee * (0.5 - 0.5 * std::cos(phi + kTau / 2));
  pose.angle[kLShoulder] = a_arm * std::sin(phi + kTau / 2);
  pose.angle[kRShoulder] = a_arm * std::sin(phi);
  pose.angle[kSpine] = 0.04 * std::sin(2 * phi);
}

void write_pose(Tensor<double>& frames, int f, const Pose& pose) {
  std::array<Vec3, kJointCount> pos;
  std::array<Mat3, kJointCount> rot;
  for (int j = 0; j < kJointCount; ++j) {
    const Mat3 local =
        pose.axis[static_cast<std::size_t>(j)] == 'z' ? Mat3::rot_z(pose.angle[static_cast<std::size_t>(j)])
                                                      : Mat3::rot_x(pose.angle[static_cast<std::size_t>(j)]);
    if (j == kPelvis) {
      pos[static_cast<std::size_t>(j)] = pose.root;
      rot[static_cast<std::size_t>(j)] = local;
    } else {
      const int p = kParents[static_cast<std::size_t>(j)];
      const Vec3 off = rot[static_cast<std::size_t>(p)].apply(kOffsets[static_cast<std::size_t>(j)]);
      pos[static_cast<std::size_t>(j)] = Vec3{pos[static_cast<std::size_t>(p)].x + off.x,
                                              pos[static_cast<std::size_t>(p)].y + off.y,
                                              pos[static_cast<std::size_t>(p)].z + off.z};
      rot[static_cast<std::size_t>(j)] = rot[static_cast<std::size_t>(p)] * local;
    }
  }
  for (int j = 0; j < kJointCount; ++j) {
    frames.at(f, j, 0) = pos[static_cast<std::size_t>(j)].x;
    frames.at(f, j, 1) = pos[static_cast<std::size_t>(j)].y;
    frames.at(f, j, 2) = pos[static_cast<std::size_t>(j)].z;
  }
}

}  // namespace

std::string to_string(SynthClass c) {
  switch (c) {
    case SynthClass::walk_cycle:
      return "walk_cycle";
    case SynthClass::wave_arm:
      return "wave_arm";
    case SynthClass::sit_down:
      return "sit_down";
    case SynthClass::figure8_drift:
      return "figure8_drift";
  }
  return "walk_cycle";
}

SynthClass synth_class_from_string(const std::string& s) {
  if (s == "walk_cycle") return SynthClass::walk_cycle;
  if (s == "wave_arm") return SynthClass::wave_arm;
  if (s == "sit_down") return SynthClass::sit_down;
  if (s == "figure8_drift") return SynthClass::figure8_drift;
  throw ConfigError("unknown synthetic class '" + s +
                    "' (expected walk_cycle, wave_arm, sit_down or figure8_drift)");
}

const std::vector<std::string>& synth_class_names() {
  static const std::vector<std::string> names = {"walk_cycle", "wave_arm", "sit_down",
                                                 "figure8_drift"};
  return names;
}

int synth_period_frames(SynthClass c) {
  switch (c) {
    case SynthClass::walk_cycle:
      return kWalkPeriod;
    case SynthClass::wave_arm:
      return kWavePeriod;
    case SynthClass::figure8_drift:
      return kFigure8Period;
    case SynthClass::sit_down:
      return 0;
  }
  return 0;
}

MotionSequence synth_generate(SynthClass c, int duration_frames, double noise_scale, Rng& rng) {
  if (duration_frames < 1) throw ConfigError("synth_generate: duration must be >= 1 frame");
  MotionSequence seq;
  seq.skeleton = Skeleton::toy12();
  seq.rate_hz = 25.0;
  seq.rep = Representation::coords3d;
  seq.action_label = to_string(c);
  seq.frames = Tensor<double>({duration_frames, kJointCount, 3});

  // Sequence-level variation, drawn before any frame so the curve family is
  // fixed for the whole sequence.
  const double u0 = rng.uniform();
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  const double phase0 = kTau * rng.uniform();

  for (int f = 0; f < duration_frames; ++f) {
    Pose pose;
    pose.axis.fill('x');
    pose.root = Vec3{0, kBaseHeight, 0};
    switch (c) {
      case SynthClass::walk_cycle: {
        const double phi = kTau * f / kWalkPeriod + phase0;
        const double a_leg = 0.55 + 0.15 * u0;
        const double a_knee = 0.70 + 0.20 * u1;
        const double a_arm = 0.35 + 0.10 * u2;
        walk_limbs(pose, phi, a_leg, a_knee, a_arm);
        pose.root.y += (20.0 + 10.0 * u1) * std::sin(2 * phi);
        break;
      }
      case SynthClass::wave_arm: {
        const double phi = kTau * f / kWavePeriod + phase0;
        pose.axis[kRShoulder] = 'z';
        pose.axis[kRElbow] = 'z';
        pose.angle[kRShoulder] = -(1.1 + 0.25 * u0) + (0.40 + 0.15 * u1) * std::sin(phi);
        pose.angle[kRElbow] = -(0.30 + 0.25 * u2) * std::sin(phi + kTau / 4);
        break;
      }
      case SynthClass::sit_down: {
        const double f0 = 0.5 * duration_frames;
        const double k = 10.0 / std::max(1.0, 0.25 * duration_frames);
        const double s = 1.0 / (1.0 + std::exp(-k * (f - f0)));
        const double drop = 420.0 + 60.0 * u0;
        pose.root.y += -drop * s;
        pose.angle[kLHip] = -(1.15 + 0.10 * u1) * s;
        pose.angle[kRHip] = -(1.15 + 0.10 * u1) * s;
        pose.angle[kLKnee] = (1.25 + 0.10 * u2) * s;
        pose.angle[kRKnee] = (1.25 + 0.10 * u2) * s;
        pose.angle[kSpine] = 0.25 * s;
        break;
      }
      case SynthClass::figure8_drift: {
        const double phi8 = kTau * f / kFigure8Period + phase0;
        const double phi = kTau * f / kWalkPeriod + phase0;
        const double radius = 260.0 + 80.0 * u0;
        const double drift = 1.5 + 1.0 * u1;
        walk_limbs(pose, phi, 0.55 + 0.10 * u2, 0.75, 0.35);
        pose.root.x += radius * std::sin(phi8) + drift * f;
        pose.root.z += radius * std::sin(2 * phi8);
        pose.root.y += 20.0 * std::sin(2 * phi);
        break;
      }
    }
    write_pose(seq.frames, f, pose);
  }

  if (noise_scale > 0.0) {
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
      seq.frames[i] += noise_scale * rng.normal();
    }
  }
  return seq;
}

}  // namespace gagcn
