// SPDX-License-Identifier: Apache-2.0
#include "gagcn/motion.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gagcn/text.hpp"

namespace gagcn {

void Skeleton::validate() const {
  if (joint_names.empty()) throw ConfigError("skeleton: no joints");
  if (parent.size() != joint_names.size()) {
    throw ConfigError("skeleton: parent list length does not match joint count");
  }
  if (channels < 1) throw ConfigError("skeleton: channel count must be >= 1");
  int roots = 0;
  const int n = joints();
  for (int j = 0; j < n; ++j) {
    const int p = parent[static_cast<std::size_t>(j)];
    if (p == -1) {
      roots += 1;
    } else if (p < 0 || p >= n || p == j) {
      throw ConfigError("skeleton: joint " + joint_names[static_cast<std::size_t>(j)] +
                        " has invalid parent index " + std::to_string(p));
    }
  }
  if (roots != 1) {
    throw ConfigError("skeleton: expected exactly one root, found " + std::to_string(roots));
  }
  // Walking up from every joint must reach the root without cycling.
  for (int j = 0; j < n; ++j) {
    int cur = j;
    int hops = 0;
    while (parent[static_cast<std::size_t>(cur)] != -1) {
      cur = parent[static_cast<std::size_t>(cur)];
      if (++hops > n) {
        throw ConfigError("skeleton: cycle detected through joint " +
                          joint_names[static_cast<std::size_t>(j)]);
      }
    }
  }
}

Skeleton Skeleton::toy12() {
  Skeleton s;
  s.joint_names = {"pelvis",     "spine",   "neck",       "head",   "l_shoulder", "l_elbow",
                   "r_shoulder", "r_elbow", "l_hip",      "l_knee", "r_hip",      "r_knee"};
  s.parent = {-1, 0, 1, 2, 2, 4, 2, 6, 0, 8, 0, 10};
  s.channels = 3;
  s.validate();
  return s;
}

std::string to_string(Representation r) {
  return r == Representation::coords3d ? "coords3d" : "expmap";
}

Representation representation_from_string(const std::string& s) {
  if (s == "coords3d") return Representation::coords3d;
  if (s == "expmap") return Representation::expmap;
  throw ConfigError("unknown representation '" + s + "' (expected coords3d or expmap)");
}

void WindowSet::append(const WindowSet& other) {
  if (windows.empty()) {
    input_frames = other.input_frames;
    target_frames = other.target_frames;
  }
  if (!other.windows.empty() &&
      (other.input_frames != input_frames || other.target_frames != target_frames)) {
    throw ConfigError("window sets have different (input, target) lengths");
  }
  windows.insert(windows.end(), other.windows.begin(), other.windows.end());
}

MotionSequence downsample(const MotionSequence& seq, double target_hz) {
  if (target_hz <= 0.0) throw ConfigError("downsample: target rate must be positive");
  if (target_hz > seq.rate_hz) {
    throw ConfigError("downsample: target rate " + num_str(target_hz) +
                      " Hz exceeds source rate " + num_str(seq.rate_hz) + " Hz");
  }
  const double ratio = seq.rate_hz / target_hz;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9) {
    throw ConfigError("downsample: rate ratio " + num_str(seq.rate_hz) + "/" + num_str(target_hz) +
                      " = " + num_str(ratio) +
                      " is not an integer stride; choose a target that divides the source rate "
                      "(e.g. 50 -> 25 Hz is stride 2)");
  }
  const int stride = static_cast<int>(rounded);
  if (stride == 1) return seq;
  const int f = seq.frame_count();
  const int joints = seq.frames.extent(1), channels = seq.frames.extent(2);
  const int kept = (f + stride - 1) / stride;
  MotionSequence out = seq;
  out.frames = Tensor<double>({kept, joints, channels});
  for (int i = 0; i < kept; ++i) {
    const int src = i * stride;
    for (int n = 0; n < joints; ++n) {
      for (int c = 0; c < channels; ++c) out.frames.at(i, n, c) = seq.frames.at(src, n, c);
    }
  }
  out.rate_hz = target_hz;
  return out;
}

WindowSet make_windows(const MotionSequence& seq, int input_frames, int target_frames,
                       int stride) {
  if (input_frames < 1 || target_frames < 1) {
    throw ConfigError("make_windows: input and target lengths must be >= 1");
  }
  if (stride < 1) throw ConfigError("make_windows: stride must be >= 1");
  WindowSet ws;
  ws.input_frames = input_frames;
  ws.target_frames = target_frames;
  const int f = seq.frame_count();
  const int need = input_frames + target_frames;
  if (f < need) {
    std::fprintf(stderr, "warning: sequence '%s' has %d frames, need %d for a window; skipped\n",
                 seq.action_label.c_str(), f, need);
    return ws;
  }
  const int joints = seq.frames.extent(1), channels = seq.frames.extent(2);
  auto slice = [&](int start, int count) {
    Tensor<double> out({count, joints, channels});
    for (int i = 0; i < count; ++i) {
      for (int n = 0; n < joints; ++n) {
        for (int c = 0; c < channels; ++c) out.at(i, n, c) = seq.frames.at(start + i, n, c);
      }
    }
    return out;
  };
  for (int start = 0; start + need <= f; start += stride) {
    Window w;
    w.input = slice(start, input_frames);
    w.target = slice(start + input_frames, target_frames);
    w.label = seq.action_label;
    w.start = start;
    ws.windows.push_back(std::move(w));
  }
  return ws;
}

Tensor<double> mean_speed_feature(const Tensor<double>& frames_nc) {
  if (frames_nc.rank() != 3) {
    throw ShapeError("mean_speed_feature: expected [F x N x C], got " + frames_nc.shape_str());
  }
  const int f = frames_nc.extent(0), joints = frames_nc.extent(1), channels = frames_nc.extent(2);
  Tensor<double> feature({joints});
  if (f < 2) return feature;
  for (int n = 0; n < joints; ++n) {
    double acc = 0.0;
    for (int i = 1; i < f; ++i) {
      double ss = 0.0;
      for (int c = 0; c < channels; ++c) {
        const double d = frames_nc.at(i, n, c) - frames_nc.at(i - 1, n, c);
        ss += d * d;
      }
      acc += std::sqrt(ss);
    }
    feature[static_cast<std::size_t>(n)] = acc / static_cast<double>(f - 1);
  }
  return feature;
}

// ---- skeleton descriptor ----------------------------------------------------

namespace {
constexpr const char* kSkeletonMagic = "gagcn-skeleton v1";
}

std::filesystem::path default_skeleton_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".skel");
  return p;
}

Skeleton load_skeleton(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open skeleton descriptor '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || std::string(trim(line)) != kSkeletonMagic) {
    throw IoError("skeleton descriptor '" + path.string() + "': bad or missing header (expected '" +
                  std::string(kSkeletonMagic) + "')");
  }
  Skeleton s;
  s.channels = 0;
  int declared_joints = -1;
  int lineno = 1;
  while (std::getline(in, line)) {
    lineno += 1;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split(t, ' ');
    const std::string ctx = path.string() + ":" + std::to_string(lineno);
    if (fields[0] == "channels" && fields.size() == 2) {
      s.channels = static_cast<int>(parse_long(fields[1], ctx));
    } else if (fields[0] == "joints" && fields.size() == 2) {
      declared_joints = static_cast<int>(parse_long(fields[1], ctx));
    } else if (fields[0] == "joint" && fields.size() == 3) {
      s.joint_names.push_back(fields[1]);
      s.parent.push_back(static_cast<int>(parse_long(fields[2], ctx)));
    } else {
      throw IoError(ctx + ": unrecognized skeleton line '" + std::string(t) + "'");
    }
  }
  if (declared_joints >= 0 && declared_joints != s.joints()) {
    throw IoError("skeleton descriptor '" + path.string() + "': declares " +
                  std::to_string(declared_joints) + " joints but lists " +
                  std::to_string(s.joints()));
  }
  s.validate();
  return s;
}

void save_skeleton(const std::filesystem::path& path, const Skeleton& skeleton) {
  skeleton.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write skeleton descriptor '" + path.string() + "'");
  out << kSkeletonMagic << "\n";
  out << "channels " << skeleton.channels << "\n";
  out << "joints " << skeleton.joints() << "\n";
  for (int j = 0; j < skeleton.joints(); ++j) {
    out << "joint " << skeleton.joint_names[static_cast<std::size_t>(j)] << " "
        << skeleton.parent[static_cast<std::size_t>(j)] << "\n";
  }
  if (!out) throw IoError("failed writing skeleton descriptor '" + path.string() + "'");
}

// ---- motion CSV ---------------------------------------------------------------

namespace {

std::string expected_header(const Skeleton& s) {
  std::string h = "frame";
  for (const auto& name : s.joint_names) {
    for (int c = 0; c < s.channels; ++c) {
      h += "," + name + "_c" + std::to_string(c);
    }
  }
  return h;
}

}  // namespace

MotionSequence load_motion_csv(const std::filesystem::path& path, Representation rep,
                               const std::optional<std::filesystem::path>& skeleton_path) {
  const std::filesystem::path skel_path =
      skeleton_path.has_value() ? *skeleton_path : default_skeleton_path(path);
  const Skeleton skeleton = load_skeleton(skel_path);

  std::ifstream in(path);
  if (!in) throw IoError("cannot open motion CSV '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("motion CSV '" + path.string() + "': empty file");
  if (std::string(trim(line)) != expected_header(skeleton)) {
    throw IoError("motion CSV '" + path.string() +
                  "': header does not match skeleton descriptor (expected '" +
                  expected_header(skeleton) + "')");
  }
  const int joints = skeleton.joints();
  const int channels = skeleton.channels;
  const std::size_t fields_per_row = 1 + static_cast<std::size_t>(joints) * channels;
  std::vector<double> data;
  int rows = 0;
  int lineno = 1;
  while (std::getline(in, line)) {
    lineno += 1;
    if (trim(line).empty()) continue;
    const auto fields = split(trim(line), ',');
    const std::string ctx = path.string() + ":" + std::to_string(lineno);
    if (fields.size() != fields_per_row) {
      throw IoError(ctx + ": expected " + std::to_string(fields_per_row) + " fields, got " +
                    std::to_string(fields.size()));
    }
    for (std::size_t i = 1; i < fields.size(); ++i) data.push_back(parse_double(fields[i], ctx));
    rows += 1;
  }
  if (rows == 0) throw IoError("motion CSV '" + path.string() + "': no frames");

  MotionSequence seq;
  seq.skeleton = skeleton;
  seq.frames = Tensor<double>({rows, joints, channels}, std::move(data));
  seq.rep = rep;
  seq.action_label = path.stem().string();
  if (rep == Representation::expmap) {
    int violations = 0;
    for (int f = 0; f < rows; ++f) {
      for (int n = 0; n < joints; ++n) {
        double ss = 0.0;
        for (int c = 0; c < channels; ++c) ss += seq.frames.at(f, n, c) * seq.frames.at(f, n, c);
        if (std::sqrt(ss) >= 3.14159265358979323846) violations += 1;
      }
    }
    if (violations > 0) {
      std::fprintf(stderr,
                   "warning: '%s': %d joint-frames have exponential-map norm >= pi; "
                   "representation may be inconsistent\n",
                   path.string().c_str(), violations);
    }
  }
  return seq;
}

MotionSequence load_coords_csv(const std::filesystem::path& path,
                               const std::optional<std::filesystem::path>& skeleton_path) {
  return load_motion_csv(path, Representation::coords3d, skeleton_path);
}

MotionSequence load_expmap_csv(const std::filesystem::path& path,
                               const std::optional<std::filesystem::path>& skeleton_path) {
  return load_motion_csv(path, Representation::expmap, skeleton_path);
}

void save_motion_csv(const std::filesystem::path& path, const MotionSequence& seq) {
  if (seq.frames.rank() != 3) {
    throw ShapeError("save_motion_csv: frames must be [F x N x C], got " + seq.frames.shape_str());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write motion CSV '" + path.string() + "'");
  out << expected_header(seq.skeleton) << "\n";
  const int f = seq.frame_count();
  const int joints = seq.frames.extent(1), channels = seq.frames.extent(2);
  for (int i = 0; i < f; ++i) {
    out << i;
    for (int n = 0; n < joints; ++n) {
      for (int c = 0; c < channels; ++c) out << "," << num_str(seq.frames.at(i, n, c));
    }
    out << "\n";
  }
  if (!out) throw IoError("failed writing motion CSV '" + path.string() + "'");
  save_skeleton(default_skeleton_path(path), seq.skeleton);
}

}  // namespace gagcn
