// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gagcn/rng.hpp"
#include "gagcn/tensor.hpp"

// Skeleton and sequence data model, synthetic generator, neutral CSV
// ingestion, downsampling and windowing. Sequences are stored frame-major
// [F x N x C] in binary64.

namespace gagcn {

struct Skeleton {
  std::vector<std::string> joint_names;
  std::vector<int> parent;  // -1 for the single root
  int channels = 3;

  int joints() const { return static_cast<int>(joint_names.size()); }
  void validate() const;  // parent indices must form a tree rooted at exactly one -1
  bool operator==(const Skeleton&) const = default;

  /// 12-joint toy biped used by the synthetic generator.
  static Skeleton toy12();
};

enum class Representation { coords3d, expmap };

std::string to_string(Representation r);
Representation representation_from_string(const std::string& s);

struct MotionSequence {
  Skeleton skeleton;
  Tensor<double> frames;  // [F x N x C]
  double rate_hz = 25.0;
  Representation rep = Representation::coords3d;
  std::string action_label;

  int frame_count() const { return frames.rank() == 3 ? frames.extent(0) : 0; }
};

struct Window {
  Tensor<double> input;   // [T x N x C]
  Tensor<double> target;  // [t x N x C], abuts the input slice
  std::string label;
  int start = 0;
};

struct WindowSet {
  std::vector<Window> windows;
  int input_frames = 0;
  int target_frames = 0;

  bool empty() const { return windows.empty(); }
  std::size_t size() const { return windows.size(); }
  void append(const WindowSet& other);
};

/// Keep every round(rate/target)-th frame. The ratio must be integral
/// (e.g. 50 -> 25 Hz is stride 2); anything else is rejected.
MotionSequence downsample(const MotionSequence& seq, double target_hz);

/// Contiguous (input, target) windows with the given stride. Sequences
/// shorter than input+target frames yield an empty set with a warning.
WindowSet make_windows(const MotionSequence& seq, int input_frames, int target_frames, int stride);

enum class SynthClass { walk_cycle, wave_arm, sit_down, figure8_drift };

std::string to_string(SynthClass c);
SynthClass synth_class_from_string(const std::string& s);  // ConfigError on unknown
const std::vector<std::string>& synth_class_names();

/// Base cycle length in frames of the periodic part of a class (walk 24,
/// wave 12, figure-8 48); 0 for aperiodic sit_down.
int synth_period_frames(SynthClass c);

/// Kinematic toy sequence: a 12-joint skeleton animated by class-specific
/// parametric curves through a forward-kinematics chain, plus additive
/// Gaussian noise. Deterministic per Rng state; coordinates in millimeters.
MotionSequence synth_generate(SynthClass c, int duration_frames, double noise_scale, Rng& rng);

/// Per-joint mean frame-to-frame displacement magnitude of a window input,
/// the feature behind the class-separability check.
Tensor<double> mean_speed_feature(const Tensor<double>& frames_nc);

// ---- neutral CSV + skeleton descriptor files --------------------------------
//
// Motion CSV: header `frame,<joint>_c0,...`, one row per frame, numbers as
// decimal text, UTF-8, LF endings. Skeleton descriptor: versioned text file
// listing channel count and joint (name, parent) pairs. Loaders look for the
// descriptor at the CSV path with its extension replaced by ".skel" unless an
// explicit path is given.

std::filesystem::path default_skeleton_path(const std::filesystem::path& csv_path);

Skeleton load_skeleton(const std::filesystem::path& path);
void save_skeleton(const std::filesystem::path& path, const Skeleton& skeleton);

MotionSequence load_motion_csv(const std::filesystem::path& path, Representation rep,
                               const std::optional<std::filesystem::path>& skeleton_path = {});
MotionSequence load_coords_csv(const std::filesystem::path& path,
                               const std::optional<std::filesystem::path>& skeleton_path = {});
MotionSequence load_expmap_csv(const std::filesystem::path& path,
                               const std::optional<std::filesystem::path>& skeleton_path = {});

/// Writes the CSV and its sidecar skeleton descriptor.
void save_motion_csv(const std::filesystem::path& path, const MotionSequence& seq);

}  // namespace gagcn
