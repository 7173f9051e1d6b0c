#pragma once

// Synthetic ground truth with piecewise motion regimes and Gaussian
// position noise. Integration is the closed-form Taylor step, so the only
// difference between truth and detections is the injected noise.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dynkf/kitti_io.hpp"
#include "dynkf/occlusion.hpp"

namespace dynkf {

enum class RegimeKind { kStationary, kConstantVelocity, kConstantAcceleration, kConstantJerk };
RegimeKind regime_kind_from_string(const std::string& s);  // stationary | cv | ca | cj
std::string to_string(RegimeKind kind);

/// A run of frames over which one derivative is held. Entering a segment sets
/// the held derivative to `parameter` and zeroes the higher ones; lower
/// derivatives carry over, so position stays continuous.
struct RegimeSegment {
  RegimeKind kind = RegimeKind::kConstantVelocity;
  int duration = 1;                       // frames
  Vector2 parameter = Vector2::Zero();    // m/s, m/s^2 or m/s^3 per axis
};

struct KinematicState {
  Vector2 position = Vector2::Zero();
  Vector2 velocity = Vector2::Zero();
  Vector2 acceleration = Vector2::Zero();
  Vector2 jerk = Vector2::Zero();
};

struct ObjectSpec {
  int start_frame = 0;
  KinematicState initial;
  std::vector<RegimeSegment> segments;
  std::string type = "Car";
  Dimensions dims{1.5, 1.6, 3.9};
  double elevation = 1.5;  // camera y (m)
  double yaw = 0.0;
};

struct ScenarioSpec {
  std::string name = "synthetic";
  double dt = 0.1;
  Vector2 sigma{0.3, 0.3};  // per-axis measurement noise (m)
  std::uint64_t seed = 0;
  std::vector<ObjectSpec> objects;
  std::optional<OcclusionSpec> occlusion;

  void validate() const;
};

struct TruthFrame {
  int frame = 0;
  KinematicState state;
  RegimeKind regime = RegimeKind::kStationary;  // regime of the step leaving this frame
};

struct ObjectTruth {
  int id = 0;
  std::vector<TruthFrame> frames;
};

struct SynthOutput {
  SequenceDataset dataset;  // noisy detections plus ground truth
  std::vector<ObjectTruth> truth;
  /// Detections after the scenario's occlusion spec, when it has one.
  std::optional<Frames<DetectionRecord>> occluded;
};

/// Exact kinematics for one object (frames relative to its start).
std::vector<TruthFrame> integrate_object(const ObjectSpec& object, double dt);

/// Deterministic for a given spec (including seed).
SynthOutput generate(const ScenarioSpec& spec);

/// JSON scenario description; see README for the schema.
ScenarioSpec parse_scenario_text(const std::string& json_text);
ScenarioSpec load_scenario(const std::filesystem::path& path);

}  // namespace dynkf
