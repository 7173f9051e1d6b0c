#pragma once

// Tracking-by-detection on the ground plane.
//
// Per frame: predict every live track, associate by gated Hungarian matching
// on center distance, update matched tracks, coast the rest, spawn tentative
// tracks from leftover detections.

#include <optional>
#include <utility>
#include <span>
#include <string>
#include <vector>

#include "dynkf/kitti_io.hpp"
#include "dynkf/motion_filter.hpp"

namespace dynkf {

enum class TrackStatus { kTentative, kConfirmed, kCoasting, kDead };
std::string to_string(TrackStatus status);

struct TrackerConfig {
  FilterConfig filter;
  double gate_distance = 2.5;  // m
  int min_hits = 3;
  int max_misses = 23;

  void validate() const;
};

struct Track {
  Track(int track_id, MotionFilter motion) : id(track_id), filter(std::move(motion)) {}

  int id = 0;
  MotionFilter filter;
  int hits = 1;
  int misses = 0;
  TrackStatus status = TrackStatus::kTentative;
  DetectionRecord last_detection;  // type, bbox, score of the latest match
  Vector2 predicted = Vector2::Zero();
};

struct Assignment {
  std::vector<std::pair<int, int>> matches;  // (track index, detection index)
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_detections;
};

/// Optimal one-to-one matching of predicted positions to detections within `gate`.
Assignment associate(const std::vector<Vector2>& predicted,
                     const std::vector<Vector2>& detections, double gate);

struct TrackSnapshot {
  int frame = 0;
  int id = 0;
  TrackStatus status = TrackStatus::kConfirmed;
  Vector2 position = Vector2::Zero();   // posterior when updated, prediction when coasting
  Vector2 predicted = Vector2::Zero();  // prior for this frame
  std::optional<Vector2> measured;      // matched detection position
  AuxState aux;
  DetectionRecord detection;  // latest matched detection (type, bbox, score)
  bool updated = false;
};

class Tracker {
 public:
  explicit Tracker(const TrackerConfig& config);

  /// Processes one frame. Frame indices must strictly increase.
  /// Returns snapshots of confirmed and coasting tracks, ascending by id.
  std::vector<TrackSnapshot> step(int frame, std::span<const DetectionRecord> detections);

  const std::vector<Track>& tracks() const { return tracks_; }
  const TrackerConfig& config() const { return config_; }
  int next_id() const { return next_id_; }

 private:
  TrackerConfig config_;
  std::vector<Track> tracks_;
  int next_id_ = 0;
  std::optional<int> last_frame_;
};

/// Output of running a tracker over a whole sequence.
struct TrackingRun {
  std::vector<std::vector<TrackSnapshot>> frames;

  Frames<LabeledRecord> to_records() const;
  std::vector<TrajectoryRow> trajectory_rows() const;
};

/// Runs a fresh tracker over every frame; the filter time step is taken from the dataset.
TrackingRun run_tracker(const SequenceDataset& dataset, const TrackerConfig& config);

LabeledRecord to_record(const TrackSnapshot& snapshot);

}  // namespace dynkf
