#pragma once

// KITTI tracking text format.
//
// Detection line (17 fields):
//   frame type truncated occluded alpha x1 y1 x2 y2 h w l x y z rotation_y score
// Label / track line (17 fields, or 18 with a trailing score):
//   frame track_id type truncated occluded alpha x1 y1 x2 y2 h w l x y z rotation_y [score]
//
// Locations are camera coordinates (x right, y down, z forward). Tracking runs
// on the ground plane (lateral = camera x, longitudinal = camera z) with
// camera y carried as elevation; the mapping is a coordinate permutation and
// therefore exact in both directions.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dynkf/filter.hpp"

namespace dynkf {

struct Dimensions {
  double height = 0.0;  // m
  double width = 0.0;   // m
  double length = 0.0;  // m
  friend bool operator==(const Dimensions&, const Dimensions&) = default;
};

struct DetectionRecord {
  int frame = 0;
  std::string type = "Car";
  double truncated = 0.0;
  int occluded = 0;
  double alpha = 0.0;
  std::array<double, 4> bbox{0.0, 0.0, 0.0, 0.0};  // x1 y1 x2 y2 (px)
  Dimensions dims;
  Eigen::Vector3d location = Eigen::Vector3d::Zero();  // camera frame (m)
  double rotation_y = 0.0;  // rad
  double score = 1.0;

  Vector2 ground_position() const { return {location.x(), location.z()}; }
};

/// Ground-truth label and tracker output record. `track_id` is -1 only for
/// DontCare regions.
struct LabeledRecord : DetectionRecord {
  int track_id = 0;
};
using GroundTruthRecord = LabeledRecord;

template <class Record>
using Frames = std::vector<std::vector<Record>>;

struct SequenceDataset {
  std::string id;
  double dt = 0.1;  // s, KITTI runs at 10 Hz
  Frames<DetectionRecord> detections;
  std::optional<Frames<GroundTruthRecord>> ground_truth;

  int frame_count() const { return static_cast<int>(detections.size()); }
};

/// Ground-plane measurement of a record (position plus box attributes).
Measurement to_measurement(const DetectionRecord& record);
/// Inverse of the ground-plane mapping.
Eigen::Vector3d camera_location(const Vector2& ground, double elevation);

bool is_dont_care(const DetectionRecord& record);

/// Text form parsers. `source` names the input in error messages.
Frames<DetectionRecord> parse_detection_text(const std::string& text,
                                             const std::string& source = "<text>");
Frames<LabeledRecord> parse_label_text(const std::string& text,
                                       const std::string& source = "<text>");

/// Reads a detection file; the dataset id is the file stem.
/// Throws IoError if unreadable, ParseError (line, column) on malformed input.
SequenceDataset parse_detections(const std::filesystem::path& path, double dt = 0.1);
Frames<LabeledRecord> parse_labels(const std::filesystem::path& path);

std::string format_detections(const Frames<DetectionRecord>& frames);
/// Frames ascending; records sorted by track id within a frame.
std::string format_tracks(const Frames<LabeledRecord>& frames, bool with_score = true);

void write_detections(const Frames<DetectionRecord>& frames, const std::filesystem::path& path);
void write_tracks(const Frames<LabeledRecord>& frames, const std::filesystem::path& path,
                  bool with_score = true);

/// Pads (never truncates) to `count` frames.
template <class Record>
void pad_frames(Frames<Record>& frames, int count) {
  if (static_cast<int>(frames.size()) < count) frames.resize(static_cast<std::size_t>(count));
}

enum class TrajectorySource { kGroundTruth, kMeasurement, kPredicted, kUpdated };
std::string to_string(TrajectorySource source);

struct TrajectoryRow {
  int frame = 0;
  int track_id = 0;
  double x = 0.0;
  double y = 0.0;
  TrajectorySource source = TrajectorySource::kPredicted;
};

/// CSV with header `frame,track_id,x,y,source`, rows ordered by
/// (frame, track_id, source name), values printed at round-trip precision.
std::string format_trajectory_csv(std::vector<TrajectoryRow> rows);
void export_trajectory_csv(const std::vector<TrajectoryRow>& rows,
                           const std::filesystem::path& path);
std::vector<TrajectoryRow> parse_trajectory_csv(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace dynkf
