#include "dynkf/tracker.hpp"

#include <algorithm>

#include "dynkf/assignment.hpp"

namespace dynkf {

std::string to_string(TrackStatus status) {
  switch (status) {
    case TrackStatus::kTentative:
      return "tentative";
    case TrackStatus::kConfirmed:
      return "confirmed";
    case TrackStatus::kCoasting:
      return "coasting";
    case TrackStatus::kDead:
      return "dead";
  }
  return "unknown";
}

void TrackerConfig::validate() const {
  filter.validate();
  if (!(gate_distance > 0.0)) throw ConfigError("gate_distance must be positive");
  if (min_hits < 1) throw ConfigError("min_hits must be >= 1");
  if (max_misses < 0) throw ConfigError("max_misses must be >= 0");
}

Assignment associate(const std::vector<Vector2>& predicted,
                     const std::vector<Vector2>& detections, double gate) {
  const auto gated = gated_assignment(distance_matrix(predicted, detections), gate);
  return Assignment{gated.pairs, gated.unmatched_rows, gated.unmatched_cols};
}

Tracker::Tracker(const TrackerConfig& config) : config_(config) { config_.validate(); }

std::vector<TrackSnapshot> Tracker::step(int frame, std::span<const DetectionRecord> detections) {
  if (last_frame_ && frame <= *last_frame_) {
    throw ContractError("frames must be presented in strictly increasing order (got " +
                        std::to_string(frame) + " after " + std::to_string(*last_frame_) + ")");
  }
  last_frame_ = frame;

  std::vector<Vector2> predicted;
  predicted.reserve(tracks_.size());
  for (auto& track : tracks_) {
    track.filter.predict();
    track.predicted = track.filter.position();
    predicted.push_back(track.predicted);
  }

  std::vector<Vector2> positions;
  positions.reserve(detections.size());
  for (const auto& d : detections) positions.push_back(d.ground_position());

  const Assignment assignment = associate(predicted, positions, config_.gate_distance);

  std::vector<std::optional<Vector2>> measured(tracks_.size());
  for (const auto& [ti, di] : assignment.matches) {
    Track& track = tracks_[static_cast<std::size_t>(ti)];
    const DetectionRecord& det = detections[static_cast<std::size_t>(di)];
    track.filter.update(to_measurement(det));
    track.last_detection = det;
    measured[static_cast<std::size_t>(ti)] = positions[static_cast<std::size_t>(di)];
    ++track.hits;
    track.misses = 0;
    if (track.status == TrackStatus::kCoasting ||
        (track.status == TrackStatus::kTentative && track.hits >= config_.min_hits)) {
      track.status = TrackStatus::kConfirmed;
    }
  }
  for (int ti : assignment.unmatched_tracks) {
    Track& track = tracks_[static_cast<std::size_t>(ti)];
    ++track.misses;
    if (track.status == TrackStatus::kTentative || track.misses > config_.max_misses) {
      track.status = TrackStatus::kDead;
    } else {
      track.status = TrackStatus::kCoasting;
    }
  }

  std::vector<TrackSnapshot> out;
  const auto snapshot = [&](const Track& track, const std::optional<Vector2>& meas) {
    TrackSnapshot s;
    s.frame = frame;
    s.id = track.id;
    s.status = track.status;
    s.position = track.filter.position();
    s.predicted = track.predicted;
    s.measured = meas;
    s.aux = track.filter.aux();
    s.detection = track.last_detection;
    s.updated = meas.has_value();
    return s;
  };

  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    const Track& track = tracks_[i];
    if (track.status == TrackStatus::kConfirmed || track.status == TrackStatus::kCoasting) {
      out.push_back(snapshot(track, measured[i]));
    }
  }
  std::erase_if(tracks_, [](const Track& t) { return t.status == TrackStatus::kDead; });

  for (int di : assignment.unmatched_detections) {
    const DetectionRecord& det = detections[static_cast<std::size_t>(di)];
    Track track(next_id_++, MotionFilter(config_.filter, to_measurement(det)));
    track.last_detection = det;
    track.predicted = track.filter.position();
    track.status = config_.min_hits <= 1 ? TrackStatus::kConfirmed : TrackStatus::kTentative;
    if (track.status == TrackStatus::kConfirmed) {
      out.push_back(snapshot(track, positions[static_cast<std::size_t>(di)]));
    }
    tracks_.push_back(std::move(track));
  }
  return out;
}

LabeledRecord to_record(const TrackSnapshot& s) {
  LabeledRecord r;
  static_cast<DetectionRecord&>(r) = s.detection;
  r.frame = s.frame;
  r.track_id = s.id;
  r.dims = Dimensions{s.aux.height, s.aux.width, s.aux.length};
  r.location = camera_location(s.position, s.aux.elevation);
  r.rotation_y = s.aux.yaw;
  return r;
}

Frames<LabeledRecord> TrackingRun::to_records() const {
  Frames<LabeledRecord> out(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (const auto& s : frames[f]) out[f].push_back(to_record(s));
  }
  return out;
}

std::vector<TrajectoryRow> TrackingRun::trajectory_rows() const {
  std::vector<TrajectoryRow> rows;
  for (const auto& frame : frames) {
    for (const auto& s : frame) {
      rows.push_back({s.frame, s.id, s.predicted.x(), s.predicted.y(), TrajectorySource::kPredicted});
      if (s.updated) {
        rows.push_back({s.frame, s.id, s.position.x(), s.position.y(), TrajectorySource::kUpdated});
      }
      if (s.measured) {
        rows.push_back(
            {s.frame, s.id, s.measured->x(), s.measured->y(), TrajectorySource::kMeasurement});
      }
    }
  }
  return rows;
}

TrackingRun run_tracker(const SequenceDataset& dataset, const TrackerConfig& config) {
  TrackerConfig cfg = config;
  cfg.filter.dt = dataset.dt;
  Tracker tracker(cfg);
  TrackingRun run;
  run.frames.reserve(dataset.detections.size());
  for (std::size_t f = 0; f < dataset.detections.size(); ++f) {
    run.frames.push_back(tracker.step(static_cast<int>(f), dataset.detections[f]));
  }
  return run;
}

}  // namespace dynkf
