#pragma once

// Tracking metrics on ground-plane center distance: CLEAR-MOT counters and
// MOTA, identity metrics (IDF1/IDP/IDR), localization error, and per-frame
// latency of two tracker configurations.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dynkf/kitti_io.hpp"
#include "dynkf/tracker.hpp"

namespace dynkf {

struct FrameObjects {
  std::vector<int> ids;
  std::vector<Vector2> positions;

  std::size_t size() const { return ids.size(); }
  void add(int id, const Vector2& p) {
    ids.push_back(id);
    positions.push_back(p);
  }
};
using ObjectSequence = std::vector<FrameObjects>;

/// Ground-plane positions per frame; DontCare records are skipped.
ObjectSequence to_object_sequence(const Frames<LabeledRecord>& frames);

struct MotSummary {
  std::optional<double> mota;  // nullopt when the ground truth is empty
  std::optional<double> motp;  // mean matched distance (m)
  int false_positives = 0;
  int false_negatives = 0;
  int id_switches = 0;
  int ground_truth = 0;
  int matches = 0;
  double threshold = 2.0;
};

/// CLEAR-MOT. Correspondences from the previous frame are kept while still
/// within the threshold; remaining pairs are matched by gated Hungarian
/// assignment. A switch is counted when a ground-truth object is matched to a
/// different hypothesis id than at its previous match.
MotSummary clearmot(const ObjectSequence& gt, const ObjectSequence& hyp, double threshold);

struct IdSummary {
  std::optional<double> idf1;
  std::optional<double> idp;
  std::optional<double> idr;
  int idtp = 0;
  int idfp = 0;
  int idfn = 0;
};

/// Identity metrics from the whole-sequence optimal one-to-one id mapping.
IdSummary idf1(const ObjectSequence& gt, const ObjectSequence& hyp, double threshold);

using Trajectory = std::map<int, Vector2>;  // frame -> position
using OcclusionMask = std::set<std::pair<int, int>>;  // (track id, frame)

struct PhaseStats {
  int count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1) standard deviation
};

struct TrackLocalization {
  int id = 0;
  PhaseStats observed;
  PhaseStats occluded;
  std::vector<std::pair<int, double>> errors;  // (frame, error), all phases
};

struct LocalizationReport {
  std::vector<TrackLocalization> tracks;  // ascending id
};

PhaseStats summarize(const std::vector<double>& values);

/// Per-id Euclidean error between estimate and truth over frames present in
/// both, split by the occlusion mask. Ids are matched by equality.
LocalizationReport localization_error(const std::map<int, Trajectory>& gt,
                                      const std::map<int, Trajectory>& estimated,
                                      const OcclusionMask& occluded = {});

struct LatencyReport {
  std::vector<double> baseline_ms;
  std::vector<double> dynamic_ms;
  double mean_baseline_ms = 0.0;
  double mean_dynamic_ms = 0.0;
  double mean_delta_ms = 0.0;

  bool empty() const { return baseline_ms.empty(); }
};

/// Wall-clock time of Tracker::step per frame for both configurations on the
/// same detections. The first `warmup` frames are excluded. With several
/// repetitions the per-frame minimum is kept.
LatencyReport measure_latency(const SequenceDataset& dataset, const TrackerConfig& baseline,
                              const TrackerConfig& dynamic, int warmup = 10,
                              int repetitions = 1);

std::string format_summary(const MotSummary& mot, const IdSummary& id);
std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& label, const MotSummary& mot,
                            const IdSummary& id);

}  // namespace dynkf
