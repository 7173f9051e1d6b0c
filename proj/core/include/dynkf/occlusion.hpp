#pragma once

// Simulated occlusion: detections are matched to ground-truth objects, and
// objects with enough observations lose a run of consecutive detections
// either mid-track (the object reappears) or at the end of the track.

#include <string>
#include <vector>

#include "dynkf/kitti_io.hpp"

namespace dynkf {

enum class OcclusionKind { kMid, kLate };
OcclusionKind occlusion_kind_from_string(const std::string& s);
std::string to_string(OcclusionKind kind);

struct OcclusionSpec {
  OcclusionKind kind = OcclusionKind::kMid;
  int s_occ = 35;                // observations required before the occlusion
  int l_occ = 20;                // detections removed
  double match_threshold = 2.0;  // m, detection-to-ground-truth gate

  void validate() const;
};

struct DetectionRef {
  int frame = 0;
  int index = 0;  // position within the frame's detection list
  friend bool operator==(const DetectionRef&, const DetectionRef&) = default;
};

struct ObjectTracklet {
  int gt_id = 0;
  std::vector<DetectionRef> detections;  // frames strictly increasing
};

struct GroundTruthMatch {
  std::vector<ObjectTracklet> tracklets;  // ascending gt id
  std::vector<DetectionRef> unmatched;
};

/// Per-frame Hungarian matching of detections to ground truth within the
/// threshold. Throws InputError when detections extend past the ground truth.
GroundTruthMatch match_detections_to_gt(const Frames<DetectionRecord>& detections,
                                        const Frames<GroundTruthRecord>& ground_truth,
                                        double threshold);

/// First removed ordinal (0-based) for an eligible tracklet of n detections,
/// or -1 if n < s_occ + l_occ.
int occlusion_start(int n, const OcclusionSpec& spec);

/// Detections that would be removed, per tracklet order.
std::vector<DetectionRef> occluded_detections(const GroundTruthMatch& match,
                                              const OcclusionSpec& spec);

/// Removes the occluded detections; survivors keep their order and content.
Frames<DetectionRecord> simulate_occlusion(const Frames<DetectionRecord>& detections,
                                           const GroundTruthMatch& match,
                                           const OcclusionSpec& spec);

}  // namespace dynkf
