#include "dynkf/occlusion.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "dynkf/assignment.hpp"

namespace dynkf {

OcclusionKind occlusion_kind_from_string(const std::string& s) {
  if (s == "mid") return OcclusionKind::kMid;
  if (s == "late") return OcclusionKind::kLate;
  throw ConfigError("occlusion kind must be 'mid' or 'late', got '" + s + "'");
}

std::string to_string(OcclusionKind kind) { return kind == OcclusionKind::kMid ? "mid" : "late"; }

void OcclusionSpec::validate() const {
  if (s_occ < 1) throw ConfigError("s_occ must be >= 1");
  if (l_occ < 1) throw ConfigError("l_occ must be >= 1");
  if (!(match_threshold > 0.0)) throw ConfigError("match_threshold must be positive");
}

GroundTruthMatch match_detections_to_gt(const Frames<DetectionRecord>& detections,
                                        const Frames<GroundTruthRecord>& ground_truth,
                                        double threshold) {
  if (detections.size() > ground_truth.size()) {
    throw InputError("detections cover " + std::to_string(detections.size()) +
                     " frames but ground truth only " + std::to_string(ground_truth.size()));
  }
  std::map<int, ObjectTracklet> by_id;
  GroundTruthMatch out;
  for (std::size_t f = 0; f < detections.size(); ++f) {
    const auto& dets = detections[f];
    std::vector<Vector2> gt_pos;
    std::vector<int> gt_ids;
    for (const auto& g : ground_truth[f]) {
      if (is_dont_care(g)) continue;
      gt_pos.push_back(g.ground_position());
      gt_ids.push_back(g.track_id);
    }
    std::vector<Vector2> det_pos;
    for (const auto& d : dets) det_pos.push_back(d.ground_position());

    const int frame = static_cast<int>(f);
    if (gt_pos.empty() || det_pos.empty()) {
      for (int i = 0; i < static_cast<int>(dets.size()); ++i) out.unmatched.push_back({frame, i});
      continue;
    }
    const auto gated = gated_assignment(distance_matrix(det_pos, gt_pos), threshold);
    for (const auto& [di, gi] : gated.pairs) {
      auto& tracklet = by_id[gt_ids[static_cast<std::size_t>(gi)]];
      tracklet.gt_id = gt_ids[static_cast<std::size_t>(gi)];
      tracklet.detections.push_back({frame, di});
    }
    for (int di : gated.unmatched_rows) out.unmatched.push_back({frame, di});
  }
  for (auto& [id, tracklet] : by_id) out.tracklets.push_back(std::move(tracklet));
  return out;
}

int occlusion_start(int n, const OcclusionSpec& spec) {
  if (n < spec.s_occ + spec.l_occ) return -1;
  if (spec.kind == OcclusionKind::kLate) return n - spec.l_occ;
  return std::max(spec.s_occ, (n - spec.l_occ) / 2);
}

std::vector<DetectionRef> occluded_detections(const GroundTruthMatch& match,
                                              const OcclusionSpec& spec) {
  spec.validate();
  std::vector<DetectionRef> removed;
  for (const auto& t : match.tracklets) {
    const int n = static_cast<int>(t.detections.size());
    const int start = occlusion_start(n, spec);
    if (start < 0) continue;
    for (int i = start; i < start + spec.l_occ; ++i) {
      removed.push_back(t.detections[static_cast<std::size_t>(i)]);
    }
  }
  return removed;
}

Frames<DetectionRecord> simulate_occlusion(const Frames<DetectionRecord>& detections,
                                           const GroundTruthMatch& match,
                                           const OcclusionSpec& spec) {
  std::set<std::pair<int, int>> removed;
  for (const auto& r : occluded_detections(match, spec)) removed.emplace(r.frame, r.index);
  Frames<DetectionRecord> out(detections.size());
  for (std::size_t f = 0; f < detections.size(); ++f) {
    for (std::size_t i = 0; i < detections[f].size(); ++i) {
      if (!removed.contains({static_cast<int>(f), static_cast<int>(i)})) {
        out[f].push_back(detections[f][i]);
      }
    }
  }
  return out;
}

}  // namespace dynkf
