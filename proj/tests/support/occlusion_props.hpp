#pragma once

// Random detection/ground-truth pairs and a checker for the occlusion
// simulator contract. Shared by the unit suite and the acceptance binary.

#include <map>
#include <optional>
#include <set>
#include <string>

#include "dynkf/occlusion.hpp"
#include "random.hpp"
#include "scenes.hpp"

namespace dynkf::testing {

struct OcclusionCase {
  Frames<DetectionRecord> detections;
  Frames<GroundTruthRecord> ground_truth;
  OcclusionSpec spec;
};

inline OcclusionCase random_occlusion_case(Rng& rng) {
  OcclusionCase c;
  const int frames = rng.integer(1, 120);
  c.detections.resize(static_cast<std::size_t>(frames));
  c.ground_truth.resize(static_cast<std::size_t>(frames));
  const int objects = rng.integer(0, 5);
  const double miss = rng.uniform(0.0, 0.3);
  for (int id = 0; id < objects; ++id) {
    const int start = rng.integer(0, frames - 1);
    const int end = rng.integer(start, frames - 1);
    const Vector2 p0(15.0 * id, rng.uniform(-5, 5));
    const Vector2 v(rng.uniform(-1, 1), rng.uniform(-1, 1));
    for (int f = start; f <= end; ++f) {
      const Vector2 p = p0 + v * (0.1 * f);
      c.ground_truth[f].push_back(label_at(f, id, p));
      if (rng.uniform(0, 1) >= miss) {
        auto d = detection_at(f, p + Vector2(rng.normal(0.2), rng.normal(0.2)), rng.uniform(0, 1));
        d.rotation_y = rng.uniform(-3, 3);
        c.detections[f].push_back(d);
      }
    }
  }
  for (int f = 0; f < frames; ++f) {
    if (rng.uniform(0, 1) < 0.2) {
      c.detections[f].push_back(detection_at(f, Vector2(rng.uniform(-100, 100), 200.0)));
    }
    // Shuffle within the frame so tracklet order differs from list order.
    auto& list = c.detections[f];
    for (std::size_t i = list.size(); i > 1; --i) {
      std::swap(list[i - 1], list[static_cast<std::size_t>(rng.integer(0, static_cast<int>(i) - 1))]);
    }
  }
  c.spec.kind = rng.coin() ? OcclusionKind::kMid : OcclusionKind::kLate;
  c.spec.s_occ = rng.integer(1, 40);
  c.spec.l_occ = rng.integer(1, 30);
  return c;
}

inline std::string record_bytes(const DetectionRecord& r) {
  return format_detections(Frames<DetectionRecord>{{r}});
}

/// Empty when the contract holds, otherwise a description of the violation.
inline std::optional<std::string> occlusion_contract_violation(const OcclusionCase& c) {
  const auto match = match_detections_to_gt(c.detections, c.ground_truth, c.spec.match_threshold);
  const auto out = simulate_occlusion(c.detections, match, c.spec);
  if (out.size() != c.detections.size()) return "frame count changed";

  // Output is an order-preserving sub-multiset of each input frame.
  std::set<std::pair<int, int>> kept;
  for (std::size_t f = 0; f < out.size(); ++f) {
    std::size_t j = 0;
    for (const auto& r : out[f]) {
      const std::string bytes = record_bytes(r);
      while (j < c.detections[f].size() && record_bytes(c.detections[f][j]) != bytes) ++j;
      if (j == c.detections[f].size()) return "fabricated or modified record in frame " + std::to_string(f);
      kept.emplace(static_cast<int>(f), static_cast<int>(j));
      ++j;
    }
  }

  for (const auto& r : match.unmatched) {
    if (!kept.contains({r.frame, r.index})) return "unmatched detection removed";
  }
  std::size_t expected_removed = 0;
  for (const auto& t : match.tracklets) {
    const int n = static_cast<int>(t.detections.size());
    const bool eligible = n >= c.spec.s_occ + c.spec.l_occ;
    int first = -1, last = -1, removed = 0;
    for (int i = 0; i < n; ++i) {
      const auto& ref = t.detections[static_cast<std::size_t>(i)];
      if (!kept.contains({ref.frame, ref.index})) {
        if (first < 0) first = i;
        last = i;
        ++removed;
      }
    }
    if (!eligible) {
      if (removed != 0) return "ineligible tracklet " + std::to_string(t.gt_id) + " lost detections";
      continue;
    }
    if (removed != c.spec.l_occ) return "eligible tracklet lost " + std::to_string(removed);
    if (last - first + 1 != removed) return "removed detections are not consecutive";
    if (c.spec.kind == OcclusionKind::kMid && first < c.spec.s_occ) return "mid occlusion starts early";
    if (c.spec.kind == OcclusionKind::kLate && last != n - 1) return "late occlusion is not a suffix";
    expected_removed += static_cast<std::size_t>(removed);
  }
  std::size_t in = 0, left = 0;
  for (std::size_t f = 0; f < out.size(); ++f) {
    in += c.detections[f].size();
    left += out[f].size();
  }
  if (in - left != expected_removed) return "removed count mismatch";
  return std::nullopt;
}

}  // namespace dynkf::testing
