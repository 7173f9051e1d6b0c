#include <doctest.h>

#include "../support/occlusion_props.hpp"
#include "dynkf/occlusion.hpp"

using namespace dynkf;
using dynkf::testing::detection_at;
using dynkf::testing::label_at;
using dynkf::testing::Rng;

namespace {

// One object observed on every frame, detections exactly at the truth.
testing::OcclusionCase straight_track(int n, OcclusionKind kind, int s_occ, int l_occ) {
  testing::OcclusionCase c;
  c.detections.resize(static_cast<std::size_t>(n));
  c.ground_truth.resize(static_cast<std::size_t>(n));
  for (int f = 0; f < n; ++f) {
    const Vector2 p(0.5 * f, 3.0);
    c.ground_truth[f].push_back(label_at(f, 4, p));
    c.detections[f].push_back(detection_at(f, p));
  }
  c.spec.kind = kind;
  c.spec.s_occ = s_occ;
  c.spec.l_occ = l_occ;
  return c;
}

std::vector<int> surviving_frames(const Frames<DetectionRecord>& out) {
  std::vector<int> frames;
  for (std::size_t f = 0; f < out.size(); ++f) {
    if (!out[f].empty()) frames.push_back(static_cast<int>(f));
  }
  return frames;
}

}  // namespace

TEST_SUITE("occlusion") {

TEST_CASE("OcclusionSpec validation") {
  OcclusionSpec s;
  CHECK_NOTHROW(s.validate());
  s.l_occ = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = OcclusionSpec{};
  s.s_occ = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  CHECK(occlusion_kind_from_string("late") == OcclusionKind::kLate);
  CHECK_THROWS_AS(occlusion_kind_from_string("middle"), ConfigError);
}

TEST_CASE("a detection at a ground-truth location matches that id") {
  Frames<GroundTruthRecord> gt{{label_at(0, 9, Vector2(1, 1)), label_at(0, 2, Vector2(20, 1))}};
  Frames<DetectionRecord> dets{{detection_at(0, Vector2(20, 1))}};
  const auto m = match_detections_to_gt(dets, gt, 2.0);
  REQUIRE(m.tracklets.size() == 1);
  CHECK(m.tracklets[0].gt_id == 2);
  CHECK(m.tracklets[0].detections == std::vector<DetectionRef>{{0, 0}});
  CHECK(m.unmatched.empty());
}

TEST_CASE("a detection far from every object stays unmatched") {
  Frames<GroundTruthRecord> gt{{label_at(0, 0, Vector2(0, 0))}};
  Frames<DetectionRecord> dets{{detection_at(0, Vector2(10, 0))}};
  const auto m = match_detections_to_gt(dets, gt, 1.0);
  CHECK(m.tracklets.empty());
  CHECK(m.unmatched == std::vector<DetectionRef>{{0, 0}});
}

TEST_CASE("of two detections near one object the nearer is matched") {
  Frames<GroundTruthRecord> gt{{label_at(0, 0, Vector2(0, 0))}};
  Frames<DetectionRecord> dets{{detection_at(0, Vector2(0.9, 0)), detection_at(0, Vector2(0, 0.4))}};
  const auto m = match_detections_to_gt(dets, gt, 2.0);
  REQUIRE(m.tracklets.size() == 1);
  CHECK(m.tracklets[0].detections == std::vector<DetectionRef>{{0, 1}});
  CHECK(m.unmatched == std::vector<DetectionRef>{{0, 0}});
}

TEST_CASE("DontCare ground truth is never matched") {
  auto dc = label_at(0, -1, Vector2(0, 0));
  dc.type = "DontCare";
  Frames<GroundTruthRecord> gt{{dc}};
  Frames<DetectionRecord> dets{{detection_at(0, Vector2(0, 0))}};
  const auto m = match_detections_to_gt(dets, gt, 2.0);
  CHECK(m.tracklets.empty());
  CHECK(m.unmatched.size() == 1);
}

TEST_CASE("detections past the end of the ground truth are an input error") {
  Frames<GroundTruthRecord> gt(2);
  Frames<DetectionRecord> dets(3);
  CHECK_THROWS_AS(match_detections_to_gt(dets, gt, 2.0), InputError);
  Frames<DetectionRecord> shorter(1);
  CHECK_NOTHROW(match_detections_to_gt(shorter, gt, 2.0));
}

TEST_CASE("fifty observations are too few for 35 + 20") {
  const auto c = straight_track(50, OcclusionKind::kMid, 35, 20);
  CHECK(occlusion_start(50, c.spec) == -1);
  const auto m = match_detections_to_gt(c.detections, c.ground_truth, 2.0);
  CHECK(simulate_occlusion(c.detections, m, c.spec).size() == 50);
  CHECK(surviving_frames(simulate_occlusion(c.detections, m, c.spec)).size() == 50);
}

TEST_CASE("late occlusion of 10 removes ordinals 51 to 60") {
  const auto c = straight_track(60, OcclusionKind::kLate, 35, 10);
  const auto m = match_detections_to_gt(c.detections, c.ground_truth, 2.0);
  const auto kept = surviving_frames(simulate_occlusion(c.detections, m, c.spec));
  REQUIRE(kept.size() == 50);
  CHECK(kept.back() == 49);  // ordinal 50
}

TEST_CASE("mid occlusion of 80 observations starts at ordinal 36") {
  const auto c = straight_track(80, OcclusionKind::kMid, 35, 20);
  CHECK(occlusion_start(80, c.spec) == 35);
  const auto m = match_detections_to_gt(c.detections, c.ground_truth, 2.0);
  const auto kept = surviving_frames(simulate_occlusion(c.detections, m, c.spec));
  REQUIRE(kept.size() == 60);
  CHECK(kept[34] == 34);  // ordinal 35 survives
  CHECK(kept[35] == 55);  // reappears at ordinal 56
}

TEST_CASE("mid start is centred when that is later than s_occ") {
  OcclusionSpec s;
  s.s_occ = 5;
  s.l_occ = 10;
  CHECK(occlusion_start(100, s) == 45);
  CHECK(occlusion_start(15, s) == 5);
  CHECK(occlusion_start(14, s) == -1);
}

TEST_CASE("window counts tracklet order across detector gaps") {
  auto c = straight_track(40, OcclusionKind::kMid, 5, 10);
  for (int f = 10; f < 20; f += 2) c.detections[f].clear();
  const auto m = match_detections_to_gt(c.detections, c.ground_truth, 2.0);
  REQUIRE(m.tracklets[0].detections.size() == 35);
  CHECK_FALSE(testing::occlusion_contract_violation(c).has_value());
}

TEST_CASE("contract holds on random inputs") {
  Rng rng(2024);
  int eligible_cases = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto c = testing::random_occlusion_case(rng);
    const auto violation = testing::occlusion_contract_violation(c);
    INFO("trial " << trial << ": " << violation.value_or(""));
    CHECK_FALSE(violation.has_value());
    const auto m = match_detections_to_gt(c.detections, c.ground_truth, c.spec.match_threshold);
    for (const auto& t : m.tracklets) {
      if (occlusion_start(static_cast<int>(t.detections.size()), c.spec) >= 0) {
        ++eligible_cases;
        break;
      }
    }
  }
  CHECK(eligible_cases > 50);
}

TEST_CASE("tracklet frames are strictly increasing and detections used once") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = testing::random_occlusion_case(rng);
    const auto m = match_detections_to_gt(c.detections, c.ground_truth, 2.0);
    std::set<std::pair<int, int>> seen;
    for (const auto& t : m.tracklets) {
      for (std::size_t i = 0; i < t.detections.size(); ++i) {
        if (i > 0) CHECK(t.detections[i].frame > t.detections[i - 1].frame);
        CHECK(seen.emplace(t.detections[i].frame, t.detections[i].index).second);
      }
    }
    for (const auto& r : m.unmatched) CHECK(seen.emplace(r.frame, r.index).second);
    std::size_t total = 0;
    for (const auto& f : c.detections) total += f.size();
    CHECK(seen.size() == total);
  }
}

TEST_CASE("simulation is deterministic") {
  Rng rng(3);
  const auto c = testing::random_occlusion_case(rng);
  const auto m = match_detections_to_gt(c.detections, c.ground_truth, 2.0);
  CHECK(format_detections(simulate_occlusion(c.detections, m, c.spec)) ==
        format_detections(simulate_occlusion(c.detections, m, c.spec)));
}

}  // TEST_SUITE
