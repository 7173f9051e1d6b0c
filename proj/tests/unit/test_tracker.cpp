#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "../support/random.hpp"
#include "../support/scenes.hpp"
#include "dynkf/motion_filter.hpp"
#include "dynkf/synth.hpp"
#include "dynkf/tracker.hpp"

using namespace dynkf;
using dynkf::testing::detection_at;
using dynkf::testing::Rng;

namespace {

SequenceDataset maneuvering_scene(std::uint64_t seed, int objects = 4) {
  ScenarioSpec spec;
  spec.seed = seed;
  for (int i = 0; i < objects; ++i) {
    ObjectSpec o;
    o.start_frame = 3 * i;
    o.initial.position = Vector2(-10.0 + i, 8.0 * i);
    o.initial.velocity = Vector2(4.0 + i, 0.0);
    o.segments = {{RegimeKind::kConstantVelocity, 30, Vector2(4.0 + i, 0.0)},
                  {RegimeKind::kConstantJerk, 10, Vector2(3.0, 1.0)},
                  {RegimeKind::kConstantJerk, 10, Vector2(-3.0, -1.0)},
                  {RegimeKind::kConstantVelocity, 30, Vector2(2.0, 0.5)}};
    spec.objects.push_back(o);
  }
  return generate(spec).dataset;
}

bool same_snapshot(const TrackSnapshot& a, const TrackSnapshot& b) {
  return a.frame == b.frame && a.id == b.id && a.status == b.status && a.position == b.position &&
         a.predicted == b.predicted && a.updated == b.updated;
}

bool same_run(const TrackingRun& a, const TrackingRun& b) {
  if (a.frames.size() != b.frames.size()) return false;
  for (std::size_t f = 0; f < a.frames.size(); ++f) {
    if (a.frames[f].size() != b.frames[f].size()) return false;
    for (std::size_t i = 0; i < a.frames[f].size(); ++i) {
      if (!same_snapshot(a.frames[f][i], b.frames[f][i])) return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("tracker") {

TEST_CASE("filter configuration validation") {
  FilterConfig c;
  CHECK_NOTHROW(c.validate());
  c.transition_window = 2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = FilterConfig{};
  c.smoothing_window = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = FilterConfig{};
  c.cold_start = WeightVector{{0.5, 1, 0, 0}};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  TrackerConfig t;
  t.gate_distance = 0.0;
  CHECK_THROWS_AS(t.validate(), ConfigError);
  t = TrackerConfig{};
  t.min_hits = 0;
  CHECK_THROWS_AS(t.validate(), ConfigError);
  t = TrackerConfig{};
  t.max_misses = -1;
  CHECK_THROWS_AS(t.validate(), ConfigError);
}

TEST_CASE("motion filter starts from the birth covariance and cold-start weights") {
  FilterConfig c;
  Measurement z;
  z.position = Vector2(3.0, 4.0);
  MotionFilter f(c, z);
  CHECK(f.position() == z.position);
  CHECK(f.velocity() == Vector2::Zero());
  const Matrix& P = f.state().covariance;
  CHECK(P(0, 0) == doctest::Approx(10.0 * 0.09));
  CHECK(P(1, 1) == 1e2);
  CHECK(P(2, 2) == 1e3);
  CHECK(P(3, 3) == 1e4);
  CHECK(f.weights()[0] == WeightVector{{1, 1, 0, 0}});
  CHECK(f.window().count() == 1);
}

TEST_CASE("window receives the post-measurement and weights follow the window") {
  FilterConfig c;
  c.smoothing_window = 1;
  Measurement z;
  MotionFilter f(c, z);
  for (int k = 1; k <= 8; ++k) {
    f.predict();
    const auto info = f.update(z);
    CHECK(info.measured == z.position);
    CHECK(f.window().entries().back() == info.localized);
  }
  // A stationary object drives every derivative weight to zero.
  CHECK(f.weights()[0][1] == 0.0);
  CHECK(f.weights()[0][2] == 0.0);
  CHECK(f.weights()[0][3] == 0.0);
}

TEST_CASE("localization term is the configured estimate") {
  FilterConfig c;
  Measurement first;
  Measurement z;
  z.position = Vector2(0.4, -0.2);
  for (auto term : {LocalizationTerm::kMeasurement, LocalizationTerm::kUpdatedState,
                    LocalizationTerm::kPostMeasurement}) {
    c.localization = term;
    MotionFilter f(c, first);
    f.predict();
    const StateEstimate prior = f.state();
    const auto info = f.update(z);
    const Matrix H = build_measurement_matrix(c.order);
    const auto ref = update(prior, z.position, H, build_measurement_noise(c.sigma_meas));
    Vector expected;
    if (term == LocalizationTerm::kMeasurement) expected = z.position;
    if (term == LocalizationTerm::kUpdatedState) expected = H * ref.posterior.mean;
    if (term == LocalizationTerm::kPostMeasurement) {
      expected = z.position - (H * ref.gain) * ref.residual;
    }
    CHECK((info.localized - expected).norm() < 1e-12);
  }
}

TEST_CASE("aux state is smoothed with yaw wrapping") {
  FilterConfig c;
  Measurement z;
  z.aux.yaw = 3.1;
  z.aux.length = 4.0;
  MotionFilter f(c, z);
  z.aux.yaw = -3.1;  // 0.083 rad away across the wrap
  z.aux.length = 5.0;
  f.predict();
  f.update(z);
  CHECK(std::abs(f.aux().yaw) > 3.1);
  CHECK(f.aux().length == doctest::Approx(4.7));
}

TEST_CASE("one confirmed track coasts max_misses frames, then dies") {
  TrackerConfig cfg;
  cfg.max_misses = 3;
  Tracker t(cfg);
  int frame = 0;
  for (; frame < 3; ++frame) {
    const std::vector<DetectionRecord> d{detection_at(frame, Vector2(1, 2))};
    t.step(frame, d);
  }
  std::vector<std::vector<TrackSnapshot>> out;
  for (int k = 0; k < 5; ++k, ++frame) out.push_back(t.step(frame, {}));
  int coast_snapshots = 0;
  for (int k = 0; k < 3; ++k) {
    REQUIRE(out[k].size() == 1);
    CHECK(out[k][0].status == TrackStatus::kCoasting);
    CHECK_FALSE(out[k][0].updated);
    ++coast_snapshots;
  }
  CHECK(coast_snapshots == 3);
  CHECK(out[3].empty());
  CHECK(out[4].empty());
  CHECK(t.tracks().empty());
}

TEST_CASE("a stationary detection is reported from its third frame and does not drift") {
  TrackerConfig cfg;
  Tracker t(cfg);
  const Vector2 p(4.0, 12.0);
  for (int frame = 0; frame < 10; ++frame) {
    const std::vector<DetectionRecord> d{detection_at(frame, p)};
    const auto out = t.step(frame, d);
    if (frame < 2) {
      CHECK(out.empty());
      continue;
    }
    REQUIRE(out.size() == 1);
    CHECK(out[0].id == 0);
    CHECK(out[0].status == TrackStatus::kConfirmed);
    CHECK((out[0].predicted - p).norm() < cfg.filter.sigma_meas);
  }
  CHECK(t.tracks().size() == 1);
}

TEST_CASE("a 10-frame detection gap keeps the same track id") {
  for (auto variant : {FilterVariant::kBaseline, FilterVariant::kDynamic}) {
    TrackerConfig cfg;
    cfg.max_misses = 15;
    cfg.filter.variant = variant;
    Tracker t(cfg);
    std::set<int> ids;
    for (int frame = 0; frame < 40; ++frame) {
      const Vector2 p(0.5 * frame * 0.1, 5.0);
      std::vector<DetectionRecord> d;
      if (frame < 15 || frame >= 25) d.push_back(detection_at(frame, p));
      for (const auto& s : t.step(frame, d)) ids.insert(s.id);
    }
    CHECK(ids == std::set<int>{0});
  }
}

TEST_CASE("a tentative track that misses once is discarded") {
  Tracker t(TrackerConfig{});
  t.step(0, std::vector<DetectionRecord>{detection_at(0, Vector2(0, 0))});
  CHECK(t.tracks().size() == 1);
  t.step(1, {});
  CHECK(t.tracks().empty());
  const auto out = t.step(2, std::vector<DetectionRecord>{detection_at(2, Vector2(0, 0))});
  CHECK(out.empty());
  CHECK(t.tracks().front().id == 1);
}

TEST_CASE("min_hits = 1 reports a track on its birth frame") {
  TrackerConfig cfg;
  cfg.min_hits = 1;
  Tracker t(cfg);
  const auto out = t.step(0, std::vector<DetectionRecord>{detection_at(0, Vector2(1, 1))});
  REQUIRE(out.size() == 1);
  CHECK(out[0].updated);
}

TEST_CASE("frames must be strictly increasing") {
  Tracker t(TrackerConfig{});
  t.step(3, {});
  CHECK_THROWS_AS(t.step(3, {}), ContractError);
  CHECK_THROWS_AS(t.step(1, {}), ContractError);
  CHECK_NOTHROW(t.step(7, {}));
}

TEST_CASE("coasting freezes the dynamics window and the weights") {
  TrackerConfig cfg;
  Tracker t(cfg);
  int frame = 0;
  for (; frame < 12; ++frame) {
    const std::vector<DetectionRecord> d{detection_at(frame, Vector2(0.3 * frame, 0.01 * frame * frame))};
    t.step(frame, d);
  }
  REQUIRE(t.tracks().size() == 1);
  const auto weights = t.tracks()[0].filter.weights();
  const auto entries = t.tracks()[0].filter.window().entries();
  const StateEstimate before = t.tracks()[0].filter.state();
  for (int k = 0; k < 5; ++k, ++frame) {
    t.step(frame, {});
    REQUIRE(t.tracks().size() == 1);
    CHECK(t.tracks()[0].filter.weights() == weights);
    CHECK(t.tracks()[0].filter.window().entries() == entries);
  }
  // Covariance keeps growing while coasting.
  CHECK(t.tracks()[0].filter.state().covariance.trace() > before.covariance.trace());
}

TEST_CASE("identical input gives identical output") {
  const auto ds = maneuvering_scene(5);
  for (auto variant : {FilterVariant::kBaseline, FilterVariant::kDynamic}) {
    TrackerConfig cfg;
    cfg.filter.variant = variant;
    CHECK(same_run(run_tracker(ds, cfg), run_tracker(ds, cfg)));
  }
}

TEST_CASE("ids are never reused and unique within a frame") {
  Rng rng(9);
  for (int seed = 0; seed < 5; ++seed) {
    // Cluttered stream: random detections plus a few persistent objects.
    Tracker t(TrackerConfig{});
    std::set<int> dead;
    std::set<int> previous;
    for (int frame = 0; frame < 80; ++frame) {
      std::vector<DetectionRecord> d;
      for (int k = 0; k < 3; ++k) {
        if (rng.uniform(0, 1) < 0.8) d.push_back(detection_at(frame, Vector2(10.0 * k + rng.normal(0.2), 0.2 * frame)));
      }
      if (rng.uniform(0, 1) < 0.5) d.push_back(detection_at(frame, Vector2(rng.uniform(-50, 50), rng.uniform(-50, 50))));
      const auto out = t.step(frame, d);
      std::set<int> now;
      for (const auto& s : out) {
        CHECK(now.insert(s.id).second);
        CHECK(dead.count(s.id) == 0);
        CHECK(std::isfinite(s.position.x()));
        CHECK(std::isfinite(s.position.y()));
      }
      std::set<int> live;
      for (const auto& tr : t.tracks()) live.insert(tr.id);
      for (int id : previous) {
        if (!live.count(id)) dead.insert(id);
      }
      previous = live;
    }
  }
}

TEST_CASE("with dynamics disabled, the identity-weight path is bitwise equal to the baseline") {
  for (int seed = 0; seed < 3; ++seed) {
    const auto ds = maneuvering_scene(seed + 20);
    for (int order = 1; order <= 3; ++order) {
      TrackerConfig base;
      base.filter.order = motion_order_from_int(order);
      base.filter.variant = FilterVariant::kBaseline;
      TrackerConfig ident = base;
      ident.filter.variant = FilterVariant::kDynamicIdentity;
      CHECK(same_run(run_tracker(ds, base), run_tracker(ds, ident)));
    }
  }
}

TEST_CASE("saturated weights track the jerk baseline") {
  const auto ds = maneuvering_scene(31);
  TrackerConfig base;
  base.filter.variant = FilterVariant::kBaseline;
  TrackerConfig dyn;
  dyn.filter.factors = DynamicsFactors{1e-9, 1e-9, 1e-9};
  dyn.filter.cold_start = WeightVector{{1, 1, 1, 1}};
  const auto a = run_tracker(ds, base);
  const auto b = run_tracker(ds, dyn);
  REQUIRE(a.frames.size() == b.frames.size());
  for (std::size_t f = 0; f < a.frames.size(); ++f) {
    REQUIRE(a.frames[f].size() == b.frames[f].size());
    for (std::size_t i = 0; i < a.frames[f].size(); ++i) {
      CHECK(a.frames[f][i].id == b.frames[f][i].id);
      CHECK((a.frames[f][i].position - b.frames[f][i].position).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("dynamic and baseline trackers differ on a maneuvering scene") {
  const auto ds = maneuvering_scene(2);
  TrackerConfig base;
  base.filter.variant = FilterVariant::kBaseline;
  CHECK_FALSE(same_run(run_tracker(ds, base), run_tracker(ds, TrackerConfig{})));
}

TEST_CASE("records carry the smoothed box and the latest detection attributes") {
  Tracker t(TrackerConfig{});
  std::vector<TrackSnapshot> out;
  for (int frame = 0; frame < 3; ++frame) {
    auto d = detection_at(frame, Vector2(2, 7), 0.5 + 0.1 * frame);
    out = t.step(frame, std::vector<DetectionRecord>{d});
  }
  REQUIRE(out.size() == 1);
  const LabeledRecord r = to_record(out[0]);
  CHECK(r.frame == 2);
  CHECK(r.track_id == 0);
  CHECK(r.score == doctest::Approx(0.7));
  CHECK(r.type == "Car");
  CHECK(r.dims.length == doctest::Approx(3.9));
  CHECK(r.location.y() == doctest::Approx(1.6));
  CHECK(r.ground_position().isApprox(out[0].position));
}

TEST_CASE("trajectory rows tag predicted, updated and measured positions") {
  const auto ds = maneuvering_scene(3, 1);
  const auto run = run_tracker(ds, TrackerConfig{});
  const auto rows = run.trajectory_rows();
  int predicted = 0, updated = 0, measured = 0;
  for (const auto& r : rows) {
    predicted += r.source == TrajectorySource::kPredicted;
    updated += r.source == TrajectorySource::kUpdated;
    measured += r.source == TrajectorySource::kMeasurement;
  }
  CHECK(predicted > 0);
  CHECK(updated == measured);
  CHECK(predicted >= updated);
}

}  // TEST_SUITE
