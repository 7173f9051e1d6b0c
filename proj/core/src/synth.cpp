#include "dynkf/synth.hpp"

#include <cmath>
#include <random>

#include <json.hpp>

namespace dynkf {
namespace {

using nlohmann::json;

void step_state(KinematicState& s, double dt) {
  const double dt2 = dt * dt;
  const double dt3 = dt2 * dt;
  s.position += s.velocity * dt + s.acceleration * (dt2 / 2.0) + s.jerk * (dt3 / 6.0);
  s.velocity += s.acceleration * dt + s.jerk * (dt2 / 2.0);
  s.acceleration += s.jerk * dt;
}

void enter_segment(KinematicState& s, const RegimeSegment& seg) {
  switch (seg.kind) {
    case RegimeKind::kStationary:
      s.velocity.setZero();
      s.acceleration.setZero();
      s.jerk.setZero();
      break;
    case RegimeKind::kConstantVelocity:
      s.velocity = seg.parameter;
      s.acceleration.setZero();
      s.jerk.setZero();
      break;
    case RegimeKind::kConstantAcceleration:
      s.acceleration = seg.parameter;
      s.jerk.setZero();
      break;
    case RegimeKind::kConstantJerk:
      s.jerk = seg.parameter;
      break;
  }
}

Vector2 read_vec2(const json& j, const char* key, const Vector2& fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_number()) return Vector2::Constant(v.get<double>());
  if (!v.is_array() || v.size() != 2) {
    throw ConfigError(std::string("scenario key '") + key + "' must be a number or [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

RegimeKind regime_kind_from_string(const std::string& s) {
  if (s == "stationary") return RegimeKind::kStationary;
  if (s == "cv") return RegimeKind::kConstantVelocity;
  if (s == "ca") return RegimeKind::kConstantAcceleration;
  if (s == "cj") return RegimeKind::kConstantJerk;
  throw ConfigError("unknown regime kind '" + s + "' (expected stationary, cv, ca or cj)");
}

std::string to_string(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::kStationary:
      return "stationary";
    case RegimeKind::kConstantVelocity:
      return "cv";
    case RegimeKind::kConstantAcceleration:
      return "ca";
    case RegimeKind::kConstantJerk:
      return "cj";
  }
  return "unknown";
}

void ScenarioSpec::validate() const {
  if (!(dt > 0.0)) throw ConfigError("scenario dt must be positive");
  if (!(sigma.x() >= 0.0 && sigma.y() >= 0.0)) throw ConfigError("scenario sigma must be >= 0");
  for (const auto& o : objects) {
    if (o.start_frame < 0) throw ConfigError("object start_frame must be >= 0");
    for (const auto& seg : o.segments) {
      if (seg.duration < 1) throw ConfigError("segment duration must be >= 1");
    }
  }
  if (occlusion) occlusion->validate();
}

std::vector<TruthFrame> integrate_object(const ObjectSpec& object, double dt) {
  std::vector<TruthFrame> frames;
  KinematicState s = object.initial;
  int frame = object.start_frame;
  for (const auto& seg : object.segments) {
    enter_segment(s, seg);
    for (int i = 0; i < seg.duration; ++i) {
      frames.push_back({frame++, s, seg.kind});
      step_state(s, dt);
    }
  }
  return frames;
}

SynthOutput generate(const ScenarioSpec& spec) {
  spec.validate();
  SynthOutput out;
  out.dataset.id = spec.name;
  out.dataset.dt = spec.dt;

  int frame_count = 0;
  for (std::size_t i = 0; i < spec.objects.size(); ++i) {
    ObjectTruth t;
    t.id = static_cast<int>(i);
    t.frames = integrate_object(spec.objects[i], spec.dt);
    if (!t.frames.empty()) frame_count = std::max(frame_count, t.frames.back().frame + 1);
    out.truth.push_back(std::move(t));
  }

  Frames<GroundTruthRecord> gt(static_cast<std::size_t>(frame_count));
  Frames<DetectionRecord> det(static_cast<std::size_t>(frame_count));
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  // Frame-major so the noise sequence does not depend on object ordering quirks.
  std::vector<std::size_t> cursor(out.truth.size(), 0);
  for (int f = 0; f < frame_count; ++f) {
    for (std::size_t i = 0; i < out.truth.size(); ++i) {
      const auto& frames = out.truth[i].frames;
      if (cursor[i] >= frames.size() || frames[cursor[i]].frame != f) continue;
      const TruthFrame& tf = frames[cursor[i]++];
      const ObjectSpec& o = spec.objects[i];

      GroundTruthRecord g;
      g.frame = f;
      g.track_id = out.truth[i].id;
      g.type = o.type;
      g.dims = o.dims;
      g.location = camera_location(tf.state.position, o.elevation);
      g.rotation_y = o.yaw;
      g.score = 1.0;
      gt[static_cast<std::size_t>(f)].push_back(g);

      DetectionRecord d = g;
      const double nx = unit(rng);
      const double ny = unit(rng);
      const Vector2 noisy = tf.state.position + Vector2(spec.sigma.x() * nx, spec.sigma.y() * ny);
      d.location = camera_location(noisy, o.elevation);
      det[static_cast<std::size_t>(f)].push_back(d);
    }
  }
  out.dataset.detections = std::move(det);
  out.dataset.ground_truth = std::move(gt);

  if (spec.occlusion) {
    const auto match = match_detections_to_gt(out.dataset.detections, *out.dataset.ground_truth,
                                              spec.occlusion->match_threshold);
    out.occluded = simulate_occlusion(out.dataset.detections, match, *spec.occlusion);
  }
  return out;
}

ScenarioSpec parse_scenario_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario JSON: ") + e.what(), 0, e.byte);
  }
  ScenarioSpec spec;
  try {
    spec.name = j.value("name", spec.name);
    spec.dt = j.value("dt", spec.dt);
    spec.sigma = read_vec2(j, "sigma", spec.sigma);
    spec.seed = j.value("seed", spec.seed);
    for (const auto& jo : j.at("objects")) {
      ObjectSpec o;
      o.start_frame = jo.value("start_frame", 0);
      o.initial.position = read_vec2(jo, "position", Vector2::Zero());
      o.initial.velocity = read_vec2(jo, "velocity", Vector2::Zero());
      o.initial.acceleration = read_vec2(jo, "acceleration", Vector2::Zero());
      o.type = jo.value("type", o.type);
      if (jo.contains("dims")) {
        const auto& d = jo.at("dims");
        o.dims = Dimensions{d.at(0).get<double>(), d.at(1).get<double>(), d.at(2).get<double>()};
      }
      o.elevation = jo.value("elevation", o.elevation);
      o.yaw = jo.value("yaw", o.yaw);
      for (const auto& js : jo.at("segments")) {
        RegimeSegment seg;
        seg.kind = regime_kind_from_string(js.at("kind").get<std::string>());
        seg.duration = js.at("duration").get<int>();
        seg.parameter = read_vec2(js, "value", Vector2::Zero());
        o.segments.push_back(seg);
      }
      spec.objects.push_back(std::move(o));
    }
    if (j.contains("occlusion")) {
      const auto& jc = j.at("occlusion");
      OcclusionSpec occ;
      occ.kind = occlusion_kind_from_string(jc.value("kind", std::string("mid")));
      occ.s_occ = jc.value("s_occ", occ.s_occ);
      occ.l_occ = jc.value("l_occ", occ.l_occ);
      occ.match_threshold = jc.value("match_threshold", occ.match_threshold);
      spec.occlusion = occ;
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario JSON: ") + e.what());
  }
  spec.validate();
  return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  return parse_scenario_text(read_text_file(path));
}

}  // namespace dynkf
