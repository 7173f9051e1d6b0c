// dynkf command-line tool: track, synth, occlude, evaluate, compare.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dynkf/config.hpp"
#include "dynkf/errors.hpp"
#include "dynkf/kitti_io.hpp"
#include "dynkf/metrics.hpp"
#include "dynkf/occlusion.hpp"
#include "dynkf/synth.hpp"
#include "dynkf/tracker.hpp"

namespace fs = std::filesystem;
using namespace dynkf;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_exists(const fs::path& p, const std::string& what) {
  if (!fs::exists(p)) throw UsageError(what + " not found: " + p.string());
}

// A sequence argument is either one file or a directory of *.txt files.
std::vector<fs::path> sequence_files(const fs::path& p) {
  if (!fs::is_directory(p)) return {p};
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(p)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw UsageError("no .txt sequences in directory: " + p.string());
  return out;
}

fs::path matching_file(const fs::path& root, const fs::path& seq, std::size_t count) {
  if (!fs::is_directory(root)) {
    if (count != 1) throw UsageError("a single ground-truth file needs a single sequence");
    return root;
  }
  const fs::path p = root / seq.filename();
  require_exists(p, "ground truth for sequence " + seq.stem().string());
  return p;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception is rethrown.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct ConfigOptions {
  std::string config_path;
  std::string dynamics;
  std::vector<std::string> sets;
  std::optional<double> dt;
  std::optional<int> order;

  void add_to(CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path,
                    "key = value config file (default: $DYNKF_CONFIG when set)");
    cmd->add_option("--dynamics", dynamics, "Motion-dynamics weighting")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--order", order, "Motion model order (1 velocity, 2 acceleration, 3 jerk)");
    cmd->add_option("--dt", dt, "Frame period in seconds");
    cmd->add_option("--set", sets, "Override a config key, e.g. --set gate_distance=3")
        ->type_name("KEY=VALUE");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    std::string path = config_path;
    if (path.empty()) {
      if (const char* env = std::getenv("DYNKF_CONFIG"); env && *env) path = env;
    }
    if (!path.empty()) {
      require_exists(path, "config file");
      cfg = load_run_config(path);
    }
    std::map<std::string, std::string> overrides;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects KEY=VALUE, got '" + s + "'");
      overrides[s.substr(0, eq)] = s.substr(eq + 1);
    }
    if (!dynamics.empty()) overrides["dynamics_enabled"] = dynamics == "on" ? "true" : "false";
    if (dt) {
      std::ostringstream os;
      os.precision(17);
      os << *dt;
      overrides["dt"] = os.str();
    }
    if (order) overrides["model_order"] = std::to_string(*order);
    return apply_overrides(cfg, overrides);
  }
};

ObjectSequence gt_sequence(const SequenceDataset& ds) {
  Frames<LabeledRecord> gt = ds.ground_truth.value_or(Frames<LabeledRecord>{});
  pad_frames(gt, ds.frame_count());
  return to_object_sequence(gt);
}

std::vector<TrajectoryRow> ground_truth_rows(const Frames<LabeledRecord>& gt) {
  std::vector<TrajectoryRow> rows;
  for (const auto& frame : gt) {
    for (const auto& r : frame) {
      if (is_dont_care(r)) continue;
      const Vector2 p = r.ground_position();
      rows.push_back({r.frame, r.track_id, p.x(), p.y(), TrajectorySource::kGroundTruth});
    }
  }
  return rows;
}

// ---- track ----------------------------------------------------------------

struct TrackArgs {
  std::string detections;
  std::string ground_truth;
  std::string output;
  int jobs = 1;
  ConfigOptions config;
};

int cmd_track(const TrackArgs& a) {
  require_exists(a.detections, "detections");
  if (!a.ground_truth.empty()) require_exists(a.ground_truth, "ground truth");
  const RunConfig cfg = a.config.resolve();
  const TrackerConfig tracker = cfg.tracker_config();
  const auto files = sequence_files(a.detections);
  const fs::path out = a.output;
  fs::create_directories(out / "tracks");
  fs::create_directories(out / "trajectories");
  write_text_file(out / "config_effective", format_run_config(cfg));

  parallel_for(files.size(), a.jobs, [&](std::size_t i) {
    const SequenceDataset ds = parse_detections(files[i], cfg.dt);
    const TrackingRun run = run_tracker(ds, tracker);
    auto records = run.to_records();
    pad_frames(records, ds.frame_count());
    write_tracks(records, out / "tracks" / (ds.id + ".txt"));
    auto rows = run.trajectory_rows();
    if (!a.ground_truth.empty()) {
      const auto gt = parse_labels(matching_file(a.ground_truth, files[i], files.size()));
      const auto extra = ground_truth_rows(gt);
      rows.insert(rows.end(), extra.begin(), extra.end());
    }
    export_trajectory_csv(rows, out / "trajectories" / (ds.id + ".csv"));
  });
  std::cout << "tracked " << files.size() << " sequence(s) into " << out.string() << "\n";
  return 0;
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  std::string scenario;
  std::string output;
  std::optional<std::uint64_t> seed;
};

int cmd_synth(const SynthArgs& a) {
  require_exists(a.scenario, "scenario");
  ScenarioSpec spec = load_scenario(a.scenario);
  if (a.seed) spec.seed = *a.seed;
  const SynthOutput result = generate(spec);
  const fs::path out = a.output;
  const std::string name = result.dataset.id;
  write_detections(result.dataset.detections, out / "detections" / (name + ".txt"));
  write_tracks(*result.dataset.ground_truth, out / "ground_truth" / (name + ".txt"), false);
  if (result.occluded) write_detections(*result.occluded, out / "occluded" / (name + ".txt"));
  std::cout << "wrote " << result.dataset.frame_count() << " frames, " << result.truth.size()
            << " object(s) for scenario " << name << "\n";
  return 0;
}

// ---- occlude --------------------------------------------------------------

struct OccludeArgs {
  std::string detections;
  std::string ground_truth;
  std::string output;
  OcclusionSpec spec;
  std::string kind = "mid";
};

int cmd_occlude(OccludeArgs a) {
  require_exists(a.detections, "detections");
  require_exists(a.ground_truth, "ground truth");
  a.spec.kind = occlusion_kind_from_string(a.kind);
  a.spec.validate();
  const SequenceDataset ds = parse_detections(a.detections);
  Frames<LabeledRecord> gt = parse_labels(a.ground_truth);
  pad_frames(gt, ds.frame_count());
  const auto match = match_detections_to_gt(ds.detections, gt, a.spec.match_threshold);
  const auto removed = occluded_detections(match, a.spec);
  Frames<DetectionRecord> occluded = simulate_occlusion(ds.detections, match, a.spec);
  write_detections(occluded, a.output);
  std::cout << "removed " << removed.size() << " detection(s); wrote " << a.output << "\n";
  return 0;
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::string ground_truth;
  std::string tracks;
  std::string output;
  double threshold = 2.0;
};

int cmd_evaluate(const EvaluateArgs& a) {
  require_exists(a.ground_truth, "ground truth");
  require_exists(a.tracks, "tracks");
  const auto files = sequence_files(a.tracks);
  std::ostringstream csv;
  csv << metrics_csv_header();
  std::ostringstream text;
  ObjectSequence all_gt;
  ObjectSequence all_hyp;
  for (std::size_t si = 0; si < files.size(); ++si) {
    const fs::path& f = files[si];
    auto gt = parse_labels(matching_file(a.ground_truth, f, files.size()));
    auto hyp = parse_labels(f);
    const int n = static_cast<int>(std::max(gt.size(), hyp.size()));
    pad_frames(gt, n);
    pad_frames(hyp, n);
    const auto g = to_object_sequence(gt);
    const auto h = to_object_sequence(hyp);
    const auto mot = clearmot(g, h, a.threshold);
    const auto id = idf1(g, h, a.threshold);
    text << "[" << f.stem().string() << "]\n" << format_summary(mot, id) << "\n";
    csv << metrics_csv_row(f.stem().string(), mot, id);
    // Sequences are concatenated in time for the overall row; ids are offset
    // per sequence so identities never cross sequences.
    const int offset = 1000000 * static_cast<int>(si);
    for (std::size_t i = 0; i < g.size(); ++i) {
      FrameObjects gf;
      FrameObjects hf;
      for (std::size_t k = 0; k < g[i].size(); ++k) gf.add(g[i].ids[k] + offset, g[i].positions[k]);
      for (std::size_t k = 0; k < h[i].size(); ++k) hf.add(h[i].ids[k] + offset, h[i].positions[k]);
      all_gt.push_back(std::move(gf));
      all_hyp.push_back(std::move(hf));
    }
  }
  if (files.size() > 1) {
    const auto mot = clearmot(all_gt, all_hyp, a.threshold);
    const auto id = idf1(all_gt, all_hyp, a.threshold);
    text << "[overall]\n" << format_summary(mot, id) << "\n";
    csv << metrics_csv_row("overall", mot, id);
  }
  std::cout << text.str();
  if (!a.output.empty()) {
    const fs::path out = a.output;
    write_text_file(out / "reports" / "metrics.txt", text.str());
    write_text_file(out / "reports" / "metrics.csv", csv.str());
  }
  return 0;
}

// ---- compare --------------------------------------------------------------

struct CompareArgs {
  std::string detections;
  std::string ground_truth;
  std::string output;
  double threshold = 2.0;
  int jobs = 1;
  int repetitions = 3;
  ConfigOptions config;
};

struct CompareResult {
  std::string id;
  MotSummary mot[2];
  IdSummary ids[2];
  LatencyReport latency;
};

std::string fmt_pct(const std::optional<double>& v) {
  if (!v) return "n/a";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << 100.0 * *v;
  return os.str();
}

std::string fmt_ms(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << v;
  return os.str();
}

int cmd_compare(const CompareArgs& a) {
  require_exists(a.detections, "detections");
  require_exists(a.ground_truth, "ground truth");
  RunConfig cfg = a.config.resolve();
  RunConfig base_cfg = cfg;
  base_cfg.dynamics_enabled = false;
  RunConfig dyn_cfg = cfg;
  dyn_cfg.dynamics_enabled = true;
  const TrackerConfig trackers[2] = {base_cfg.tracker_config(), dyn_cfg.tracker_config()};
  const char* labels[2] = {"baseline", "dynamic"};

  const auto files = sequence_files(a.detections);
  const fs::path out = a.output;
  write_text_file(out / "config_effective", format_run_config(dyn_cfg));
  std::vector<CompareResult> results(files.size());

  parallel_for(files.size(), a.jobs, [&](std::size_t i) {
    SequenceDataset ds = parse_detections(files[i], cfg.dt);
    ds.ground_truth = parse_labels(matching_file(a.ground_truth, files[i], files.size()));
    pad_frames(*ds.ground_truth, ds.frame_count());
    pad_frames(ds.detections, static_cast<int>(ds.ground_truth->size()));
    const auto gt = gt_sequence(ds);
    CompareResult& r = results[i];
    r.id = ds.id;
    for (int v = 0; v < 2; ++v) {
      const TrackingRun run = run_tracker(ds, trackers[v]);
      auto records = run.to_records();
      pad_frames(records, ds.frame_count());
      write_tracks(records, out / "tracks" / labels[v] / (ds.id + ".txt"));
      export_trajectory_csv(run.trajectory_rows(),
                            out / "trajectories" / labels[v] / (ds.id + ".csv"));
      const auto hyp = to_object_sequence(records);
      r.mot[v] = clearmot(gt, hyp, a.threshold);
      r.ids[v] = idf1(gt, hyp, a.threshold);
    }
  });
  // Latency is measured serially so parallel jobs do not disturb the timings.
  for (std::size_t i = 0; i < files.size(); ++i) {
    SequenceDataset ds = parse_detections(files[i], cfg.dt);
    results[i].latency = measure_latency(ds, trackers[0], trackers[1], 10, a.repetitions);
  }

  std::ostringstream table;
  std::ostringstream csv;
  table << "sequence  MOTA_base  MOTA_dyn  IDF1_base  IDF1_dyn  IDSW_base  IDSW_dyn  ms_base  "
           "ms_dyn  ms_delta\n";
  csv << "sequence,mota_baseline,mota_dynamic,idf1_baseline,idf1_dynamic,idsw_baseline,"
         "idsw_dynamic,ms_baseline,ms_dynamic,ms_delta\n";
  for (const auto& r : results) {
    table << r.id << "  " << fmt_pct(r.mot[0].mota) << "  " << fmt_pct(r.mot[1].mota) << "  "
          << fmt_pct(r.ids[0].idf1) << "  " << fmt_pct(r.ids[1].idf1) << "  "
          << r.mot[0].id_switches << "  " << r.mot[1].id_switches << "  "
          << fmt_ms(r.latency.mean_baseline_ms) << "  " << fmt_ms(r.latency.mean_dynamic_ms)
          << "  " << fmt_ms(r.latency.mean_delta_ms) << "\n";
    csv << r.id << "," << fmt_pct(r.mot[0].mota) << "," << fmt_pct(r.mot[1].mota) << ","
        << fmt_pct(r.ids[0].idf1) << "," << fmt_pct(r.ids[1].idf1) << ","
        << r.mot[0].id_switches << "," << r.mot[1].id_switches << ","
        << fmt_ms(r.latency.mean_baseline_ms) << "," << fmt_ms(r.latency.mean_dynamic_ms) << ","
        << fmt_ms(r.latency.mean_delta_ms) << "\n";
  }
  write_text_file(out / "reports" / "compare.txt", table.str());
  write_text_file(out / "reports" / "compare.csv", csv.str());
  std::cout << table.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-object tracking with motion-dynamics weighted Kalman filtering"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "dynkf 0.3.0");

  TrackArgs track;
  auto* track_cmd = app.add_subcommand("track", "Track detections and write KITTI-format tracks");
  track_cmd->add_option("-d,--detections", track.detections, "Detection file or directory")
      ->required();
  track_cmd->add_option("-g,--ground-truth", track.ground_truth,
                        "Label file or directory; adds ground-truth rows to trajectories");
  track_cmd->add_option("-o,--output", track.output, "Output directory")->required();
  track_cmd->add_option("-j,--jobs", track.jobs, "Sequences processed in parallel")
      ->check(CLI::PositiveNumber);
  track.config.add_to(track_cmd);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scenario");
  synth_cmd->add_option("-s,--scenario", synth.scenario, "Scenario JSON file")->required();
  synth_cmd->add_option("-o,--output", synth.output, "Output directory")->required();
  synth_cmd->add_option("--seed", synth.seed, "Override the scenario seed");

  OccludeArgs occlude;
  auto* occlude_cmd = app.add_subcommand("occlude", "Remove detections to simulate occlusion");
  occlude_cmd->add_option("-d,--detections", occlude.detections, "Detection file")->required();
  occlude_cmd->add_option("-g,--ground-truth", occlude.ground_truth, "Label file")->required();
  occlude_cmd->add_option("-o,--output", occlude.output, "Occluded detection file")->required();
  occlude_cmd->add_option("--kind", occlude.kind, "Where the gap goes")
      ->check(CLI::IsMember({"mid", "late"}));
  occlude_cmd->add_option("--s-occ", occlude.spec.s_occ, "Detections required before the gap");
  occlude_cmd->add_option("--l-occ", occlude.spec.l_occ, "Detections removed");
  occlude_cmd->add_option("--match-threshold", occlude.spec.match_threshold,
                          "Detection to ground-truth gate (m)");

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score tracks against ground truth");
  evaluate_cmd->add_option("-g,--ground-truth", evaluate.ground_truth, "Label file or directory")
      ->required();
  evaluate_cmd->add_option("-t,--tracks", evaluate.tracks, "Track file or directory")->required();
  evaluate_cmd->add_option("-o,--output", evaluate.output, "Directory for reports/");
  evaluate_cmd->add_option("--threshold", evaluate.threshold, "Match distance (m)");

  CompareArgs compare;
  auto* compare_cmd =
      app.add_subcommand("compare", "Run baseline and dynamic trackers on the same input");
  compare_cmd->add_option("-d,--detections", compare.detections, "Detection file or directory")
      ->required();
  compare_cmd->add_option("-g,--ground-truth", compare.ground_truth, "Label file or directory")
      ->required();
  compare_cmd->add_option("-o,--output", compare.output, "Output directory")->required();
  compare_cmd->add_option("--threshold", compare.threshold, "Match distance (m)");
  compare_cmd->add_option("-j,--jobs", compare.jobs, "Sequences processed in parallel")
      ->check(CLI::PositiveNumber);
  compare_cmd->add_option("--repetitions", compare.repetitions, "Latency repetitions per frame")
      ->check(CLI::PositiveNumber);
  compare.config.add_to(compare_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*track_cmd) return cmd_track(track);
    if (*synth_cmd) return cmd_synth(synth);
    if (*occlude_cmd) return cmd_occlude(occlude);
    if (*evaluate_cmd) return cmd_evaluate(evaluate);
    if (*compare_cmd) return cmd_compare(compare);
  } catch (const UsageError& e) {
    std::cerr << "dynkf: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "dynkf: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "dynkf: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
