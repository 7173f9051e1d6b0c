#include "dynkf/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "dynkf/assignment.hpp"

namespace dynkf {
namespace {

std::size_t aligned_length(const ObjectSequence& a, const ObjectSequence& b) {
  return std::max(a.size(), b.size());
}

const FrameObjects& frame_or_empty(const ObjectSequence& seq, std::size_t f) {
  static const FrameObjects kEmpty;
  return f < seq.size() ? seq[f] : kEmpty;
}

std::string fmt_opt(const std::optional<double>& v) {
  if (!v) return "nan";
  std::ostringstream os;
  os.precision(6);
  os << *v;
  return os.str();
}

}  // namespace

ObjectSequence to_object_sequence(const Frames<LabeledRecord>& frames) {
  ObjectSequence out(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (const auto& r : frames[f]) {
      if (!is_dont_care(r)) out[f].add(r.track_id, r.ground_position());
    }
  }
  return out;
}

MotSummary clearmot(const ObjectSequence& gt, const ObjectSequence& hyp, double threshold) {
  MotSummary s;
  s.threshold = threshold;
  std::unordered_map<int, int> previous;      // gt id -> hyp id, last frame only
  std::unordered_map<int, int> last_matched;  // gt id -> hyp id, most recent ever
  double total_distance = 0.0;

  const std::size_t frames = aligned_length(gt, hyp);
  for (std::size_t f = 0; f < frames; ++f) {
    const FrameObjects& g = frame_or_empty(gt, f);
    const FrameObjects& h = frame_or_empty(hyp, f);
    s.ground_truth += static_cast<int>(g.size());

    std::vector<char> g_used(g.size(), 0), h_used(h.size(), 0);
    std::vector<std::pair<int, int>> matched;  // (gt index, hyp index)

    for (std::size_t gi = 0; gi < g.size(); ++gi) {
      const auto it = previous.find(g.ids[gi]);
      if (it == previous.end()) continue;
      for (std::size_t hi = 0; hi < h.size(); ++hi) {
        if (h_used[hi] || h.ids[hi] != it->second) continue;
        if ((g.positions[gi] - h.positions[hi]).norm() <= threshold) {
          g_used[gi] = h_used[hi] = 1;
          matched.emplace_back(static_cast<int>(gi), static_cast<int>(hi));
        }
        break;
      }
    }

    std::vector<int> g_free, h_free;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!g_used[i]) g_free.push_back(static_cast<int>(i));
    for (std::size_t i = 0; i < h.size(); ++i)
      if (!h_used[i]) h_free.push_back(static_cast<int>(i));
    if (!g_free.empty() && !h_free.empty()) {
      Matrix cost(static_cast<Eigen::Index>(g_free.size()),
                  static_cast<Eigen::Index>(h_free.size()));
      for (std::size_t a = 0; a < g_free.size(); ++a)
        for (std::size_t b = 0; b < h_free.size(); ++b)
          cost(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
              (g.positions[static_cast<std::size_t>(g_free[a])] -
               h.positions[static_cast<std::size_t>(h_free[b])])
                  .norm();
      for (const auto& [a, b] : gated_assignment(cost, threshold).pairs) {
        matched.emplace_back(g_free[static_cast<std::size_t>(a)],
                             h_free[static_cast<std::size_t>(b)]);
      }
    }

    previous.clear();
    for (const auto& [gi, hi] : matched) {
      const int gid = g.ids[static_cast<std::size_t>(gi)];
      const int hid = h.ids[static_cast<std::size_t>(hi)];
      const auto last = last_matched.find(gid);
      if (last != last_matched.end() && last->second != hid) ++s.id_switches;
      last_matched[gid] = hid;
      previous[gid] = hid;
      total_distance += (g.positions[static_cast<std::size_t>(gi)] -
                         h.positions[static_cast<std::size_t>(hi)])
                            .norm();
    }
    const int m = static_cast<int>(matched.size());
    s.matches += m;
    s.false_negatives += static_cast<int>(g.size()) - m;
    s.false_positives += static_cast<int>(h.size()) - m;
  }

  if (s.ground_truth > 0) {
    s.mota = 1.0 - static_cast<double>(s.false_negatives + s.false_positives + s.id_switches) /
                       static_cast<double>(s.ground_truth);
  }
  if (s.matches > 0) s.motp = total_distance / s.matches;
  return s;
}

IdSummary idf1(const ObjectSequence& gt, const ObjectSequence& hyp, double threshold) {
  std::map<int, int> g_index, h_index;
  int n_gt = 0, n_hyp = 0;
  for (const auto& fr : gt) {
    for (int id : fr.ids) g_index.emplace(id, 0);
    n_gt += static_cast<int>(fr.size());
  }
  for (const auto& fr : hyp) {
    for (int id : fr.ids) h_index.emplace(id, 0);
    n_hyp += static_cast<int>(fr.size());
  }
  int k = 0;
  for (auto& [id, idx] : g_index) idx = k++;
  k = 0;
  for (auto& [id, idx] : h_index) idx = k++;

  Matrix overlap = Matrix::Zero(static_cast<Eigen::Index>(g_index.size()),
                                static_cast<Eigen::Index>(h_index.size()));
  const std::size_t frames = aligned_length(gt, hyp);
  for (std::size_t f = 0; f < frames; ++f) {
    const FrameObjects& g = frame_or_empty(gt, f);
    const FrameObjects& h = frame_or_empty(hyp, f);
    for (std::size_t gi = 0; gi < g.size(); ++gi) {
      for (std::size_t hi = 0; hi < h.size(); ++hi) {
        if ((g.positions[gi] - h.positions[hi]).norm() <= threshold) {
          overlap(g_index.at(g.ids[gi]), h_index.at(h.ids[hi])) += 1.0;
        }
      }
    }
  }

  IdSummary s;
  if (overlap.size() > 0) {
    const std::vector<int> assign = solve_assignment(-overlap);
    for (std::size_t r = 0; r < assign.size(); ++r) {
      if (assign[r] >= 0) s.idtp += static_cast<int>(overlap(static_cast<Eigen::Index>(r), assign[r]));
    }
  }
  s.idfn = n_gt - s.idtp;
  s.idfp = n_hyp - s.idtp;
  const int denom = 2 * s.idtp + s.idfp + s.idfn;
  if (denom > 0) s.idf1 = 2.0 * s.idtp / denom;
  if (n_hyp > 0) s.idp = static_cast<double>(s.idtp) / n_hyp;
  if (n_gt > 0) s.idr = static_cast<double>(s.idtp) / n_gt;
  return s;
}

PhaseStats summarize(const std::vector<double>& values) {
  PhaseStats s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / s.count;
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (s.count - 1));
  }
  return s;
}

LocalizationReport localization_error(const std::map<int, Trajectory>& gt,
                                      const std::map<int, Trajectory>& estimated,
                                      const OcclusionMask& occluded) {
  LocalizationReport report;
  for (const auto& [id, truth] : gt) {
    TrackLocalization entry;
    entry.id = id;
    const auto est_it = estimated.find(id);
    if (est_it != estimated.end()) {
      std::vector<double> observed, hidden;
      for (const auto& [frame, pos] : truth) {
        const auto e = est_it->second.find(frame);
        if (e == est_it->second.end()) continue;
        const double err = (e->second - pos).norm();
        entry.errors.emplace_back(frame, err);
        (occluded.contains({id, frame}) ? hidden : observed).push_back(err);
      }
      entry.observed = summarize(observed);
      entry.occluded = summarize(hidden);
    }
    report.tracks.push_back(std::move(entry));
  }
  return report;
}

LatencyReport measure_latency(const SequenceDataset& dataset, const TrackerConfig& baseline,
                              const TrackerConfig& dynamic, int warmup, int repetitions) {
  LatencyReport report;
  const int frames = dataset.frame_count();
  if (frames <= warmup) return report;
  repetitions = std::max(repetitions, 1);

  const auto time_run = [&](const TrackerConfig& base_cfg) {
    TrackerConfig cfg = base_cfg;
    cfg.filter.dt = dataset.dt;
    std::vector<double> best(static_cast<std::size_t>(frames - warmup),
                             std::numeric_limits<double>::infinity());
    for (int rep = 0; rep < repetitions; ++rep) {
      Tracker tracker(cfg);
      for (int f = 0; f < frames; ++f) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto out = tracker.step(f, dataset.detections[static_cast<std::size_t>(f)]);
        const auto t1 = std::chrono::steady_clock::now();
        if (f < warmup) continue;
        const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        auto& slot = best[static_cast<std::size_t>(f - warmup)];
        slot = std::min(slot, ms);
      }
    }
    return best;
  };

  report.baseline_ms = time_run(baseline);
  report.dynamic_ms = time_run(dynamic);
  const auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  report.mean_baseline_ms = mean(report.baseline_ms);
  report.mean_dynamic_ms = mean(report.dynamic_ms);
  report.mean_delta_ms = report.mean_dynamic_ms - report.mean_baseline_ms;
  return report;
}

std::string format_summary(const MotSummary& mot, const IdSummary& id) {
  std::ostringstream os;
  os << "MOTA " << fmt_opt(mot.mota) << "  MOTP " << fmt_opt(mot.motp) << " m"
     << "  IDF1 " << fmt_opt(id.idf1) << "  IDP " << fmt_opt(id.idp) << "  IDR "
     << fmt_opt(id.idr) << "\n"
     << "GT " << mot.ground_truth << "  matches " << mot.matches << "  FP "
     << mot.false_positives << "  FN " << mot.false_negatives << "  IDSW " << mot.id_switches
     << "  IDTP " << id.idtp << "  IDFP " << id.idfp << "  IDFN " << id.idfn
     << "  threshold " << mot.threshold << " m\n";
  return os.str();
}

std::string metrics_csv_header() {
  return "label,mota,motp,idf1,idp,idr,gt,matches,fp,fn,idsw,idtp,idfp,idfn,threshold\n";
}

std::string metrics_csv_row(const std::string& label, const MotSummary& mot,
                            const IdSummary& id) {
  std::ostringstream os;
  os << label << ',' << fmt_opt(mot.mota) << ',' << fmt_opt(mot.motp) << ','
     << fmt_opt(id.idf1) << ',' << fmt_opt(id.idp) << ',' << fmt_opt(id.idr) << ','
     << mot.ground_truth << ',' << mot.matches << ',' << mot.false_positives << ','
     << mot.false_negatives << ',' << mot.id_switches << ',' << id.idtp << ',' << id.idfp << ','
     << id.idfn << ',' << mot.threshold << '\n';
  return os.str();
}

}  // namespace dynkf
