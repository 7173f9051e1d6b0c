#include "dynkf/kitti_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <system_error>
#include <tuple>

namespace dynkf {
namespace {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based character column
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back({line.substr(start, i - start), start + 1});
  }
  return tokens;
}

class LineParser {
 public:
  LineParser(const std::string& source, std::size_t line_no, std::vector<Token> tokens)
      : source_(source), line_no_(line_no), tokens_(std::move(tokens)) {}

  [[noreturn]] void fail(const std::string& msg, std::size_t column) const {
    std::ostringstream os;
    os << source_ << ":" << line_no_ << ":" << column << ": " << msg;
    throw ParseError(os.str(), line_no_, column);
  }

  double real(std::size_t field, const char* name) const {
    const Token& t = tokens_[field];
    double value = 0.0;
    const auto* first = t.text.data();
    const auto* last = first + t.text.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last || !std::isfinite(value)) {
      fail(std::string("invalid ") + name + " '" + std::string(t.text) + "'", t.column);
    }
    return value;
  }

  int integer(std::size_t field, const char* name) const {
    const Token& t = tokens_[field];
    int value = 0;
    const auto* first = t.text.data();
    const auto* last = first + t.text.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last) {
      fail(std::string("invalid ") + name + " '" + std::string(t.text) + "'", t.column);
    }
    return value;
  }

  std::string word(std::size_t field) const { return std::string(tokens_[field].text); }
  std::size_t column(std::size_t field) const { return tokens_[field].column; }
  std::size_t size() const { return tokens_.size(); }

 private:
  const std::string& source_;
  std::size_t line_no_;
  std::vector<Token> tokens_;
};

// Fields after frame (and track id): type truncated occluded alpha bbox(4)
// dims(3) location(3) rotation_y [score].
void read_object_fields(const LineParser& p, std::size_t first, DetectionRecord& r) {
  r.type = p.word(first);
  r.truncated = p.real(first + 1, "truncated");
  r.occluded = p.integer(first + 2, "occluded");
  r.alpha = p.real(first + 3, "alpha");
  for (std::size_t i = 0; i < 4; ++i) r.bbox[i] = p.real(first + 4 + i, "bbox");
  r.dims.height = p.real(first + 8, "height");
  r.dims.width = p.real(first + 9, "width");
  r.dims.length = p.real(first + 10, "length");
  for (std::size_t i = 0; i < 3; ++i) {
    r.location[static_cast<Eigen::Index>(i)] = p.real(first + 11 + i, "location");
  }
  r.rotation_y = p.real(first + 14, "rotation_y");
  if (!is_dont_care(r)) {
    if (!(r.dims.height > 0.0)) p.fail("height must be positive", p.column(first + 8));
    if (!(r.dims.width > 0.0)) p.fail("width must be positive", p.column(first + 9));
    if (!(r.dims.length > 0.0)) p.fail("length must be positive", p.column(first + 10));
  }
}

template <class Record, class Fn>
Frames<Record> parse_lines(const std::string& text, const std::string& source, Fn&& parse_one) {
  Frames<Record> frames;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    LineParser p(source, line_no, std::move(tokens));
    Record record = parse_one(p);
    if (record.frame < 0) p.fail("frame must be non-negative", p.column(0));
    if (static_cast<std::size_t>(record.frame) >= frames.size()) {
      frames.resize(static_cast<std::size_t>(record.frame) + 1);
    }
    frames[static_cast<std::size_t>(record.frame)].push_back(std::move(record));
  }
  return frames;
}

void append_real(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void append_object_fields(std::string& out, const DetectionRecord& r) {
  out += r.type;
  out += ' ';
  append_real(out, r.truncated);
  out += ' ';
  out += std::to_string(r.occluded);
  out += ' ';
  append_real(out, r.alpha);
  for (double b : r.bbox) {
    out += ' ';
    append_real(out, b);
  }
  for (double v : {r.dims.height, r.dims.width, r.dims.length, r.location.x(), r.location.y(),
                   r.location.z(), r.rotation_y}) {
    out += ' ';
    append_real(out, v);
  }
}

}  // namespace

Measurement to_measurement(const DetectionRecord& record) {
  Measurement m;
  m.position = record.ground_position();
  m.aux.elevation = record.location.y();
  m.aux.yaw = record.rotation_y;
  m.aux.length = record.dims.length;
  m.aux.width = record.dims.width;
  m.aux.height = record.dims.height;
  return m;
}

Eigen::Vector3d camera_location(const Vector2& ground, double elevation) {
  return {ground.x(), elevation, ground.y()};
}

bool is_dont_care(const DetectionRecord& record) { return record.type == "DontCare"; }

Frames<DetectionRecord> parse_detection_text(const std::string& text, const std::string& source) {
  return parse_lines<DetectionRecord>(text, source, [](const LineParser& p) {
    if (p.size() != 17) {
      p.fail("expected 17 fields in a detection line, got " + std::to_string(p.size()), 0);
    }
    DetectionRecord r;
    r.frame = p.integer(0, "frame");
    read_object_fields(p, 1, r);
    r.score = p.real(16, "score");
    return r;
  });
}

Frames<LabeledRecord> parse_label_text(const std::string& text, const std::string& source) {
  return parse_lines<LabeledRecord>(text, source, [](const LineParser& p) {
    if (p.size() != 17 && p.size() != 18) {
      p.fail("expected 17 or 18 fields in a label line, got " + std::to_string(p.size()), 0);
    }
    LabeledRecord r;
    r.frame = p.integer(0, "frame");
    r.track_id = p.integer(1, "track_id");
    read_object_fields(p, 2, r);
    if (p.size() == 18) r.score = p.real(17, "score");
    if (r.track_id < 0 && !is_dont_care(r)) {
      p.fail("track_id must be non-negative", p.column(1));
    }
    return r;
  });
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

SequenceDataset parse_detections(const std::filesystem::path& path, double dt) {
  SequenceDataset ds;
  ds.id = path.stem().string();
  ds.dt = dt;
  ds.detections = parse_detection_text(read_text_file(path), path.string());
  return ds;
}

Frames<LabeledRecord> parse_labels(const std::filesystem::path& path) {
  return parse_label_text(read_text_file(path), path.string());
}

std::string format_detections(const Frames<DetectionRecord>& frames) {
  std::string out;
  for (const auto& frame : frames) {
    for (const auto& r : frame) {
      out += std::to_string(r.frame);
      out += ' ';
      append_object_fields(out, r);
      out += ' ';
      append_real(out, r.score);
      out += '\n';
    }
  }
  return out;
}

std::string format_tracks(const Frames<LabeledRecord>& frames, bool with_score) {
  std::string out;
  for (const auto& frame : frames) {
    std::vector<const LabeledRecord*> sorted;
    sorted.reserve(frame.size());
    for (const auto& r : frame) sorted.push_back(&r);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto* a, const auto* b) { return a->track_id < b->track_id; });
    for (const auto* r : sorted) {
      out += std::to_string(r->frame);
      out += ' ';
      out += std::to_string(r->track_id);
      out += ' ';
      append_object_fields(out, *r);
      if (with_score) {
        out += ' ';
        append_real(out, r->score);
      }
      out += '\n';
    }
  }
  return out;
}

void write_detections(const Frames<DetectionRecord>& frames, const std::filesystem::path& path) {
  write_text_file(path, format_detections(frames));
}

void write_tracks(const Frames<LabeledRecord>& frames, const std::filesystem::path& path,
                  bool with_score) {
  write_text_file(path, format_tracks(frames, with_score));
}

std::string to_string(TrajectorySource source) {
  switch (source) {
    case TrajectorySource::kGroundTruth:
      return "ground_truth";
    case TrajectorySource::kMeasurement:
      return "measurement";
    case TrajectorySource::kPredicted:
      return "predicted";
    case TrajectorySource::kUpdated:
      return "updated";
  }
  return "unknown";
}

std::string format_trajectory_csv(std::vector<TrajectoryRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const TrajectoryRow& a, const TrajectoryRow& b) {
    return std::make_tuple(a.frame, a.track_id, to_string(a.source)) <
           std::make_tuple(b.frame, b.track_id, to_string(b.source));
  });
  std::string out = "frame,track_id,x,y,source\n";
  for (const auto& r : rows) {
    out += std::to_string(r.frame);
    out += ',';
    out += std::to_string(r.track_id);
    out += ',';
    append_real(out, r.x);
    out += ',';
    append_real(out, r.y);
    out += ',';
    out += to_string(r.source);
    out += '\n';
  }
  return out;
}

void export_trajectory_csv(const std::vector<TrajectoryRow>& rows,
                           const std::filesystem::path& path) {
  write_text_file(path, format_trajectory_csv(rows));
}

std::vector<TrajectoryRow> parse_trajectory_csv(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  std::vector<TrajectoryRow> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 5 columns",
                       line_no, 0);
    }
    TrajectoryRow r;
    try {
      r.frame = std::stoi(cells[0]);
      r.track_id = std::stoi(cells[1]);
      r.x = std::stod(cells[2]);
      r.y = std::stod(cells[3]);
    } catch (const std::exception&) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad number", line_no, 0);
    }
    const std::string& s = cells[4];
    if (s == "ground_truth") {
      r.source = TrajectorySource::kGroundTruth;
    } else if (s == "measurement") {
      r.source = TrajectorySource::kMeasurement;
    } else if (s == "predicted") {
      r.source = TrajectorySource::kPredicted;
    } else if (s == "updated") {
      r.source = TrajectorySource::kUpdated;
    } else {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": unknown source '" + s +
                           "'",
                       line_no, 5);
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace dynkf
