#include "mot/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "mot/errors.hpp"

namespace mot {

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw NumericalError("cannot format number");
  return std::string(buf, end);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail(int line_no, const std::string& message) {
  throw InputError("line " + std::to_string(line_no) + ": " + message);
}

double parse_double(std::string_view field, int line_no) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    fail(line_no, "cannot parse number '" + std::string(field) + "'");
  }
  return value;
}

int parse_int(std::string_view field, int line_no) {
  const double v = parse_double(field, line_no);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) fail(line_no, "expected an integer, got '" + std::string(field) + "'");
  return i;
}

struct Row {
  int frame = 0;
  int id = 0;
  Box box;
  double score = 0.0;
  int category = 0;
};

// Visits every non-blank line as a parsed VisDrone row.
template <typename Fn>
void for_each_row(std::istream& in, Fn&& fn) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view content = trim(line);
    if (content.empty()) continue;
    const auto fields = split_fields(content);
    if (fields.size() < 8 || fields.size() > 10) {
      fail(line_no, "expected 8 to 10 comma-separated columns, got " + std::to_string(fields.size()));
    }
    Row row;
    row.frame = parse_int(fields[0], line_no);
    row.id = parse_int(fields[1], line_no);
    row.box = Box{parse_double(fields[2], line_no), parse_double(fields[3], line_no),
                  parse_double(fields[4], line_no), parse_double(fields[5], line_no)};
    row.score = parse_double(fields[6], line_no);
    row.category = parse_int(fields[7], line_no);
    for (std::size_t k = 8; k < fields.size(); ++k) parse_double(fields[k], line_no);
    if (row.frame < 1) fail(line_no, "frame index must be >= 1");
    if (!row.box.valid()) fail(line_no, "box must be finite with positive width and height");
    if (!std::isfinite(row.score)) fail(line_no, "score must be finite");
    fn(row, line_no);
  }
}

void write_row(std::ostream& out, int frame, int id, const Box& b, double score, int category) {
  out << frame << ',' << id << ',' << format_number(b.left) << ',' << format_number(b.top) << ','
      << format_number(b.width) << ',' << format_number(b.height) << ',' << format_number(score)
      << ',' << category << ",-1,-1\n";
}

struct OutRow {
  int frame;
  int id;
  int category;
  Box box;
  double score;
};

void write_rows(std::ostream& out, std::vector<OutRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const OutRow& a, const OutRow& b) {
    return std::tie(a.frame, a.id, a.category) < std::tie(b.frame, b.id, b.category);
  });
  for (const auto& r : rows) write_row(out, r.frame, r.id, r.box, r.score, r.category);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

template <typename Fn>
auto with_path(const std::filesystem::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace

std::vector<Detection> read_detections(std::istream& in, const ClassMap& classes) {
  std::vector<Detection> out;
  std::map<int, int> next_idx;
  for_each_row(in, [&](const Row& row, int line_no) {
    const int idx = next_idx[row.frame]++;
    if (!(row.score >= 0.0 && row.score <= 1.0)) fail(line_no, "detection score must lie in [0, 1]");
    if (!classes.contains(row.category)) return;
    out.push_back({row.frame, idx, row.box, row.score, row.category});
  });
  std::stable_sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
    return std::tie(a.frame, a.det_idx) < std::tie(b.frame, b.det_idx);
  });
  return out;
}

std::vector<Tracklet> read_tracklets(std::istream& in, const ClassMap& classes) {
  std::map<int, Tracklet> by_id;
  std::map<int, int> first_line;
  for_each_row(in, [&](const Row& row, int line_no) {
    if (!classes.contains(row.category)) return;
    auto [it, inserted] = by_id.try_emplace(row.id);
    Tracklet& tl = it->second;
    const int rough = classes.rough_of(row.category);
    if (inserted) {
      tl.id = row.id;
      tl.rough_class = rough;
      first_line[row.id] = line_no;
    } else if (tl.rough_class != rough) {
      fail(line_no, "track " + std::to_string(row.id) + " mixes rough classes");
    }
    tl.entries.push_back({row.frame, row.box, row.score, row.category, -1, false});
  });
  std::vector<Tracklet> out;
  for (auto& [id, tl] : by_id) {
    std::stable_sort(tl.entries.begin(), tl.entries.end(),
                     [](const TrackEntry& a, const TrackEntry& b) { return a.frame < b.frame; });
    for (std::size_t k = 1; k < tl.entries.size(); ++k) {
      if (tl.entries[k].frame == tl.entries[k - 1].frame) {
        fail(first_line[id], "track " + std::to_string(id) + " has two rows in frame " +
                                 std::to_string(tl.entries[k].frame));
      }
    }
    out.push_back(std::move(tl));
  }
  return out;
}

std::vector<Trajectory> read_results(std::istream& in, bool drop_zero_score) {
  std::map<std::pair<int, int>, Trajectory> by_key;
  std::map<std::pair<int, int>, int> first_line;
  for_each_row(in, [&](const Row& row, int line_no) {
    if (drop_zero_score && row.score == 0.0) return;
    const auto key = std::make_pair(row.id, row.category);
    auto [it, inserted] = by_key.try_emplace(key);
    if (inserted) {
      it->second.id = row.id;
      it->second.class_votes = {{row.category, 1.0}};
      first_line[key] = line_no;
    }
    it->second.entries.push_back({row.frame, row.box, row.score, row.category, -1, false});
  });
  std::vector<Trajectory> out;
  for (auto& [key, t] : by_key) {
    std::stable_sort(t.entries.begin(), t.entries.end(),
                     [](const TrackEntry& a, const TrackEntry& b) { return a.frame < b.frame; });
    for (std::size_t k = 1; k < t.entries.size(); ++k) {
      if (t.entries[k].frame == t.entries[k - 1].frame) {
        fail(first_line[key], "track " + std::to_string(key.first) + " class " +
                                  std::to_string(key.second) + " has two rows in frame " +
                                  std::to_string(t.entries[k].frame));
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

void write_detections(std::ostream& out, std::span<const Detection> detections) {
  for (const auto& d : detections) write_row(out, d.frame, -1, d.box, d.score, d.class_id);
}

void write_tracklets(std::ostream& out, std::span<const Trajectory> trajectories) {
  std::vector<OutRow> rows;
  for (const auto& t : trajectories) {
    for (const auto& e : t.entries) rows.push_back({e.frame, t.id, e.class_id, e.box, e.score});
  }
  write_rows(out, std::move(rows));
}

void write_tracklets(std::ostream& out, std::span<const Tracklet> tracklets) {
  std::vector<OutRow> rows;
  for (const auto& t : tracklets) {
    for (const auto& e : t.entries) rows.push_back({e.frame, t.id, e.class_id, e.box, e.score});
  }
  write_rows(out, std::move(rows));
}

void write_results(std::ostream& out, std::span<const Trajectory> trajectories) {
  std::vector<OutRow> rows;
  for (const auto& t : trajectories) {
    if (t.class_votes.empty()) {
      for (const auto& e : t.entries) rows.push_back({e.frame, t.id, e.class_id, e.box, e.score});
      continue;
    }
    for (const auto& v : t.class_votes) {
      for (const auto& e : t.entries) {
        const double score = v.weight == 1.0 ? e.score : e.score * v.weight;
        rows.push_back({e.frame, t.id, v.class_id, e.box, score});
      }
    }
  }
  write_rows(out, std::move(rows));
}

EmbeddingStore read_embeddings(std::istream& in) {
  std::string line;
  int line_no = 0;
  Eigen::Index dim = -1;
  EmbeddingStore store;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view content = trim(line);
    if (content.empty()) continue;
    if (dim < 0) {
      if (content.substr(0, 4) != "dim=") fail(line_no, "expected header 'dim=D'");
      dim = parse_int(content.substr(4), line_no);
      if (dim < 1) fail(line_no, "embedding dimension must be positive");
      store = EmbeddingStore(dim);
      continue;
    }
    const auto fields = split_fields(content);
    if (static_cast<Eigen::Index>(fields.size()) != dim + 2) {
      fail(line_no, "expected " + std::to_string(dim + 2) + " columns, got " +
                        std::to_string(fields.size()));
    }
    const int frame = parse_int(fields[0], line_no);
    const int key = parse_int(fields[1], line_no);
    Eigen::VectorXd v(dim);
    for (Eigen::Index k = 0; k < dim; ++k) v(k) = parse_double(fields[2 + k], line_no);
    try {
      store.insert(frame, key, Embedding::from_values(std::move(v)));
    } catch (const std::exception& e) {
      fail(line_no, e.what());
    }
  }
  if (dim < 0) throw InputError("embedding sidecar has no 'dim=D' header");
  return store;
}

void write_embeddings(std::ostream& out, const EmbeddingStore& store) {
  out << "dim=" << store.dim() << '\n';
  for (const auto& [key, emb] : store.table()) {
    out << key.first << ',' << key.second;
    for (Eigen::Index k = 0; k < emb.dim(); ++k) out << ',' << format_number(emb.values()(k));
    out << '\n';
  }
}

TransformTable read_transforms(std::istream& in) {
  std::string line;
  int line_no = 0;
  TransformTable table;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view content = trim(line);
    if (content.empty()) continue;
    const auto fields = split_fields(content);
    if (fields.size() != 7) fail(line_no, "expected 7 columns, got " + std::to_string(fields.size()));
    const int frame = parse_int(fields[0], line_no);
    AffineTransform t{parse_double(fields[1], line_no), parse_double(fields[2], line_no),
                      parse_double(fields[3], line_no), parse_double(fields[4], line_no),
                      parse_double(fields[5], line_no), parse_double(fields[6], line_no)};
    if (table.contains(frame)) fail(line_no, "duplicate transform for frame " + std::to_string(frame));
    try {
      table.set(frame, t);
    } catch (const NumericalError& e) {
      fail(line_no, e.what());
    }
  }
  return table;
}

void write_transforms(std::ostream& out, const TransformTable& table) {
  for (const auto& [frame, t] : table.table()) {
    out << frame << ',' << format_number(t.a11) << ',' << format_number(t.a12) << ','
        << format_number(t.a21) << ',' << format_number(t.a22) << ',' << format_number(t.tx) << ','
        << format_number(t.ty) << '\n';
  }
}

std::vector<Detection> load_detections(const std::filesystem::path& path, const ClassMap& classes) {
  return with_path(path, [&] {
    auto in = open_input(path);
    return read_detections(in, classes);
  });
}

std::vector<Tracklet> load_tracklets(const std::filesystem::path& path, const ClassMap& classes) {
  return with_path(path, [&] {
    auto in = open_input(path);
    return read_tracklets(in, classes);
  });
}

std::vector<Trajectory> load_results(const std::filesystem::path& path, bool drop_zero_score) {
  return with_path(path, [&] {
    auto in = open_input(path);
    return read_results(in, drop_zero_score);
  });
}

EmbeddingStore load_embeddings(const std::filesystem::path& path) {
  return with_path(path, [&] {
    auto in = open_input(path);
    return read_embeddings(in);
  });
}

TransformTable load_transforms(const std::filesystem::path& path) {
  return with_path(path, [&] {
    auto in = open_input(path);
    return read_transforms(in);
  });
}

void save_tracklets(const std::filesystem::path& path, std::span<const Trajectory> trajectories) {
  auto out = open_output(path);
  write_tracklets(out, trajectories);
}

void save_detections(const std::filesystem::path& path, std::span<const Detection> detections) {
  auto out = open_output(path);
  write_detections(out, detections);
}

void save_tracklets(const std::filesystem::path& path, std::span<const Tracklet> tracklets) {
  auto out = open_output(path);
  write_tracklets(out, tracklets);
}

void save_results(const std::filesystem::path& path, std::span<const Trajectory> trajectories) {
  auto out = open_output(path);
  write_results(out, trajectories);
}

void save_embeddings(const std::filesystem::path& path, const EmbeddingStore& store) {
  auto out = open_output(path);
  write_embeddings(out, store);
}

void save_transforms(const std::filesystem::path& path, const TransformTable& table) {
  auto out = open_output(path);
  write_transforms(out, table);
}

void save_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
}

}  // namespace mot
