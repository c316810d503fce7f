#pragma once

#include <map>
#include <span>
#include <vector>

namespace mot {

// Axis-aligned box in pixels, stored as (left, top, width, height) to match
// the VisDrone text format.
struct Box {
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;

  double right() const { return left + width; }
  double bottom() const { return top + height; }
  double area() const { return width * height; }
  double center_x() const { return left + 0.5 * width; }
  double center_y() const { return top + 0.5 * height; }

  // Finite coordinates and strictly positive extent.
  bool valid() const;

  bool operator==(const Box&) const = default;
};

// Throws InputError unless the box is valid.
Box make_box(double left, double top, double width, double height);
Box box_from_center(double cx, double cy, double width, double height);

struct Detection {
  int frame = 0;    // 1-based
  int det_idx = 0;  // ordinal within the frame; key into the embedding sidecar
  Box box;
  double score = 0.0;
  int class_id = 0;
};

struct TrackEntry {
  int frame = 0;
  Box box;
  double score = 0.0;
  int class_id = 0;
  int det_idx = -1;  // source detection, -1 when synthesized or read from a result file
  bool interpolated = false;
};

struct ClassVote {
  int class_id = 0;
  double weight = 0.0;

  bool operator==(const ClassVote&) const = default;
};

struct Tracklet {
  int id = 0;
  std::vector<TrackEntry> entries;  // frames strictly increasing
  int rough_class = 0;
};

// A (possibly linked) track. With empty class_votes each entry keeps its own
// fine class; otherwise every vote labels the whole trajectory and the
// per-class score of an entry is score * weight.
struct Trajectory {
  int id = 0;
  std::vector<TrackEntry> entries;
  std::vector<ClassVote> class_votes;
  int rough_class = 0;
};

Trajectory to_trajectory(const Tracklet& tracklet);

double box_iou(const Box& a, const Box& b);

// Summed per-frame intersection over summed per-frame union across the union
// of both supports. Entries must be sorted by frame.
double tube_iou(std::span<const TrackEntry> a, std::span<const TrackEntry> b);
double tube_iou(const Trajectory& a, const Trajectory& b);

double mean_score(std::span<const TrackEntry> entries);
double total_score(std::span<const TrackEntry> entries);

// Label used by per-class stages: the first vote if present, otherwise the
// fine class of the first entry.
int label_of(const Trajectory& trajectory);

// Rewrites every trajectory into single-label trajectories: one copy per
// vote with scores multiplied by the vote weight (weight folded to 1), or,
// for unvoted trajectories, one copy per distinct entry class.
std::vector<Trajectory> split_by_class(std::span<const Trajectory> trajectories);

// Throws InputError when frames are not strictly increasing or the entry
// list is empty.
void check_entries(std::span<const TrackEntry> entries);

// Fine class -> rough class grouping used for joint tracking of visually
// confusable categories.
class ClassMap {
 public:
  ClassMap() = default;
  explicit ClassMap(std::map<int, int> fine_to_rough);

  // pedestrian(1) -> 0; car(4), van(5), truck(6), bus(9) -> 1.
  static ClassMap visdrone_default();

  bool contains(int fine_class) const;
  int rough_of(int fine_class) const;  // throws InputError for unknown classes
  const std::map<int, int>& mapping() const { return fine_to_rough_; }

 private:
  std::map<int, int> fine_to_rough_;
};

inline constexpr int kRoughPerson = 0;
inline constexpr int kRoughVehicle = 1;

}  // namespace mot
