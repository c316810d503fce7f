#include "mot/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "mot/errors.hpp"

namespace mot {

bool Box::valid() const {
  return std::isfinite(left) && std::isfinite(top) && std::isfinite(width) &&
         std::isfinite(height) && width > 0.0 && height > 0.0;
}

Box make_box(double left, double top, double width, double height) {
  Box box{left, top, width, height};
  if (!box.valid()) {
    throw InputError("invalid box (" + std::to_string(left) + ", " + std::to_string(top) + ", " +
                     std::to_string(width) + ", " + std::to_string(height) + ")");
  }
  return box;
}

Box box_from_center(double cx, double cy, double width, double height) {
  return Box{cx - 0.5 * width, cy - 0.5 * height, width, height};
}

Trajectory to_trajectory(const Tracklet& tracklet) {
  return Trajectory{tracklet.id, tracklet.entries, {}, tracklet.rough_class};
}

double box_iou(const Box& a, const Box& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.left, b.left);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top, b.top);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

namespace {

double intersection_area(const Box& a, const Box& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.left, b.left);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top, b.top);
  return (iw <= 0.0 || ih <= 0.0) ? 0.0 : iw * ih;
}

}  // namespace

double tube_iou(std::span<const TrackEntry> a, std::span<const TrackEntry> b) {
  double inter = 0.0;
  double uni = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].frame < b[j].frame)) {
      uni += a[i++].box.area();
    } else if (i == a.size() || b[j].frame < a[i].frame) {
      uni += b[j++].box.area();
    } else {
      const double overlap = intersection_area(a[i].box, b[j].box);
      inter += overlap;
      uni += a[i].box.area() + b[j].box.area() - overlap;
      ++i;
      ++j;
    }
  }
  return uni > 0.0 ? inter / uni : 0.0;
}

double tube_iou(const Trajectory& a, const Trajectory& b) { return tube_iou(a.entries, b.entries); }

double total_score(std::span<const TrackEntry> entries) {
  double sum = 0.0;
  for (const auto& e : entries) sum += e.score;
  return sum;
}

double mean_score(std::span<const TrackEntry> entries) {
  return entries.empty() ? 0.0 : total_score(entries) / static_cast<double>(entries.size());
}

int label_of(const Trajectory& trajectory) {
  if (!trajectory.class_votes.empty()) return trajectory.class_votes.front().class_id;
  if (trajectory.entries.empty()) throw PreconditionError("label_of: empty trajectory");
  return trajectory.entries.front().class_id;
}

std::vector<Trajectory> split_by_class(std::span<const Trajectory> trajectories) {
  std::vector<Trajectory> out;
  for (const auto& t : trajectories) {
    if (!t.class_votes.empty()) {
      for (const auto& vote : t.class_votes) {
        Trajectory copy{t.id, t.entries, {{vote.class_id, 1.0}}, t.rough_class};
        for (auto& e : copy.entries) {
          e.class_id = vote.class_id;
          if (vote.weight != 1.0) e.score *= vote.weight;
        }
        out.push_back(std::move(copy));
      }
      continue;
    }
    std::set<int> classes;
    for (const auto& e : t.entries) classes.insert(e.class_id);
    for (int c : classes) {
      Trajectory copy{t.id, {}, {{c, 1.0}}, t.rough_class};
      for (const auto& e : t.entries) {
        if (e.class_id == c) copy.entries.push_back(e);
      }
      out.push_back(std::move(copy));
    }
  }
  return out;
}

void check_entries(std::span<const TrackEntry> entries) {
  if (entries.empty()) throw InputError("track has no entries");
  for (std::size_t k = 1; k < entries.size(); ++k) {
    if (entries[k].frame <= entries[k - 1].frame) {
      throw InputError("track frames not strictly increasing at frame " +
                       std::to_string(entries[k].frame));
    }
  }
}

ClassMap::ClassMap(std::map<int, int> fine_to_rough) : fine_to_rough_(std::move(fine_to_rough)) {}

ClassMap ClassMap::visdrone_default() {
  return ClassMap({{1, kRoughPerson}, {4, kRoughVehicle}, {5, kRoughVehicle}, {6, kRoughVehicle},
                   {9, kRoughVehicle}});
}

bool ClassMap::contains(int fine_class) const { return fine_to_rough_.count(fine_class) != 0; }

int ClassMap::rough_of(int fine_class) const {
  auto it = fine_to_rough_.find(fine_class);
  if (it == fine_to_rough_.end()) {
    throw InputError("class " + std::to_string(fine_class) + " is not in the configured class map");
  }
  return it->second;
}

}  // namespace mot
