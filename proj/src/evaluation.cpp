#include "mot/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "mot/errors.hpp"
#include "mot/io.hpp"

namespace mot {

namespace {

// All-points interpolated AP from per-rank TP flags.
double average_precision(const std::vector<char>& is_tp, int num_gt) {
  if (num_gt == 0) return 0.0;
  const std::size_t n = is_tp.size();
  std::vector<double> precision(n);
  int tp = 0;
  for (std::size_t k = 0; k < n; ++k) {
    tp += is_tp[k];
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  // Precision envelope: max precision at this or any later rank.
  for (std::size_t k = n; k-- > 1;) precision[k - 1] = std::max(precision[k - 1], precision[k]);
  // Each true positive raises recall by 1/num_gt.
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (is_tp[k]) sum += precision[k];
  }
  return sum / static_cast<double>(num_gt);
}

std::string threshold_label(double t) { return format_number(t); }

}  // namespace

double EvalReport::map_at(double threshold) const {
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    if (thresholds[k] != threshold) continue;
    if (classes.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& c : classes) sum += c.ap[k];
    return sum / static_cast<double>(classes.size());
  }
  throw InputError("threshold " + threshold_label(threshold) + " was not evaluated");
}

double EvalReport::ap(int class_id, double threshold) const {
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    if (thresholds[k] != threshold) continue;
    for (const auto& c : classes) {
      if (c.class_id == class_id) return c.ap[k];
    }
  }
  throw InputError("no AP for class " + std::to_string(class_id) + " at threshold " +
                   threshold_label(threshold));
}

std::string EvalReport::to_table() const {
  std::ostringstream os;
  char buf[64];
  os << "class   #gt  #pred";
  for (double t : thresholds) {
    std::snprintf(buf, sizeof(buf), "  AP@%-5s", threshold_label(t).c_str());
    os << buf;
  }
  os << '\n';
  for (const auto& c : classes) {
    std::snprintf(buf, sizeof(buf), "%5d %5d %6d", c.class_id, c.num_ground_truth, c.num_predictions);
    os << buf;
    for (double ap : c.ap) {
      std::snprintf(buf, sizeof(buf), "  %8.4f", ap);
      os << buf;
    }
    os << '\n';
  }
  std::snprintf(buf, sizeof(buf), "mAP %.4f\n", map);
  os << buf;
  return os.str();
}

std::string EvalReport::to_key_values() const {
  std::ostringstream os;
  os << "map=" << format_number(map) << '\n';
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    os << "map@" << threshold_label(thresholds[k]) << '=' << format_number(map_at(thresholds[k]))
       << '\n';
  }
  for (const auto& c : classes) {
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
      const std::string suffix = std::to_string(c.class_id) + "@" + threshold_label(thresholds[k]);
      os << "ap." << suffix << '=' << format_number(c.ap[k]) << '\n';
      os << "matched." << suffix << '=' << c.matched[k] << '\n';
      os << "missed." << suffix << '=' << c.missed[k] << '\n';
    }
  }
  return os.str();
}

EvalReport evaluate(std::span<const Trajectory> predictions,
                    std::span<const Trajectory> ground_truth, std::span<const double> thresholds) {
  const std::vector<Trajectory> preds = split_by_class(predictions);
  const std::vector<Trajectory> gts = split_by_class(ground_truth);
  if (gts.empty()) throw InputError("evaluate: ground truth is empty");
  if (thresholds.empty()) throw InputError("evaluate: no IoU thresholds");

  std::map<int, std::vector<const Trajectory*>> gt_by_class, pred_by_class;
  for (const auto& g : gts) gt_by_class[label_of(g)].push_back(&g);
  for (const auto& p : preds) pred_by_class[label_of(p)].push_back(&p);

  EvalReport report;
  report.thresholds.assign(thresholds.begin(), thresholds.end());
  double sum = 0.0;
  int cells = 0;
  for (const auto& [cls, gt_list] : gt_by_class) {
    std::vector<const Trajectory*> ranked = pred_by_class[cls];
    std::vector<double> key(ranked.size());
    for (std::size_t k = 0; k < ranked.size(); ++k) key[k] = mean_score(ranked[k]->entries);
    std::vector<std::size_t> order(ranked.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });

    // Overlap table once; reused across thresholds.
    std::vector<std::vector<double>> overlap(order.size(), std::vector<double>(gt_list.size()));
    for (std::size_t r = 0; r < order.size(); ++r) {
      for (std::size_t g = 0; g < gt_list.size(); ++g) {
        overlap[r][g] = tube_iou(*ranked[order[r]], *gt_list[g]);
      }
    }

    ClassEval ce;
    ce.class_id = cls;
    ce.num_ground_truth = static_cast<int>(gt_list.size());
    ce.num_predictions = static_cast<int>(ranked.size());
    for (double thr : thresholds) {
      std::vector<char> gt_taken(gt_list.size(), 0);
      std::vector<char> is_tp(order.size(), 0);
      int tp = 0;
      for (std::size_t r = 0; r < order.size(); ++r) {
        int best = -1;
        double best_iou = -1.0;
        for (std::size_t g = 0; g < gt_list.size(); ++g) {
          if (!gt_taken[g] && overlap[r][g] > best_iou) {
            best_iou = overlap[r][g];
            best = static_cast<int>(g);
          }
        }
        if (best >= 0 && best_iou >= thr) {
          gt_taken[best] = 1;
          is_tp[r] = 1;
          ++tp;
        }
      }
      const double ap = average_precision(is_tp, ce.num_ground_truth);
      ce.ap.push_back(ap);
      ce.matched.push_back(tp);
      ce.missed.push_back(ce.num_ground_truth - tp);
      sum += ap;
      ++cells;
    }
    report.classes.push_back(std::move(ce));
  }
  report.map = sum / static_cast<double>(cells);
  return report;
}

}  // namespace mot
