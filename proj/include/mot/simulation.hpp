#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mot/appearance.hpp"
#include "mot/camera.hpp"
#include "mot/model.hpp"

namespace mot {

struct ObjectSpec {
  int class_id = 1;
  int spawn = 1;    // first visible frame
  int despawn = 2;  // last visible frame
  Box initial;      // world box at the spawn frame
  double vx = 0.0;  // world velocity, px/frame
  double vy = 0.0;
  double process_sigma = 0.0;  // per-frame velocity random walk, px/frame
  // Inclusive frame ranges without detections; the object stays in the
  // ground truth.
  std::vector<std::pair<int, int>> occlusions;
};

struct DetectorModel {
  double miss_prob = 0.0;
  double duplicate_prob = 0.0;
  double localization_sigma = 0.0;  // per-coordinate std as a fraction of box height
  // confidence = clamp(base - kappa * |error| / h + N(0, noise), 0, 1), where
  // error stacks the (cx, cy, w, h) perturbation.
  double confidence_base = 1.0;
  double confidence_kappa = 2.0;
  double confidence_noise = 0.0;
  double class_flip_prob = 0.0;
  std::map<int, int> class_flips;  // fine class -> class reported on a flip
};

struct EmbeddingModel {
  int dim = 32;
  double sigma = 0.05;  // per-component noise around the identity mean
  // Optional per-object means; drawn from the seed when empty.
  std::vector<Eigen::VectorXd> identity_means;
};

// Per-frame camera motion applied to every rendered box: the frame t-1 image
// maps to frame t by a rotation and scale about the origin followed by a
// shift of (drift_x, drift_y) plus N(0, jitter_sigma) per axis.
struct CameraModel {
  double drift_x = 0.0;
  double drift_y = 0.0;
  double rotation = 0.0;  // radians per frame
  double scale = 1.0;     // factor per frame
  double jitter_sigma = 0.0;
};

struct ScenarioSpec {
  int num_frames = 100;
  std::vector<ObjectSpec> objects;
  DetectorModel detector;
  EmbeddingModel embedding;
  CameraModel camera;
  std::uint64_t seed = 0;

  // Throws InputError on invalid probabilities, lifetimes or boxes.
  void validate() const;
};

struct SimulationOutput {
  std::vector<Trajectory> ground_truth;  // id = object index + 1, score 1
  std::vector<Detection> detections;     // sorted by (frame, det_idx)
  EmbeddingStore embeddings;             // keyed by (frame, det_idx)
  TransformTable transforms;             // frames 2..num_frames
  std::vector<int> detection_identity;   // ground-truth id per detection
};

// Deterministic under spec.seed.
SimulationOutput simulate(const ScenarioSpec& spec);

enum class ScenarioPreset {
  // 10 objects (5 pedestrians, 5 cars), 300 frames, miss 0.1, duplicates
  // 0.05, localization 0.05 h, camera drift 1 px/frame.
  kStandard,
  // kStandard plus one forced 40..150-frame occlusion per object.
  kOcclusion,
  // Noise-free straight-line motion with misses only.
  kLinear,
};

ScenarioPreset parse_preset(const std::string& name);
ScenarioSpec make_scenario(ScenarioPreset preset, std::uint64_t seed);

}  // namespace mot
