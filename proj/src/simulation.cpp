#include "mot/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mot/errors.hpp"
#include "mot/rng.hpp"

namespace mot {

void ScenarioSpec::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError(std::string(name) + " must lie in [0, 1]");
  };
  if (num_frames < 1) throw InputError("scenario: num_frames must be >= 1");
  prob(detector.miss_prob, "miss_prob");
  prob(detector.duplicate_prob, "duplicate_prob");
  prob(detector.class_flip_prob, "class_flip_prob");
  if (!(detector.localization_sigma >= 0.0) || !(detector.confidence_noise >= 0.0)) {
    throw InputError("scenario: detector noise terms must be non-negative");
  }
  if (embedding.dim < 1 || !(embedding.sigma >= 0.0)) {
    throw InputError("scenario: embedding dim >= 1 and sigma >= 0 are required");
  }
  if (!embedding.identity_means.empty() && embedding.identity_means.size() != objects.size()) {
    throw InputError("scenario: identity_means must have one vector per object");
  }
  for (const auto& m : embedding.identity_means) {
    if (m.size() != embedding.dim) throw InputError("scenario: identity mean has wrong dimension");
  }
  if (!(camera.scale > 0.0) || !(camera.jitter_sigma >= 0.0)) {
    throw InputError("scenario: camera scale must be positive and jitter non-negative");
  }
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    const std::string tag = "scenario object " + std::to_string(i) + ": ";
    if (!(1 <= o.spawn && o.spawn < o.despawn && o.despawn <= num_frames)) {
      throw InputError(tag + "requires 1 <= spawn < despawn <= num_frames");
    }
    if (!o.initial.valid()) throw InputError(tag + "invalid initial box");
    if (!(o.process_sigma >= 0.0)) throw InputError(tag + "process_sigma must be non-negative");
    for (auto [a, b] : o.occlusions) {
      if (a > b) throw InputError(tag + "occlusion range is reversed");
    }
  }
}

namespace {

struct ObjectState {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  double vx = 0.0;
  double vy = 0.0;
};

bool occluded(const ObjectSpec& o, int frame) {
  for (auto [a, b] : o.occlusions) {
    if (frame >= a && frame <= b) return true;
  }
  return false;
}

Eigen::VectorXd random_unit(Rng& rng, int dim) {
  Eigen::VectorXd v(dim);
  for (int k = 0; k < dim; ++k) v(k) = rng.normal();
  return v / v.norm();
}

struct Candidate {
  Box box;
  double score;
  int class_id;
  int identity;
};

Candidate noisy_detection(Rng& rng, const DetectorModel& det, const Box& truth, int class_id,
                          int identity, double sigma_scale) {
  const double sigma = det.localization_sigma * sigma_scale * truth.height;
  Candidate c{truth, 1.0, class_id, identity};
  if (sigma > 0.0) {
    const double dcx = rng.normal(0.0, sigma);
    const double dcy = rng.normal(0.0, sigma);
    const double dw = rng.normal(0.0, sigma);
    const double dh = rng.normal(0.0, sigma);
    const double w = std::max(1.0, truth.width + dw);
    const double h = std::max(1.0, truth.height + dh);
    c.box = box_from_center(truth.center_x() + dcx, truth.center_y() + dcy, w, h);
    const double error = std::sqrt(dcx * dcx + dcy * dcy + dw * dw + dh * dh) / truth.height;
    c.score = det.confidence_base - det.confidence_kappa * error;
  } else {
    c.score = det.confidence_base;
  }
  if (det.confidence_noise > 0.0) c.score += rng.normal(0.0, det.confidence_noise);
  c.score = std::clamp(c.score, 0.0, 1.0);
  if (det.class_flip_prob > 0.0 && rng.bernoulli(det.class_flip_prob)) {
    auto it = det.class_flips.find(class_id);
    if (it != det.class_flips.end()) c.class_id = it->second;
  }
  return c;
}

}  // namespace

SimulationOutput simulate(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const int n_obj = static_cast<int>(spec.objects.size());

  std::vector<Eigen::VectorXd> means = spec.embedding.identity_means;
  if (means.empty()) {
    for (int i = 0; i < n_obj; ++i) means.push_back(random_unit(rng, spec.embedding.dim));
  }

  SimulationOutput out;
  out.embeddings = EmbeddingStore(spec.embedding.dim);
  for (int i = 0; i < n_obj; ++i) {
    out.ground_truth.push_back(Trajectory{i + 1, {}, {{spec.objects[i].class_id, 1.0}}, 0});
  }

  std::vector<ObjectState> world(n_obj);
  AffineTransform camera = AffineTransform::identity();  // world -> image of the current frame
  const double cos_r = std::cos(spec.camera.rotation) * spec.camera.scale;
  const double sin_r = std::sin(spec.camera.rotation) * spec.camera.scale;

  for (int frame = 1; frame <= spec.num_frames; ++frame) {
    if (frame > 1) {
      AffineTransform step{cos_r, -sin_r, sin_r, cos_r, spec.camera.drift_x, spec.camera.drift_y};
      if (spec.camera.jitter_sigma > 0.0) {
        step.tx += rng.normal(0.0, spec.camera.jitter_sigma);
        step.ty += rng.normal(0.0, spec.camera.jitter_sigma);
      }
      camera = step.compose(camera);
      out.transforms.set(frame, step);
    }

    std::vector<Candidate> candidates;
    for (int i = 0; i < n_obj; ++i) {
      const ObjectSpec& o = spec.objects[i];
      if (frame < o.spawn || frame > o.despawn) continue;
      ObjectState& s = world[i];
      if (frame == o.spawn) {
        s = {o.initial.center_x(), o.initial.center_y(), o.initial.width, o.initial.height, o.vx,
             o.vy};
      } else {
        if (o.process_sigma > 0.0) {
          s.vx += rng.normal(0.0, o.process_sigma);
          s.vy += rng.normal(0.0, o.process_sigma);
        }
        s.cx += s.vx;
        s.cy += s.vy;
      }
      const Box truth = warp_box(camera, box_from_center(s.cx, s.cy, s.w, s.h));
      out.ground_truth[i].entries.push_back({frame, truth, 1.0, o.class_id, -1, false});

      if (occluded(o, frame)) continue;
      const DetectorModel& det = spec.detector;
      if (det.miss_prob > 0.0 && rng.bernoulli(det.miss_prob)) continue;
      candidates.push_back(noisy_detection(rng, det, truth, o.class_id, i + 1, 1.0));
      if (det.duplicate_prob > 0.0 && rng.bernoulli(det.duplicate_prob)) {
        candidates.push_back(noisy_detection(rng, det, truth, o.class_id, i + 1, 2.0));
      }
    }

    // Detector output order carries no identity information.
    for (int k = static_cast<int>(candidates.size()) - 1; k > 0; --k) {
      std::swap(candidates[k], candidates[rng.uniform_int(0, k)]);
    }
    for (int k = 0; k < static_cast<int>(candidates.size()); ++k) {
      const Candidate& c = candidates[k];
      out.detections.push_back({frame, k, c.box, c.score, c.class_id});
      out.detection_identity.push_back(c.identity);
      Eigen::VectorXd v = means[c.identity - 1];
      if (spec.embedding.sigma > 0.0) {
        for (Eigen::Index d = 0; d < v.size(); ++d) v(d) += rng.normal(0.0, spec.embedding.sigma);
      }
      out.embeddings.insert(frame, k, Embedding::normalized(std::move(v)));
    }
  }
  return out;
}

ScenarioPreset parse_preset(const std::string& name) {
  if (name == "standard") return ScenarioPreset::kStandard;
  if (name == "occlusion") return ScenarioPreset::kOcclusion;
  if (name == "linear") return ScenarioPreset::kLinear;
  throw InputError("unknown scenario preset '" + name + "' (standard, occlusion, linear)");
}

namespace {

constexpr double kImageWidth = 1920.0;
constexpr double kImageHeight = 1080.0;

ObjectSpec random_object(Rng& rng, int index, const CameraModel& camera) {
  ObjectSpec o;
  const bool pedestrian = index % 2 == 0;
  o.class_id = pedestrian ? 1 : 4;
  o.spawn = rng.uniform_int(1, 30);
  o.despawn = rng.uniform_int(270, 300);
  const double w = pedestrian ? rng.uniform(16.0, 24.0) : rng.uniform(50.0, 70.0);
  const double h = pedestrian ? rng.uniform(36.0, 50.0) : rng.uniform(28.0, 40.0);
  // Image-plane speed stays below 0.8 px/frame; world velocity cancels the
  // camera drift so that targets move slowly across the image.
  const double speed = rng.uniform(0.1, 0.8);
  const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
  o.vx = speed * std::cos(heading) - camera.drift_x;
  o.vy = speed * std::sin(heading) - camera.drift_y;
  const double cx = rng.uniform(150.0, kImageWidth - 150.0);
  const double cy = rng.uniform(150.0, kImageHeight - 150.0);
  // Image position at spawn, expressed in world coordinates.
  const double lag = static_cast<double>(o.spawn - 1);
  o.initial = box_from_center(cx - lag * camera.drift_x, cy - lag * camera.drift_y, w, h);
  o.process_sigma = 0.01;
  return o;
}

}  // namespace

ScenarioSpec make_scenario(ScenarioPreset preset, std::uint64_t seed) {
  ScenarioSpec spec;
  spec.seed = seed;
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);

  if (preset == ScenarioPreset::kLinear) {
    spec.num_frames = 300;
    spec.camera.drift_x = 1.0;
    spec.embedding.sigma = 0.0;
    const std::pair<int, int> gaps[4] = {{50, 54}, {100, 119}, {60, 118}, {150, 209}};
    for (int i = 0; i < 4; ++i) {
      ObjectSpec o;
      o.class_id = i % 2 == 0 ? 1 : 4;
      o.spawn = 1;
      o.despawn = 300;
      o.initial = i % 2 == 0 ? Box{300.0 + 400.0 * i, 200.0, 20.0, 44.0}
                             : Box{300.0 + 400.0 * i, 700.0, 60.0, 34.0};
      o.vx = 0.25 * (i + 1) - spec.camera.drift_x;
      o.vy = i % 2 == 0 ? 0.5 : -0.5;
      o.occlusions = {gaps[i]};
      spec.objects.push_back(o);
    }
    return spec;
  }

  spec.num_frames = 300;
  spec.camera.drift_x = 1.0;
  spec.detector.miss_prob = 0.1;
  spec.detector.duplicate_prob = 0.05;
  spec.detector.localization_sigma = 0.05;
  spec.detector.confidence_base = 1.0;
  spec.detector.confidence_kappa = 2.0;
  spec.detector.confidence_noise = 0.02;
  spec.embedding.dim = 32;
  spec.embedding.sigma = 0.05;
  for (int i = 0; i < 10; ++i) spec.objects.push_back(random_object(rng, i, spec.camera));

  if (preset == ScenarioPreset::kOcclusion) {
    for (auto& o : spec.objects) {
      int length = rng.uniform_int(40, 150);
      const int room = (o.despawn - 30) - (o.spawn + 30);
      length = std::min(length, room - 1);
      const int start = rng.uniform_int(o.spawn + 30, o.despawn - 30 - length);
      o.occlusions = {{start, start + length - 1}};
    }
  }
  return spec;
}

}  // namespace mot
