#include "mot/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mot/config.hpp"
#include "mot/errors.hpp"
#include "mot/evaluation.hpp"
#include "mot/io.hpp"
#include "mot/log.hpp"
#include "mot/pipeline.hpp"
#include "mot/simulation.hpp"

namespace mot {

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> settings;
  long long seed = -1;
  std::string out;
  std::string log_level = "warn";
};

void add_common(CLI::App* cmd, CommonOptions& common, bool out_required) {
  cmd->add_option("--config", common.config_path, "key=value config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", common.settings, "override one config key (key=value)");
  cmd->add_option("--seed", common.seed, "random seed");
  auto* out = cmd->add_option("--out", common.out, "output path");
  if (out_required) out->required();
  cmd->add_option("--log-level", common.log_level, "debug, info, warn, error or off")
      ->check(CLI::IsMember({"debug", "info", "warn", "error", "off"}));
}

RunConfig resolve_config(const CommonOptions& common) {
  RunConfig config;
  if (!common.config_path.empty()) apply_config_file(config, common.config_path);
  for (const auto& s : common.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw InputError("--set expects key=value, got '" + s + "'");
    apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
  }
  if (common.seed >= 0) config.seed = static_cast<std::uint64_t>(common.seed);
  config.link.vote = config.vote;
  config.validate();
  return config;
}

void apply_log_level(const std::string& name) {
  if (name == "debug") log::set_level(log::Level::kDebug);
  if (name == "info") log::set_level(log::Level::kInfo);
  if (name == "warn") log::set_level(log::Level::kWarn);
  if (name == "error") log::set_level(log::Level::kError);
  if (name == "off") log::set_level(log::Level::kOff);
}

template <typename Entries>
void frame_span(const Entries& items, int& first, int& last) {
  first = std::numeric_limits<int>::max();
  last = std::numeric_limits<int>::min();
  for (const auto& t : items) {
    if (t.entries.empty()) continue;
    first = std::min(first, t.entries.front().frame);
    last = std::max(last, t.entries.back().frame);
  }
}

template <typename Entries>
std::string summary(const char* noun, const Entries& items) {
  std::string text = std::to_string(items.size()) + " " + noun;
  int first = 0;
  int last = 0;
  frame_span(items, first, last);
  if (first <= last) text += ", frames " + std::to_string(first) + ".." + std::to_string(last);
  return text;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-class multi-object tracking: online tracking, global link, post-processing"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "expand all help");

  CommonOptions common;

  auto* track = app.add_subcommand("track", "online tracking of a detection file");
  std::string det_path, emb_path, transform_path, emb_out;
  track->add_option("--detections", det_path, "VisDrone detection file")->required();
  track->add_option("--embeddings", emb_path, "detection embedding sidecar");
  track->add_option("--transforms", transform_path, "per-frame affine transform sidecar");
  track->add_option("--emb-out", emb_out, "tracklet embedding sidecar (default <out>.emb)");
  add_common(track, common, true);

  auto* link = app.add_subcommand("link", "global link of tracklets into trajectories");
  std::string tracklet_path, tracklet_emb;
  link->add_option("--tracklets", tracklet_path, "tracklet file")->required();
  link->add_option("--embeddings", tracklet_emb, "tracklet embedding sidecar");
  add_common(link, common, true);

  auto* post = app.add_subcommand("post", "denoise, interpolate and rescore trajectories");
  std::string post_input;
  post->add_option("--input", post_input, "tracklet or trajectory file")->required();
  add_common(post, common, true);

  auto* fuse = app.add_subcommand("fuse", "TrackNMS fusion of result files");
  std::vector<std::string> fuse_inputs;
  fuse->add_option("--inputs", fuse_inputs, "result files (at least two)")->required();
  add_common(fuse, common, true);

  auto* eval = app.add_subcommand("eval", "trajectory mAP against ground truth");
  std::string pred_path, gt_path;
  eval->add_option("--pred", pred_path, "result file")->required();
  eval->add_option("--gt", gt_path, "ground-truth file")->required();
  add_common(eval, common, false);

  auto* sim = app.add_subcommand("sim", "generate a synthetic scenario");
  std::string preset = "standard";
  sim->add_option("--preset", preset, "standard, occlusion or linear");
  add_common(sim, common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  try {
    apply_log_level(common.log_level);
    const RunConfig config = resolve_config(common);

    if (track->parsed()) {
      const auto detections = load_detections(det_path, config.online.classes);
      std::optional<EmbeddingStore> embeddings;
      if (!emb_path.empty()) {
        embeddings = load_embeddings(emb_path);
      } else {
        log::warn("track: no embedding sidecar, association uses motion only");
      }
      TransformTable transforms;
      if (!transform_path.empty()) transforms = load_transforms(transform_path);
      const auto result =
          run_track_stage(detections, embeddings ? &*embeddings : nullptr, transforms, config);
      save_tracklets(common.out, result.tracklets);
      if (embeddings) {
        save_embeddings(emb_out.empty() ? common.out + ".emb" : emb_out, result.embeddings);
      }
      out << "track: " << summary("tracklets", result.tracklets) << '\n';
    } else if (link->parsed()) {
      const auto tracklets = load_tracklets(tracklet_path, config.online.classes);
      std::optional<EmbeddingStore> embeddings;
      if (!tracklet_emb.empty()) {
        embeddings = load_embeddings(tracklet_emb);
      } else if (!config.link.appearance_disabled()) {
        log::warn("link: no embedding sidecar, tracklets stay unlinked");
      }
      const auto linked = run_link_stage(tracklets, embeddings ? &*embeddings : nullptr, config);
      save_tracklets(common.out, linked);
      out << "link: " << tracklets.size() << " tracklets -> " << summary("trajectories", linked)
          << '\n';
    } else if (post->parsed()) {
      const auto tracklets = load_tracklets(post_input, config.online.classes);
      std::vector<Trajectory> input;
      for (const auto& tl : tracklets) input.push_back(to_trajectory(tl));
      const auto result = run_post_stage(input, config);
      save_results(common.out, result);
      out << "post: " << summary("trajectories", result) << '\n';
    } else if (fuse->parsed()) {
      if (fuse_inputs.size() < 2) throw InputError("fuse needs at least two result files");
      std::vector<std::vector<Trajectory>> sets;
      for (const auto& path : fuse_inputs) sets.push_back(load_results(path));
      const auto fused = run_fuse_stage(sets, config);
      save_results(common.out, fused);
      out << "fuse: " << summary("trajectories", fused) << '\n';
    } else if (eval->parsed()) {
      const auto predictions = load_results(pred_path);
      const auto truth = load_results(gt_path, true);
      const auto report = evaluate(predictions, truth, config.eval_thresholds);
      out << report.to_table();
      if (!common.out.empty()) save_text(common.out, report.to_key_values());
    } else if (sim->parsed()) {
      const auto spec = make_scenario(parse_preset(preset), config.seed);
      const auto data = simulate(spec);
      const fs::path dir = common.out;
      fs::create_directories(dir);
      save_tracklets(dir / "gt.txt", data.ground_truth);
      save_detections(dir / "det.txt", data.detections);
      save_embeddings(dir / "emb.txt", data.embeddings);
      save_transforms(dir / "transforms.txt", data.transforms);
      out << "sim: " << data.ground_truth.size() << " objects, " << data.detections.size()
          << " detections, " << spec.num_frames << " frames -> " << dir.string() << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace mot
