#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mot/evaluation.hpp"
#include "mot/globallink.hpp"
#include "mot/online.hpp"
#include "mot/postprocess.hpp"

namespace mot {

// Every tunable of a run. Defaults are the published constants.
struct RunConfig {
  OnlineConfig online;
  LinkConfig link;
  PostConfig post;
  VoteConfig vote;  // shared by link and post
  std::vector<double> eval_thresholds = kDefaultEvalThresholds;
  std::uint64_t seed = 7;

  void validate() const;
};

// Applies one `key=value` setting. Throws InputError on unknown keys or
// malformed values. Recognized keys:
//   seed
//   online.{n_init,max_age,min_len,gate_threshold,appearance_threshold,
//           iou_fallback_threshold,bank_capacity,ema_momentum}
//   online.classes = fine:rough[,fine:rough...]
//   online.filter.<rough> = vanilla|nsa,kf|ukf[,cv|ctrv[,turn_rate]]
//   noise.{position_std_factor,velocity_std_factor}
//   noise.measurement_base = 4 values; noise.process_base = 8 values
//   ukf.{alpha,beta,kappa}
//   vote.mode = none|hard|soft; vote.floor
//   link.{th_appearance,th_time,th_space,lambda_appearance,lambda_time,
//         lambda_space,clip_len}   (th_appearance accepts "inf")
//   post.{max_gap,tau,nms_overlap_floor,score_drop_floor}
//   post.{denoise,interpolate,rescore} = true|false
//   post.order = stage[,stage...] with stages denoise, interpolate, rescore
//   eval.thresholds = comma-separated values in (0, 1]
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

// Parses `key=value` lines; blank lines and lines starting with '#' are
// skipped. Errors cite the line number.
void apply_config_text(RunConfig& config, std::istream& in);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

// Canonical text of every key, re-readable by apply_config_text.
std::string to_config_text(const RunConfig& config);

}  // namespace mot
