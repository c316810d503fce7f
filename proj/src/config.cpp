#include "mot/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "mot/errors.hpp"
#include "mot/io.hpp"

namespace mot {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf") return std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || std::isnan(value)) {
    throw InputError(key + ": expected a number, got '" + text + "'");
  }
  return value;
}

long long parse_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw InputError(key + ": expected an integer, got '" + text + "'");
  }
  return value;
}

int parse_int(const std::string& key, const std::string& text) {
  const long long v = parse_integer(key, text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw InputError(key + ": value out of range");
  }
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw InputError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> values;
  for (const auto& part : split(text, ',')) values.push_back(parse_double(key, part));
  return values;
}

FilterSetup parse_filter(const std::string& key, const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() < 2 || parts.size() > 4) {
    throw InputError(key + ": expected mode,kind[,model[,turn_rate]]");
  }
  FilterSetup setup;
  if (parts[0] == "nsa") {
    setup.noise_mode = NoiseMode::kNsa;
  } else if (parts[0] == "vanilla") {
    setup.noise_mode = NoiseMode::kVanilla;
  } else {
    throw InputError(key + ": unknown noise mode '" + parts[0] + "'");
  }
  if (parts[1] == "kf") {
    setup.kind = FilterKind::kKalman;
  } else if (parts[1] == "ukf") {
    setup.kind = FilterKind::kUnscented;
  } else {
    throw InputError(key + ": unknown filter kind '" + parts[1] + "'");
  }
  if (parts.size() >= 3) {
    if (parts[2] == "cv") {
      setup.model.kind = MotionModel::Kind::kConstantVelocity;
    } else if (parts[2] == "ctrv") {
      setup.model.kind = MotionModel::Kind::kConstantTurnRate;
    } else {
      throw InputError(key + ": unknown motion model '" + parts[2] + "'");
    }
  }
  if (parts.size() == 4) setup.model.turn_rate = parse_double(key, parts[3]);
  return setup;
}

PostStage parse_stage(const std::string& key, const std::string& text) {
  if (text == "denoise") return PostStage::kDenoise;
  if (text == "interpolate") return PostStage::kInterpolate;
  if (text == "rescore") return PostStage::kRescore;
  throw InputError(key + ": unknown stage '" + text + "'");
}

const char* stage_name(PostStage stage) {
  switch (stage) {
    case PostStage::kDenoise:
      return "denoise";
    case PostStage::kInterpolate:
      return "interpolate";
    case PostStage::kRescore:
      return "rescore";
  }
  return "";
}

const char* vote_name(VoteMode mode) {
  switch (mode) {
    case VoteMode::kNone:
      return "none";
    case VoteMode::kHard:
      return "hard";
    case VoteMode::kSoft:
      return "soft";
  }
  return "";
}

template <typename Vec>
std::string join(const Vec& v) {
  std::string out;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(v.size()); ++i) {
    if (i > 0) out += ',';
    out += format_number(v[i]);
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  online.validate();
  link.validate();
  post.validate();
  if (!(vote.floor >= 0.0 && vote.floor <= 1.0)) throw InputError("vote.floor must lie in [0, 1]");
  if (eval_thresholds.empty()) throw InputError("eval.thresholds must not be empty");
  for (double t : eval_thresholds) {
    if (!(t > 0.0 && t <= 1.0)) throw InputError("eval.thresholds must lie in (0, 1]");
  }
}

void apply_setting(RunConfig& c, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  auto dbl = [&] { return parse_double(key, value); };
  auto integer = [&] { return parse_int(key, value); };

  if (key == "seed") {
    const long long s = parse_integer(key, value);
    if (s < 0) throw InputError("seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "online.n_init") {
    c.online.n_init = integer();
  } else if (key == "online.max_age") {
    c.online.max_age = integer();
  } else if (key == "online.min_len") {
    c.online.min_len = integer();
  } else if (key == "online.gate_threshold") {
    c.online.gate_threshold = dbl();
  } else if (key == "online.appearance_threshold") {
    c.online.appearance_threshold = dbl();
  } else if (key == "online.iou_fallback_threshold") {
    c.online.iou_fallback_threshold = dbl();
  } else if (key == "online.bank_capacity") {
    const int cap = integer();
    if (cap < 1) throw InputError(key + " must be >= 1");
    c.online.bank_capacity = static_cast<std::size_t>(cap);
  } else if (key == "online.ema_momentum") {
    c.online.ema_momentum = dbl();
  } else if (key == "online.classes") {
    std::map<int, int> mapping;
    for (const auto& pair : split(value, ',')) {
      const auto fr = split(pair, ':');
      if (fr.size() != 2) throw InputError(key + ": expected fine:rough pairs");
      mapping[parse_int(key, fr[0])] = parse_int(key, fr[1]);
    }
    if (mapping.empty()) throw InputError(key + ": empty class map");
    c.online.classes = ClassMap(std::move(mapping));
  } else if (key.rfind("online.filter.", 0) == 0) {
    const int rough = parse_int(key, key.substr(std::string("online.filter.").size()));
    c.online.filters[rough] = parse_filter(key, value);
  } else if (key == "noise.position_std_factor") {
    c.online.noise.position_std_factor = dbl();
  } else if (key == "noise.velocity_std_factor") {
    c.online.noise.velocity_std_factor = dbl();
  } else if (key == "noise.measurement_base") {
    const auto v = parse_list(key, value);
    if (v.size() != 4) throw InputError(key + ": expected 4 values");
    for (int i = 0; i < 4; ++i) c.online.noise.measurement_base(i) = v[i];
  } else if (key == "noise.process_base") {
    const auto v = parse_list(key, value);
    if (v.size() != 8) throw InputError(key + ": expected 8 values");
    for (int i = 0; i < 8; ++i) c.online.noise.process_base(i) = v[i];
  } else if (key == "ukf.alpha") {
    c.online.ukf.alpha = dbl();
  } else if (key == "ukf.beta") {
    c.online.ukf.beta = dbl();
  } else if (key == "ukf.kappa") {
    c.online.ukf.kappa = dbl();
  } else if (key == "vote.mode") {
    if (value == "none") {
      c.vote.mode = VoteMode::kNone;
    } else if (value == "hard") {
      c.vote.mode = VoteMode::kHard;
    } else if (value == "soft") {
      c.vote.mode = VoteMode::kSoft;
    } else {
      throw InputError(key + ": expected none, hard or soft");
    }
  } else if (key == "vote.floor") {
    c.vote.floor = dbl();
  } else if (key == "link.th_appearance") {
    c.link.th_appearance = dbl();
  } else if (key == "link.th_time") {
    c.link.th_time = dbl();
  } else if (key == "link.th_space") {
    c.link.th_space = dbl();
  } else if (key == "link.lambda_appearance") {
    c.link.lambda_appearance = dbl();
  } else if (key == "link.lambda_time") {
    c.link.lambda_time = dbl();
  } else if (key == "link.lambda_space") {
    c.link.lambda_space = dbl();
  } else if (key == "link.clip_len") {
    c.link.clip_len = integer();
  } else if (key == "post.max_gap") {
    c.post.max_gap = integer();
  } else if (key == "post.tau") {
    c.post.tau = dbl();
  } else if (key == "post.nms_overlap_floor") {
    c.post.nms_overlap_floor = dbl();
  } else if (key == "post.score_drop_floor") {
    c.post.score_drop_floor = dbl();
  } else if (key == "post.denoise") {
    c.post.denoise = parse_bool(key, value);
  } else if (key == "post.interpolate") {
    c.post.interpolate = parse_bool(key, value);
  } else if (key == "post.rescore") {
    c.post.rescore = parse_bool(key, value);
  } else if (key == "post.order") {
    c.post.order.clear();
    for (const auto& s : split(value, ',')) c.post.order.push_back(parse_stage(key, s));
  } else if (key == "eval.thresholds") {
    c.eval_thresholds = parse_list(key, value);
  } else {
    throw InputError("unknown config key '" + key + "'");
  }
  c.link.vote = c.vote;
}

void apply_config_text(RunConfig& config, std::istream& in) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    try {
      if (eq == std::string::npos) throw InputError("expected key=value");
      apply_setting(config, t.substr(0, eq), t.substr(eq + 1));
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(number) + ": " + e.what());
    }
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open config file");
  try {
    apply_config_text(config, in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string to_config_text(const RunConfig& c) {
  std::ostringstream out;
  auto kv = [&](const std::string& key, const std::string& value) {
    out << key << '=' << value << '\n';
  };
  auto num = [](double v) { return format_number(v); };
  kv("seed", std::to_string(c.seed));
  kv("online.n_init", std::to_string(c.online.n_init));
  kv("online.max_age", std::to_string(c.online.max_age));
  kv("online.min_len", std::to_string(c.online.min_len));
  kv("online.gate_threshold", num(c.online.gate_threshold));
  kv("online.appearance_threshold", num(c.online.appearance_threshold));
  kv("online.iou_fallback_threshold", num(c.online.iou_fallback_threshold));
  kv("online.bank_capacity", std::to_string(c.online.bank_capacity));
  kv("online.ema_momentum", num(c.online.ema_momentum));
  std::string classes;
  for (const auto& [fine, rough] : c.online.classes.mapping()) {
    if (!classes.empty()) classes += ',';
    classes += std::to_string(fine) + ':' + std::to_string(rough);
  }
  kv("online.classes", classes);
  for (const auto& [rough, f] : c.online.filters) {
    std::string spec = f.noise_mode == NoiseMode::kNsa ? "nsa" : "vanilla";
    spec += f.kind == FilterKind::kKalman ? ",kf" : ",ukf";
    spec += f.model.kind == MotionModel::Kind::kConstantVelocity ? ",cv" : ",ctrv";
    spec += "," + num(f.model.turn_rate);
    kv("online.filter." + std::to_string(rough), spec);
  }
  kv("noise.position_std_factor", num(c.online.noise.position_std_factor));
  kv("noise.velocity_std_factor", num(c.online.noise.velocity_std_factor));
  kv("noise.measurement_base", join(c.online.noise.measurement_base));
  kv("noise.process_base", join(c.online.noise.process_base));
  kv("ukf.alpha", num(c.online.ukf.alpha));
  kv("ukf.beta", num(c.online.ukf.beta));
  kv("ukf.kappa", num(c.online.ukf.kappa));
  kv("vote.mode", vote_name(c.vote.mode));
  kv("vote.floor", num(c.vote.floor));
  kv("link.th_appearance", num(c.link.th_appearance));
  kv("link.th_time", num(c.link.th_time));
  kv("link.th_space", num(c.link.th_space));
  kv("link.lambda_appearance", num(c.link.lambda_appearance));
  kv("link.lambda_time", num(c.link.lambda_time));
  kv("link.lambda_space", num(c.link.lambda_space));
  kv("link.clip_len", std::to_string(c.link.clip_len));
  kv("post.max_gap", std::to_string(c.post.max_gap));
  kv("post.tau", num(c.post.tau));
  kv("post.nms_overlap_floor", num(c.post.nms_overlap_floor));
  kv("post.score_drop_floor", num(c.post.score_drop_floor));
  kv("post.denoise", c.post.denoise ? "true" : "false");
  kv("post.interpolate", c.post.interpolate ? "true" : "false");
  kv("post.rescore", c.post.rescore ? "true" : "false");
  std::string order;
  for (PostStage s : c.post.order) {
    if (!order.empty()) order += ',';
    order += stage_name(s);
  }
  kv("post.order", order);
  kv("eval.thresholds", join(c.eval_thresholds));
  return out.str();
}

}  // namespace mot
