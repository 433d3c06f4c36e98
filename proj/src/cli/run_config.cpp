#include "glitchguard/cli/run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "glitchguard/error.hpp"

namespace glitchguard {
namespace {

enum class Kind { kSize, kU64, kDouble, kString, kList };

struct KeySpec {
  const char* key;
  Kind kind;
  const char* fallback;
};

// Desk-scale defaults: 32x32 frames and a small network, matching the
// synthetic corpus. configs/ holds the shipped variants.
constexpr KeySpec kKeys[] = {
    {"seed", Kind::kU64, "1"},
    {"threads", Kind::kSize, "1"},
    {"frame.height", Kind::kSize, "32"},
    {"frame.width", Kind::kSize, "32"},
    {"window", Kind::kSize, "10"},
    {"train.stride", Kind::kSize, "1"},
    {"score.stride", Kind::kSize, "1"},
    {"model.encoder", Kind::kString, "8:4:2:1,16:4:2:1"},
    {"model.lstm_hidden", Kind::kString, "16,8,16"},
    {"model.lstm_kernel", Kind::kSize, "3"},
    {"train.learning_rate", Kind::kDouble, "0.002"},
    {"train.batch_size", Kind::kSize, "4"},
    {"train.max_steps", Kind::kSize, "1200"},
    {"train.beta1", Kind::kDouble, "0.9"},
    {"train.beta2", Kind::kDouble, "0.999"},
    {"train.epsilon", Kind::kDouble, "1e-8"},
    {"train.weight_decay", Kind::kDouble, "0"},
    {"corpus.levels", Kind::kSize, "3"},
    {"corpus.train_normal_videos", Kind::kSize, "10"},
    {"corpus.train_frames", Kind::kSize, "200"},
    {"corpus.test_normal_videos", Kind::kSize, "2"},
    {"corpus.bug_frames", Kind::kSize, "64"},
    {"corpus.videos_per_category", Kind::kSize, "10"},
    {"corpus.exemplars_per_category", Kind::kSize, "2"},
    {"corpus.categories", Kind::kList, "black_screen,texture_corruption,boundary_hole"},
    {"threshold.default", Kind::kDouble, "0.5"},
    {"threshold.black_screen", Kind::kDouble, "0.5"},
    {"threshold.texture_corruption", Kind::kDouble, "0.5"},
    {"threshold.boundary_hole", Kind::kDouble, "0.5"},
    {"threshold.screen_tear", Kind::kDouble, "0.5"},
    {"cluster.eps", Kind::kDouble, "0"},
    {"cluster.min_pts", Kind::kSize, "3"},
    {"cluster.knn", Kind::kSize, "4"},
    {"cluster.resample_length", Kind::kSize, "128"},
    {"cluster.exclude", Kind::kList, ""},
    {"demo.compare_exclude", Kind::kList, ""},
};

const KeySpec* find_key(const std::string& key) {
  for (const auto& spec : kKeys)
    if (key == spec.key) return &spec;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

void check_value(const std::string& key, Kind kind, const std::string& value) {
  bool ok = true;
  if (kind == Kind::kSize || kind == Kind::kU64) {
    std::uint64_t v = 0;
    ok = parse_number(value, v);
  } else if (kind == Kind::kDouble) {
    double v = 0;
    ok = parse_number(value, v) && std::isfinite(v);
  }
  if (!ok) throw ConfigError("config key '" + key + "': cannot parse '" + value + "'");
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& spec : kKeys) values_[spec.key] = spec.fallback;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  RunConfig config;
  config.apply_text(buffer.str(), path.string());
  return config;
}

void RunConfig::apply_text(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key = value, got '" + line + "'");
    }
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const KeySpec* spec = find_key(key);
  if (!spec) throw ConfigError("unknown config key '" + key + "'");
  check_value(key, spec->kind, value);
  values_[key] = value;
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

std::size_t RunConfig::get_size(const std::string& key) const {
  std::size_t v = 0;
  parse_number(get(key), v);
  return v;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  std::uint64_t v = 0;
  parse_number(get(key), v);
  return v;
}

double RunConfig::get_double(const std::string& key) const {
  double v = 0;
  parse_number(get(key), v);
  return v;
}

std::vector<std::string> RunConfig::get_list(const std::string& key) const {
  std::vector<std::string> out;
  std::stringstream in(get(key));
  for (std::string item; std::getline(in, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string RunConfig::resolved_text() const {
  std::string out;
  for (const auto& [key, value] : values_) out += key + "=" + value + "\n";
  return out;
}

std::string RunConfig::digest() const {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : resolved_text()) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

AutoencoderConfig RunConfig::autoencoder_config() const {
  AutoencoderConfig c;
  c.frame_height = get_size("frame.height");
  c.frame_width = get_size("frame.width");
  c.window = get_size("window");
  c.encoder = encoder_from_string(get("model.encoder"));
  c.lstm_hidden = sizes_from_string(get("model.lstm_hidden"));
  c.lstm_kernel = get_size("model.lstm_kernel");
  c.seed = get_u64("seed");
  return c;
}

TrainingHyper RunConfig::training_hyper() const {
  TrainingHyper h;
  h.learning_rate = get_double("train.learning_rate");
  h.batch_size = get_size("train.batch_size");
  h.max_steps = get_size("train.max_steps");
  h.beta1 = get_double("train.beta1");
  h.beta2 = get_double("train.beta2");
  h.epsilon = get_double("train.epsilon");
  h.weight_decay = get_double("train.weight_decay");
  h.threads = get_size("threads");
  return h;
}

CorpusPlan RunConfig::corpus_plan() const {
  CorpusPlan plan;
  plan.height = get_size("frame.height");
  plan.width = get_size("frame.width");
  plan.levels = get_size("corpus.levels");
  plan.train_normal_videos = get_size("corpus.train_normal_videos");
  plan.train_frames = get_size("corpus.train_frames");
  plan.test_normal_videos = get_size("corpus.test_normal_videos");
  plan.bug_frames = get_size("corpus.bug_frames");
  plan.videos_per_category = get_size("corpus.videos_per_category");
  plan.exemplars_per_category = get_size("corpus.exemplars_per_category");
  plan.categories.clear();
  for (const auto& name : get_list("corpus.categories")) {
    const auto category = parse_bug_category(name);
    if (!category) throw ConfigError("config key 'corpus.categories': unknown bug category '" + name + "'");
    plan.categories.push_back(*category);
  }
  plan.seed = get_u64("seed");
  return plan;
}

double RunConfig::threshold_for(const std::string& category) const {
  const std::string key = "threshold." + category;
  return values_.count(key) ? get_double(key) : get_double("threshold.default");
}

std::vector<std::string> RunConfig::excluded_categories() const { return get_list("cluster.exclude"); }

void RunConfig::validate() const {
  autoencoder_config().validate();
  training_hyper().validate();
  const CorpusPlan plan = corpus_plan();
  if (plan.categories.empty()) throw ConfigError("config key 'corpus.categories' is empty");
  if (plan.levels == 0) throw ConfigError("config key 'corpus.levels' must be >= 1");
  if (plan.train_frames < get_size("window") || plan.bug_frames < get_size("window")) {
    throw ConfigError("corpus videos must have at least 'window' frames");
  }
  if (get_size("train.stride") == 0 || get_size("score.stride") == 0) {
    throw ConfigError("config keys 'train.stride' and 'score.stride' must be >= 1");
  }
  for (const auto& [key, value] : values_) {
    if (key.rfind("threshold.", 0) != 0) continue;
    const double t = get_double(key);
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("config key '" + key + "' must lie in (0, 1)");
  }
  if (get_double("cluster.eps") < 0.0) throw ConfigError("config key 'cluster.eps' must be >= 0 (0 = automatic)");
  if (get_size("cluster.min_pts") == 0) throw ConfigError("config key 'cluster.min_pts' must be >= 1");
  if (get_size("cluster.knn") == 0) throw ConfigError("config key 'cluster.knn' must be >= 1");
  if (get_size("cluster.resample_length") < 2) throw ConfigError("config key 'cluster.resample_length' must be >= 2");
  for (const char* key : {"cluster.exclude", "demo.compare_exclude"})
    for (const auto& name : get_list(key))
      if (!parse_bug_category(name)) throw ConfigError("config key '" + std::string(key) + "': unknown bug category '" + name + "'");
}

}  // namespace glitchguard
