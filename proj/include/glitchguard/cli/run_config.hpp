#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "glitchguard/model/config.hpp"
#include "glitchguard/synth/bugs.hpp"
#include "glitchguard/synth/corpus.hpp"

namespace glitchguard {

// Flat key=value settings for every stage of the pipeline. Every known key
// has a default; files and flags may only set known keys (plus
// threshold.<category> for the bug categories).
class RunConfig {
 public:
  RunConfig();

  // Parses "key = value" lines; '#' starts a comment. Later lines win.
  static RunConfig from_file(const std::filesystem::path& path);
  void apply_text(const std::string& text, const std::string& source = "<text>");

  // Throws ConfigError naming the key when it is unknown or the value does
  // not parse as the key's type.
  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;

  std::string get_string(const std::string& key) const { return get(key); }
  std::size_t get_size(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::vector<std::string> get_list(const std::string& key) const;

  // Sorted key=value lines, one per key.
  std::string resolved_text() const;
  // FNV-1a 64 of resolved_text(), as 16 hex digits.
  std::string digest() const;

  AutoencoderConfig autoencoder_config() const;
  TrainingHyper training_hyper() const;
  CorpusPlan corpus_plan() const;
  double threshold_for(const std::string& category) const;
  std::vector<std::string> excluded_categories() const;

  // Cross-key checks (model shape arithmetic, hyperparameter ranges, ...).
  void validate() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace glitchguard
