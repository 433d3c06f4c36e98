#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace glitchguard {

inline constexpr const char* kNormalLabel = "normal";

// Inclusive, 0-based frame range.
struct FrameRange {
  std::size_t start = 0;
  std::size_t end = 0;

  bool contains(std::size_t frame) const { return frame >= start && frame <= end; }
  bool operator==(const FrameRange&) const = default;
};

struct ManifestRow {
  std::string video_id;
  std::string path;   // relative paths resolve against the manifest's directory
  std::string split;  // "train" or "test"
  std::string label;  // bug category, or "normal"
  std::vector<FrameRange> bug_ranges;

  bool is_normal() const { return label == kNormalLabel; }
  bool operator==(const ManifestRow&) const = default;
};

struct CorpusManifest {
  std::vector<ManifestRow> rows;
  std::filesystem::path base_dir;  // directory the manifest was read from

  std::filesystem::path resolve(const ManifestRow& row) const;
  const ManifestRow* find(const std::string& video_id) const;
  // Rows whose split equals `split`.
  CorpusManifest with_split(const std::string& split) const;
};

std::string format_ranges(const std::vector<FrameRange>& ranges);
std::vector<FrameRange> parse_ranges(const std::string& text);

// CSV with header video_id,path,split,label,bug_ranges. Rejects duplicate
// video ids; with check_paths, also rejects rows whose directory is missing.
CorpusManifest read_manifest(const std::filesystem::path& path, bool check_paths = true);
void write_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);

// Seeded shuffle of whole videos; the first ceil(n * train_fraction) go to
// train. Split tags of the returned rows are rewritten to "train"/"test".
std::pair<CorpusManifest, CorpusManifest> split_corpus(const CorpusManifest& manifest,
                                                       double train_fraction, std::uint64_t seed);

}  // namespace glitchguard
