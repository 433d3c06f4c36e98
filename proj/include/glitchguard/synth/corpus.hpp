#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "glitchguard/data/manifest.hpp"
#include "glitchguard/synth/bugs.hpp"
#include "glitchguard/synth/scene.hpp"

namespace glitchguard {

struct CorpusVideo {
  std::string video_id;
  SceneSpec scene;
  std::size_t frames = 0;
  std::string split;
  std::optional<BugInjection> bug;
};

// Shape of a synthetic corpus: bug-free training videos, a few bug-free test
// videos, and per bug category a set of test videos plus pre-labeled
// exemplar videos (split "train", never used for model training).
struct CorpusPlan {
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t levels = 3;
  std::size_t train_normal_videos = 10;
  std::size_t train_frames = 200;
  std::size_t test_normal_videos = 2;
  std::size_t bug_frames = 64;
  std::size_t videos_per_category = 10;
  std::size_t exemplars_per_category = 2;
  std::vector<BugCategory> categories = {BugCategory::kBlackScreen, BugCategory::kTextureCorruption,
                                         BugCategory::kBoundaryHole};
  std::uint64_t seed = 1;
};

std::vector<CorpusVideo> plan_corpus(const CorpusPlan& plan);

// Renders every video, writes out_dir/videos/<id>/frame_NNNNNN.pgm and
// out_dir/manifest.csv, and returns the manifest (base_dir = out_dir).
CorpusManifest make_labeled_corpus(const std::vector<CorpusVideo>& videos, const std::filesystem::path& out_dir);

// Clean render, with the bug applied when the video has one.
InjectedSequence render_video(const CorpusVideo& video);

}  // namespace glitchguard
