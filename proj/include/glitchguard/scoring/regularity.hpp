#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "glitchguard/data/frames.hpp"
#include "glitchguard/model/autoencoder.hpp"

namespace glitchguard {

struct RegularityCurve {
  std::string video_id;
  std::vector<double> errors;  // e(t) >= 0
  std::vector<double> scores;  // s(t) in [0, 1]

  std::size_t size() const { return scores.size(); }
};

struct AnomalySegment {
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive
  double min_score = 0.0;
  double threshold = 0.0;

  std::size_t length() const { return end - start + 1; }
  bool operator==(const AnomalySegment&) const = default;
};

inline constexpr double kDefaultThreshold = 0.5;
inline constexpr std::size_t kDefaultMergeGap = 2;

// Anything that maps a [W, 1, H, Wd] clip to its reconstruction.
using ClipReconstructor = std::function<Tensor(const Tensor& clip)>;

// Start frames scored for a sequence: k * stride, plus a final clip at N - W
// when the stride would otherwise leave trailing frames uncovered.
std::vector<std::size_t> scoring_clip_starts(std::size_t frames, std::size_t window, std::size_t stride);

// Per-frame mean squared error of each scored clip, [clip][frame-in-window].
std::vector<std::vector<double>> clip_frame_errors(const ClipReconstructor& model, const FrameSequence& sequence,
                                                   std::size_t window, std::span<const std::size_t> starts);

// e(t) = mean over the scored clips containing t of that frame's error.
std::vector<double> aggregate_frame_errors(std::size_t frames, std::size_t window,
                                           std::span<const std::size_t> starts,
                                           const std::vector<std::vector<double>>& per_clip);

std::vector<double> frame_errors(const ClipReconstructor& model, const FrameSequence& sequence, std::size_t window = 10,
                                 std::size_t stride = 1);

// Uses checkpoint.config.window, which must equal `window`.
std::vector<double> frame_errors(const ModelCheckpoint& checkpoint, const FrameSequence& sequence,
                                 std::size_t window = 10, std::size_t stride = 1);

// s(t) = 1 - (e(t) - min e) / (max e - min e); s = 1 everywhere when e is constant.
std::vector<double> regularity_score(std::span<const double> errors);

RegularityCurve score_sequence(const ModelCheckpoint& checkpoint, const FrameSequence& sequence,
                               std::size_t stride = 1);

// Maximal runs with s < threshold; runs separated by at most merge_gap
// frames are merged.
std::vector<AnomalySegment> detect_anomalies(std::span<const double> scores, double threshold = kDefaultThreshold,
                                             std::size_t merge_gap = kDefaultMergeGap);

}  // namespace glitchguard
