#include "glitchguard/scoring/regularity.hpp"

#include <cmath>

#include "glitchguard/data/clips.hpp"
#include "glitchguard/error.hpp"

namespace glitchguard {

std::vector<std::size_t> scoring_clip_starts(std::size_t frames, std::size_t window, std::size_t stride) {
  const std::size_t count = clip_count(frames, window, stride);
  std::vector<std::size_t> starts;
  starts.reserve(count + 1);
  for (std::size_t k = 0; k < count; ++k) starts.push_back(k * stride);
  if (starts.back() != frames - window) starts.push_back(frames - window);
  return starts;
}

std::vector<std::vector<double>> clip_frame_errors(const ClipReconstructor& model, const FrameSequence& sequence,
                                                   std::size_t window, std::span<const std::size_t> starts) {
  const std::size_t plane = sequence.height() * sequence.width();
  std::vector<std::vector<double>> out;
  out.reserve(starts.size());
  for (std::size_t start : starts) {
    const Tensor clip = make_clip_tensor(sequence, start, window);
    const Tensor recon = model(clip);
    require_same_shape(clip.shape(), recon.shape(), "reconstruction");
    std::vector<double> errors(window);
    for (std::size_t t = 0; t < window; ++t) {
      double sum = 0.0;
      for (std::size_t i = t * plane; i < (t + 1) * plane; ++i) {
        const double d = static_cast<double>(recon[i]) - static_cast<double>(clip[i]);
        sum += d * d;
      }
      errors[t] = sum / static_cast<double>(plane);
    }
    out.push_back(std::move(errors));
  }
  return out;
}

std::vector<double> aggregate_frame_errors(std::size_t frames, std::size_t window,
                                           std::span<const std::size_t> starts,
                                           const std::vector<std::vector<double>>& per_clip) {
  if (per_clip.size() != starts.size()) throw ShapeError("one error row per scored clip is required");
  std::vector<double> sums(frames, 0.0);
  std::vector<std::size_t> counts(frames, 0);
  for (std::size_t k = 0; k < starts.size(); ++k) {
    if (per_clip[k].size() != window || starts[k] + window > frames) {
      throw ShapeError("clip " + std::to_string(k) + " does not fit the sequence");
    }
    for (std::size_t t = 0; t < window; ++t) {
      sums[starts[k] + t] += per_clip[k][t];
      ++counts[starts[k] + t];
    }
  }
  for (std::size_t t = 0; t < frames; ++t) {
    if (counts[t] == 0) throw ShapeError("frame " + std::to_string(t) + " is not covered by any clip");
    sums[t] /= static_cast<double>(counts[t]);
    if (!std::isfinite(sums[t])) throw NumericError("non-finite reconstruction error at frame " + std::to_string(t));
  }
  return sums;
}

std::vector<double> frame_errors(const ClipReconstructor& model, const FrameSequence& sequence, std::size_t window,
                                 std::size_t stride) {
  const auto starts = scoring_clip_starts(sequence.size(), window, stride);
  return aggregate_frame_errors(sequence.size(), window, starts, clip_frame_errors(model, sequence, window, starts));
}

std::vector<double> frame_errors(const ModelCheckpoint& checkpoint, const FrameSequence& sequence, std::size_t window,
                                 std::size_t stride) {
  if (window != checkpoint.config.window) {
    throw ConfigError("scoring window " + std::to_string(window) + " differs from the model window " +
                      std::to_string(checkpoint.config.window));
  }
  const std::vector<Tensor> params = checkpoint.tensors();
  const ClipReconstructor model = [&](const Tensor& clip) {
    return reconstruct<float>(checkpoint.config, params, clip);
  };
  return frame_errors(model, sequence, window, stride);
}

RegularityCurve score_sequence(const ModelCheckpoint& checkpoint, const FrameSequence& sequence, std::size_t stride) {
  RegularityCurve curve;
  curve.video_id = sequence.video_id;
  curve.errors = frame_errors(checkpoint, sequence, checkpoint.config.window, stride);
  curve.scores = regularity_score(curve.errors);
  return curve;
}

}  // namespace glitchguard
