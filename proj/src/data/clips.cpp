#include "glitchguard/data/clips.hpp"

#include <algorithm>

#include "glitchguard/error.hpp"

namespace glitchguard {

std::size_t clip_count(std::size_t frames, std::size_t window, std::size_t stride) {
  if (window == 0 || stride == 0) throw ConfigError("window and stride must be >= 1");
  if (frames < window) {
    throw ConfigError("sequence has " + std::to_string(frames) + " frames; at least " +
                      std::to_string(window) + " are required for window " + std::to_string(window));
  }
  return (frames - window) / stride + 1;
}

Tensor make_clip_tensor(const FrameSequence& sequence, std::size_t start, std::size_t window) {
  if (start + window > sequence.size()) {
    throw ShapeError("clip [" + std::to_string(start) + ", " + std::to_string(start + window) +
                     ") runs past the sequence end " + std::to_string(sequence.size()));
  }
  const std::size_t h = sequence.height();
  const std::size_t w = sequence.width();
  Tensor clip(Shape{window, 1, h, w});
  for (std::size_t t = 0; t < window; ++t) {
    const Tensor& frame = sequence.frames[start + t];
    std::copy(frame.data(), frame.data() + frame.size(), clip.data() + t * h * w);
  }
  return clip;
}

std::vector<Clip> to_clips(const FrameSequence& sequence, std::size_t window, std::size_t stride) {
  const std::size_t count = clip_count(sequence.size(), window, stride);
  std::vector<Clip> clips;
  clips.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    clips.push_back(Clip{k * stride, make_clip_tensor(sequence, k * stride, window)});
  }
  return clips;
}

}  // namespace glitchguard
