#pragma once

#include <cstddef>
#include <vector>

#include "glitchguard/data/frames.hpp"

namespace glitchguard {

// `window` consecutive frames starting at `start_frame`, as a [W, 1, H, Wd] tensor.
struct Clip {
  std::size_t start_frame = 0;
  Tensor tensor;
};

// floor((frames - window) / stride) + 1. Throws ConfigError if frames < window
// or window/stride is zero.
std::size_t clip_count(std::size_t frames, std::size_t window, std::size_t stride);

// Clip k starts at frame k * stride.
std::vector<Clip> to_clips(const FrameSequence& sequence, std::size_t window = 10, std::size_t stride = 1);

// Builds the clip tensor for frames [start, start + window).
Tensor make_clip_tensor(const FrameSequence& sequence, std::size_t start, std::size_t window);

}  // namespace glitchguard
