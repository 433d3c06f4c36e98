#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "glitchguard/data/pgm.hpp"
#include "glitchguard/numerics/tensor.hpp"

namespace glitchguard {

// Ordered grayscale frames of one recording. Each frame is an [H, W] tensor
// with values in [0, 1]; all frames share dimensions.
struct FrameSequence {
  std::string video_id;
  std::vector<Tensor> frames;
  std::vector<std::filesystem::path> sources;  // empty for in-memory sequences

  std::size_t size() const { return frames.size(); }
  std::size_t height() const { return frames.empty() ? 0 : frames.front().dim(0); }
  std::size_t width() const { return frames.empty() ? 0 : frames.front().dim(1); }
};

// "frame_NNNNNN.pgm" for a 1-based index.
std::string frame_file_name(std::size_t index);

// Pixel / 255.
Tensor frame_from_image(const GrayImage& image);
// round(value * 255), clamped to [0, 255].
GrayImage image_from_frame(const Tensor& frame);

// Loads every frame_NNNNNN.pgm in `directory`, ordered by numeric index. The
// video id is the directory's name.
FrameSequence load_frames(const std::filesystem::path& directory);

// Writes frames as frame_000001.pgm, frame_000002.pgm, ... (creates the directory).
void write_frames(const FrameSequence& sequence, const std::filesystem::path& directory);

}  // namespace glitchguard
