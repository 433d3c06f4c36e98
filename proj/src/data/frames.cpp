#include "glitchguard/data/frames.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <regex>
#include <utility>

#include "glitchguard/error.hpp"

namespace glitchguard {

std::string frame_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06zu.pgm", index);
  return buf;
}

Tensor frame_from_image(const GrayImage& image) {
  Tensor frame(Shape{image.height, image.width});
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    frame[i] = static_cast<float>(image.pixels[i]) / 255.0f;
  }
  return frame;
}

GrayImage image_from_frame(const Tensor& frame) {
  if (frame.rank() != 2) throw ShapeError("frame must be [H,W], got " + shape_to_string(frame.shape()));
  GrayImage image{frame.dim(1), frame.dim(0), std::vector<std::uint8_t>(frame.size())};
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const float scaled = std::round(std::clamp(frame[i], 0.0f, 1.0f) * 255.0f);
    image.pixels[i] = static_cast<std::uint8_t>(scaled);
  }
  return image;
}

FrameSequence load_frames(const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) throw IoError("frame directory not found: " + directory.string());

  static const std::regex pattern(R"(frame_(\d+)\.pgm)");
  std::vector<std::pair<unsigned long long, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    std::smatch match;
    if (std::regex_match(name, match, pattern)) files.emplace_back(std::stoull(match[1].str()), entry.path());
  }
  if (files.empty()) throw IoError("no frame_NNNNNN.pgm files in " + directory.string());
  std::sort(files.begin(), files.end());

  FrameSequence seq;
  seq.video_id = fs::path(directory).lexically_normal().filename().string();
  if (seq.video_id.empty()) seq.video_id = fs::path(directory).lexically_normal().parent_path().filename().string();
  for (const auto& [index, path] : files) {
    const GrayImage image = read_pgm(path);
    if (!seq.frames.empty() && (image.height != seq.height() || image.width != seq.width())) {
      throw FormatError("frame " + path.filename().string() + " is " + std::to_string(image.width) + "x" +
                        std::to_string(image.height) + ", expected " + std::to_string(seq.width()) + "x" +
                        std::to_string(seq.height()));
    }
    seq.frames.push_back(frame_from_image(image));
    seq.sources.push_back(path);
  }
  return seq;
}

void write_frames(const FrameSequence& sequence, const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create frame directory " + directory.string() + ": " + ec.message());
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    write_pgm(image_from_frame(sequence.frames[i]), directory / frame_file_name(i + 1));
  }
}

}  // namespace glitchguard
