#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "glitchguard/data/frames.hpp"

namespace glitchguard {

// Low-frequency background: a linear gradient plus bilinear value noise on a
// coarse grid.
struct BackgroundSpec {
  double base = 0.5;
  double gradient_x = 0.0;  // intensity change across the full width
  double gradient_y = 0.0;  // intensity change across the full height
  double noise_amplitude = 0.0;
  std::size_t noise_cells = 4;
  std::uint64_t noise_seed = 0;
};

enum class SpriteShape { kRectangle, kDisc };

enum class TrajectoryKind { kLinear, kSinusoidal };

// Linear trajectories bounce off the frame edges; sinusoidal ones orbit a
// center with per-axis amplitude. Units are pixels and frames.
struct Trajectory {
  TrajectoryKind kind = TrajectoryKind::kLinear;
  double x = 0.0, y = 0.0;        // start (linear) or center (sinusoidal)
  double vx = 0.0, vy = 0.0;      // linear velocity
  double ax = 0.0, ay = 0.0;      // sinusoidal amplitude
  double period = 1.0;            // sinusoidal period in frames
  double phase = 0.0;             // radians
};

struct SpriteSpec {
  SpriteShape shape = SpriteShape::kDisc;
  double size = 4.0;  // diameter or side length, pixels
  double intensity = 1.0;
  Trajectory trajectory;
};

struct SceneSpec {
  std::uint64_t seed = 0;
  std::size_t height = 32;
  std::size_t width = 32;
  BackgroundSpec background;
  std::vector<SpriteSpec> sprites;

  // Throws ConfigError for a sprite that does not fit inside the frame.
  void validate() const;
};

// Pure function of (spec, frame index); values in [0, 1].
Tensor render_frame(const SceneSpec& spec, std::size_t frame_index);

FrameSequence render_normal(const SceneSpec& spec, std::size_t n_frames, const std::string& video_id = "scene");

// A random scene from a small family of "levels": the background is chosen
// by `level`, the sprites and their motion by `seed`.
SceneSpec random_scene(std::uint64_t seed, std::size_t level, std::size_t height, std::size_t width);

}  // namespace glitchguard
