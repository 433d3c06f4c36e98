#include "glitchguard/synth/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "glitchguard/error.hpp"
#include "glitchguard/numerics/random.hpp"

namespace glitchguard {

namespace {

// Bounce x back and forth inside [lo, hi].
double reflect(double x, double lo, double hi) {
  const double span = hi - lo;
  if (span <= 0.0) return lo;
  double u = std::fmod(x - lo, 2.0 * span);
  if (u < 0.0) u += 2.0 * span;
  return lo + (u <= span ? u : 2.0 * span - u);
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

class ValueNoise {
 public:
  ValueNoise(std::size_t cells, std::uint64_t seed) : cells_(std::max<std::size_t>(cells, 1)) {
    Rng rng(seed);
    grid_.resize((cells_ + 1) * (cells_ + 1));
    for (auto& v : grid_) v = rng.uniform(-1.0, 1.0);
  }

  // u, v in [0, 1]
  double at(double u, double v) const {
    const double gx = u * static_cast<double>(cells_);
    const double gy = v * static_cast<double>(cells_);
    const auto ix = std::min(static_cast<std::size_t>(gx), cells_ - 1);
    const auto iy = std::min(static_cast<std::size_t>(gy), cells_ - 1);
    const double fx = smooth(gx - static_cast<double>(ix));
    const double fy = smooth(gy - static_cast<double>(iy));
    const std::size_t row = cells_ + 1;
    const double a = grid_[iy * row + ix], b = grid_[iy * row + ix + 1];
    const double c = grid_[(iy + 1) * row + ix], d = grid_[(iy + 1) * row + ix + 1];
    return (a * (1 - fx) + b * fx) * (1 - fy) + (c * (1 - fx) + d * fx) * fy;
  }

 private:
  std::size_t cells_;
  std::vector<double> grid_;
};

void sprite_position(const SpriteSpec& sprite, std::size_t frame, const SceneSpec& scene, double& cx, double& cy) {
  const double t = static_cast<double>(frame);
  const double half = sprite.size / 2.0;
  const Trajectory& tr = sprite.trajectory;
  if (tr.kind == TrajectoryKind::kLinear) {
    cx = reflect(tr.x + tr.vx * t, half, static_cast<double>(scene.width) - half);
    cy = reflect(tr.y + tr.vy * t, half, static_cast<double>(scene.height) - half);
  } else {
    const double angle = 2.0 * std::numbers::pi * t / tr.period + tr.phase;
    cx = tr.x + tr.ax * std::cos(angle);
    cy = tr.y + tr.ay * std::sin(angle);
  }
}

// Fraction of [p, p+1) covered by [lo, hi).
double overlap(double p, double lo, double hi) {
  return std::clamp(std::min(p + 1.0, hi) - std::max(p, lo), 0.0, 1.0);
}

}  // namespace

void SceneSpec::validate() const {
  if (height == 0 || width == 0) throw ConfigError("scene frame size must be positive");
  for (std::size_t i = 0; i < sprites.size(); ++i) {
    const double size = sprites[i].size;
    if (!(size > 0.0) || size > static_cast<double>(std::min(height, width))) {
      throw ConfigError("sprite " + std::to_string(i) + " of size " + std::to_string(size) +
                        " does not fit a " + std::to_string(width) + "x" + std::to_string(height) + " frame");
    }
    if (sprites[i].trajectory.kind == TrajectoryKind::kSinusoidal && !(sprites[i].trajectory.period > 0.0)) {
      throw ConfigError("sprite " + std::to_string(i) + " has a non-positive orbit period");
    }
  }
}

Tensor render_frame(const SceneSpec& spec, std::size_t frame_index) {
  spec.validate();
  const double h = static_cast<double>(spec.height);
  const double w = static_cast<double>(spec.width);
  const BackgroundSpec& bg = spec.background;
  const ValueNoise noise(bg.noise_cells, bg.noise_seed);

  std::vector<double> pixels(spec.height * spec.width);
  for (std::size_t y = 0; y < spec.height; ++y) {
    const double v = (static_cast<double>(y) + 0.5) / h;
    for (std::size_t x = 0; x < spec.width; ++x) {
      const double u = (static_cast<double>(x) + 0.5) / w;
      pixels[y * spec.width + x] =
          bg.base + bg.gradient_x * (u - 0.5) + bg.gradient_y * (v - 0.5) + bg.noise_amplitude * noise.at(u, v);
    }
  }

  for (const auto& sprite : spec.sprites) {
    double cx = 0.0, cy = 0.0;
    sprite_position(sprite, frame_index, spec, cx, cy);
    const double half = sprite.size / 2.0;
    const auto y0 = static_cast<long>(std::floor(cy - half - 1.0));
    const auto y1 = static_cast<long>(std::ceil(cy + half + 1.0));
    const auto x0 = static_cast<long>(std::floor(cx - half - 1.0));
    const auto x1 = static_cast<long>(std::ceil(cx + half + 1.0));
    for (long y = std::max(0L, y0); y < std::min<long>(y1, static_cast<long>(spec.height)); ++y) {
      for (long x = std::max(0L, x0); x < std::min<long>(x1, static_cast<long>(spec.width)); ++x) {
        double alpha = 0.0;
        if (sprite.shape == SpriteShape::kDisc) {
          const double dx = static_cast<double>(x) + 0.5 - cx;
          const double dy = static_cast<double>(y) + 0.5 - cy;
          alpha = std::clamp(half - std::sqrt(dx * dx + dy * dy) + 0.5, 0.0, 1.0);
        } else {
          alpha = overlap(static_cast<double>(x), cx - half, cx + half) *
                  overlap(static_cast<double>(y), cy - half, cy + half);
        }
        double& p = pixels[static_cast<std::size_t>(y) * spec.width + static_cast<std::size_t>(x)];
        p = (1.0 - alpha) * p + alpha * sprite.intensity;
      }
    }
  }

  Tensor frame(Shape{spec.height, spec.width});
  for (std::size_t i = 0; i < pixels.size(); ++i) frame[i] = static_cast<float>(std::clamp(pixels[i], 0.0, 1.0));
  return frame;
}

FrameSequence render_normal(const SceneSpec& spec, std::size_t n_frames, const std::string& video_id) {
  if (n_frames < 1) throw ConfigError("render_normal needs at least one frame");
  spec.validate();
  FrameSequence seq;
  seq.video_id = video_id;
  seq.frames.reserve(n_frames);
  for (std::size_t t = 0; t < n_frames; ++t) seq.frames.push_back(render_frame(spec, t));
  return seq;
}

SceneSpec random_scene(std::uint64_t seed, std::size_t level, std::size_t height, std::size_t width) {
  SceneSpec spec;
  spec.seed = seed;
  spec.height = height;
  spec.width = width;

  Rng level_rng(mix_seed(0x6c6576656cULL, level));
  spec.background.base = level_rng.uniform(0.35, 0.65);
  spec.background.gradient_x = level_rng.uniform(-0.4, 0.4);
  spec.background.gradient_y = level_rng.uniform(-0.4, 0.4);
  spec.background.noise_amplitude = level_rng.uniform(0.12, 0.2);
  spec.background.noise_cells = 3 + level_rng.index(3);
  spec.background.noise_seed = level_rng.next();

  Rng rng(seed);
  const double h = static_cast<double>(height);
  const double w = static_cast<double>(width);
  const double min_side = std::min(h, w);
  const std::size_t n_sprites = 2 + rng.index(2);
  for (std::size_t i = 0; i < n_sprites; ++i) {
    SpriteSpec sprite;
    sprite.shape = rng.index(2) == 0 ? SpriteShape::kDisc : SpriteShape::kRectangle;
    sprite.size = rng.uniform(0.12, 0.22) * min_side;
    sprite.intensity = rng.index(2) == 0 ? rng.uniform(0.0, 0.15) : rng.uniform(0.85, 1.0);
    Trajectory& tr = sprite.trajectory;
    const double speed = rng.uniform(0.3, 0.9);
    if (rng.index(2) == 0) {
      tr.kind = TrajectoryKind::kLinear;
      tr.x = rng.uniform(0.0, w);
      tr.y = rng.uniform(0.0, h);
      const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
      tr.vx = speed * std::cos(angle);
      tr.vy = speed * std::sin(angle);
    } else {
      tr.kind = TrajectoryKind::kSinusoidal;
      const double half = sprite.size / 2.0;
      tr.ax = rng.uniform(0.15, 0.3) * w;
      tr.ay = rng.uniform(0.15, 0.3) * h;
      tr.x = rng.uniform(half + tr.ax, std::max(half + tr.ax, w - half - tr.ax));
      tr.y = rng.uniform(half + tr.ay, std::max(half + tr.ay, h - half - tr.ay));
      tr.period = 2.0 * std::numbers::pi * std::max(tr.ax, tr.ay) / speed;
      tr.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    spec.sprites.push_back(sprite);
  }
  return spec;
}

}  // namespace glitchguard
