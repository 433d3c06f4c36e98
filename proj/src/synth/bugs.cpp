#include "glitchguard/synth/bugs.hpp"

#include <algorithm>
#include <cmath>

#include "glitchguard/error.hpp"

namespace glitchguard {

namespace {

constexpr std::pair<BugCategory, std::string_view> kNames[] = {
    {BugCategory::kBlackScreen, "black_screen"},
    {BugCategory::kTextureCorruption, "texture_corruption"},
    {BugCategory::kBoundaryHole, "boundary_hole"},
    {BugCategory::kScreenTear, "screen_tear"},
};

void check_region(const Region& r, std::size_t height, std::size_t width) {
  if (r.width == 0 || r.height == 0 || r.x + r.width > width || r.y + r.height > height) {
    throw ConfigError("bug region x=" + std::to_string(r.x) + " y=" + std::to_string(r.y) + " " +
                      std::to_string(r.width) + "x" + std::to_string(r.height) + " lies outside the " +
                      std::to_string(width) + "x" + std::to_string(height) + " frame");
  }
}

}  // namespace

std::string_view to_string(BugCategory category) {
  for (const auto& [c, name] : kNames) {
    if (c == category) return name;
  }
  return "unknown";
}

std::optional<BugCategory> parse_bug_category(std::string_view name) {
  for (const auto& [c, n] : kNames) {
    if (n == name) return c;
  }
  return std::nullopt;
}

std::vector<BugCategory> all_bug_categories() {
  std::vector<BugCategory> out;
  for (const auto& entry : kNames) out.push_back(entry.first);
  return out;
}

InjectedSequence inject_bug(const FrameSequence& sequence, const BugInjection& injection) {
  const std::size_t n = sequence.size();
  if (injection.duration < 1 || injection.onset >= n || injection.duration > n - injection.onset) {
    throw ConfigError("bug window [" + std::to_string(injection.onset) + ", " +
                      std::to_string(injection.onset + injection.duration) + ") is not inside a " +
                      std::to_string(n) + "-frame sequence");
  }
  const std::size_t h = sequence.height();
  const std::size_t w = sequence.width();
  const Region& r = injection.region;
  switch (injection.category) {
    case BugCategory::kTextureCorruption:
    case BugCategory::kBoundaryHole:
      check_region(r, h, w);
      break;
    case BugCategory::kScreenTear:
      if (r.y >= h) throw ConfigError("tear row " + std::to_string(r.y) + " lies outside the frame");
      if (injection.tear_shift % w == 0) throw ConfigError("tear shift must not be a multiple of the frame width");
      break;
    case BugCategory::kBlackScreen:
      break;
  }

  InjectedSequence out{sequence, std::vector<std::uint8_t>(n, 0)};
  Tensor noise;
  if (injection.category == BugCategory::kTextureCorruption) {
    Rng rng(injection.noise_seed);
    noise = Tensor(Shape{r.height, r.width});
    for (auto& v : noise.values()) v = static_cast<float>(rng.uniform());
  }

  for (std::size_t t = injection.onset; t < injection.onset + injection.duration; ++t) {
    out.labels[t] = 1;
    Tensor& frame = out.sequence.frames[t];
    switch (injection.category) {
      case BugCategory::kBlackScreen:
        frame.fill(0.0f);
        break;
      case BugCategory::kTextureCorruption:
        for (std::size_t y = 0; y < r.height; ++y) {
          for (std::size_t x = 0; x < r.width; ++x) frame[(r.y + y) * w + r.x + x] = noise[y * r.width + x];
        }
        break;
      case BugCategory::kBoundaryHole:
        for (std::size_t y = r.y; y < r.y + r.height; ++y) {
          for (std::size_t x = r.x; x < r.x + r.width; ++x) frame[y * w + x] = static_cast<float>(kVoidIntensity);
        }
        break;
      case BugCategory::kScreenTear: {
        const Tensor& clean = sequence.frames[t];
        const std::size_t shift = injection.tear_shift % w;
        for (std::size_t y = r.y; y < h; ++y) {
          for (std::size_t x = 0; x < w; ++x) frame[y * w + (x + shift) % w] = clean[y * w + x];
        }
        break;
      }
    }
  }
  return out;
}

BugInjection sample_injection(BugCategory category, std::size_t n_frames, std::size_t height, std::size_t width,
                              Rng& rng) {
  if (n_frames < 8) throw ConfigError("bug videos need at least 8 frames");
  const double n = static_cast<double>(n_frames);
  BugInjection inj;
  inj.category = category;
  inj.noise_seed = rng.next();

  auto frames = [&](double fraction) { return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(fraction * n))); };
  auto square = [&](double fraction) {
    const std::size_t side = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(fraction * static_cast<double>(std::min(height, width)))));
    Region region{0, 0, side, side};
    region.x = rng.index(width - side + 1);
    region.y = rng.index(height - side + 1);
    return region;
  };

  switch (category) {
    case BugCategory::kBlackScreen:
      inj.duration = static_cast<std::size_t>(rng.range(2, 4));
      break;
    case BugCategory::kScreenTear:
      inj.duration = frames(rng.uniform(0.1, 0.14));
      inj.region = Region{0, height / 2 - height / 8 + rng.index(height / 4 + 1), width, 0};
      inj.tear_shift = std::max<std::size_t>(1, width / 4);
      break;
    case BugCategory::kTextureCorruption:
      inj.duration = frames(rng.uniform(0.25, 0.3));
      inj.region = square(rng.uniform(0.5, 0.6));
      break;
    case BugCategory::kBoundaryHole:
      inj.duration = frames(rng.uniform(0.45, 0.5));
      inj.region = square(rng.uniform(0.4, 0.5));
      break;
  }
  const auto jitter = static_cast<long>(rng.range(-2, 2));
  const auto onset = static_cast<long>(std::lround(0.35 * n)) + jitter;
  inj.onset = static_cast<std::size_t>(std::clamp<long>(onset, 0, static_cast<long>(n_frames - inj.duration)));
  return inj;
}

}  // namespace glitchguard
