#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glitchguard/data/frames.hpp"
#include "glitchguard/numerics/random.hpp"

namespace glitchguard {

enum class BugCategory { kBlackScreen, kTextureCorruption, kBoundaryHole, kScreenTear };

inline constexpr double kVoidIntensity = 0.5;

std::string_view to_string(BugCategory category);
std::optional<BugCategory> parse_bug_category(std::string_view name);
std::vector<BugCategory> all_bug_categories();

// Pixel rectangle [x, x + width) x [y, y + height).
struct Region {
  std::size_t x = 0, y = 0, width = 0, height = 0;
};

struct BugInjection {
  BugCategory category = BugCategory::kBlackScreen;
  std::size_t onset = 0;     // first affected frame
  std::size_t duration = 1;  // affected frames [onset, onset + duration)
  Region region;             // texture_corruption / boundary_hole area; screen_tear uses region.y as the tear row
  std::size_t tear_shift = 0;  // screen_tear horizontal offset, pixels
  std::uint64_t noise_seed = 0;
};

struct InjectedSequence {
  FrameSequence sequence;
  std::vector<std::uint8_t> labels;  // 1 exactly on [onset, onset + duration)
};

// black_screen: frames set to 0. texture_corruption: region replaced by
// seeded uniform noise. boundary_hole: region set to the void intensity,
// hiding anything that moves through it. screen_tear: rows at and below the
// tear row shifted right by tear_shift (wrapping).
InjectedSequence inject_bug(const FrameSequence& sequence, const BugInjection& injection);

// Category-typical injection for an n-frame video of the given size. Each
// category has its own duration band and footprint.
BugInjection sample_injection(BugCategory category, std::size_t n_frames, std::size_t height, std::size_t width,
                              Rng& rng);

}  // namespace glitchguard
