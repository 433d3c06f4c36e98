#include <cmath>
#include <set>
#include <string>

#include "doctest.h"
#include "glitchguard/data/frames.hpp"
#include "glitchguard/error.hpp"
#include "glitchguard/synth/bugs.hpp"
#include "glitchguard/synth/corpus.hpp"
#include "glitchguard/synth/scene.hpp"
#include "support.hpp"

using namespace glitchguard;

namespace {

SceneSpec one_sprite_scene(double vx, double vy) {
  SceneSpec spec;
  spec.height = 24;
  spec.width = 24;
  spec.background = BackgroundSpec{0.3, 0.2, 0.1, 0.05, 4, 7};
  SpriteSpec sprite;
  sprite.size = 6.0;
  sprite.intensity = 0.9;
  sprite.trajectory.x = 8.0;
  sprite.trajectory.y = 10.0;
  sprite.trajectory.vx = vx;
  sprite.trajectory.vy = vy;
  spec.sprites.push_back(sprite);
  return spec;
}

double mean_abs_diff(const Tensor& a, const Tensor& b, const Region* region = nullptr) {
  const std::size_t w = a.dim(1);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t y = 0; y < a.dim(0); ++y)
    for (std::size_t x = 0; x < w; ++x) {
      if (region && (x < region->x || x >= region->x + region->width || y < region->y ||
                     y >= region->y + region->height)) {
        continue;
      }
      sum += std::abs(a[y * w + x] - b[y * w + x]);
      ++n;
    }
  return sum / static_cast<double>(n);
}

}  // namespace

TEST_CASE("render_normal is deterministic and in range") {
  const SceneSpec spec = random_scene(5, 1, 32, 32);
  const auto a = render_normal(spec, 20);
  const auto b = render_normal(spec, 20);
  REQUIRE(a.size() == 20);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.frames[i] == b.frames[i]);
    CHECK(a.frames[i] == render_frame(spec, i));
    for (float v : a.frames[i].values()) {
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
  }
  CHECK_THROWS_AS(render_normal(spec, 0), ConfigError);
}

TEST_CASE("static sprite gives identical frames; slow sprite moves smoothly") {
  const auto still = render_normal(one_sprite_scene(0.0, 0.0), 6);
  for (std::size_t i = 1; i < still.size(); ++i) CHECK(still.frames[i] == still.frames[0]);

  const auto slow = render_normal(one_sprite_scene(0.5, 0.3), 40);
  double worst = 0.0;
  for (std::size_t i = 1; i < slow.size(); ++i) worst = std::max(worst, mean_abs_diff(slow.frames[i - 1], slow.frames[i]));
  CHECK(worst > 0.0);
  CHECK(worst < 0.05);

  // the random scenes used for corpora are slow too
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto seq = render_normal(random_scene(seed, seed % 3, 32, 32), 30);
    for (std::size_t i = 1; i < seq.size(); ++i) CHECK(mean_abs_diff(seq.frames[i - 1], seq.frames[i]) < 0.05);
  }
}

TEST_CASE("oversized sprite is rejected") {
  SceneSpec spec = one_sprite_scene(0.0, 0.0);
  spec.sprites[0].size = 30.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  CHECK_THROWS_AS(render_normal(spec, 2), ConfigError);
}

TEST_CASE("scene families share backgrounds per level") {
  const auto a = random_scene(1, 2, 32, 32);
  const auto b = random_scene(9, 2, 32, 32);
  const auto c = random_scene(1, 0, 32, 32);
  CHECK(a.background.noise_seed == b.background.noise_seed);
  CHECK(a.background.base == b.background.base);
  CHECK(a.background.base != c.background.base);
}

TEST_CASE("black screen example and full-duration labels") {
  const auto seq = render_normal(one_sprite_scene(0.4, 0.2), 12);
  BugInjection inj;
  inj.category = BugCategory::kBlackScreen;
  inj.onset = 5;
  inj.duration = 3;
  const auto out = inject_bug(seq, inj);
  std::string labels;
  for (auto l : out.labels) labels += static_cast<char>('0' + l);
  CHECK(labels == "000001110000");
  for (std::size_t i = 0; i < 12; ++i) {
    if (i >= 5 && i < 8) {
      for (float v : out.sequence.frames[i].values()) CHECK(v == 0.0f);
    } else {
      CHECK(out.sequence.frames[i] == seq.frames[i]);
    }
  }

  inj.onset = 0;
  inj.duration = 12;
  for (auto l : inject_bug(seq, inj).labels) CHECK(l == 1);

  inj.duration = 13;
  CHECK_THROWS_AS(inject_bug(seq, inj), ConfigError);
  inj.duration = 0;
  CHECK_THROWS_AS(inject_bug(seq, inj), ConfigError);
}

TEST_CASE("texture corruption changes the region by more than 0.1") {
  const auto seq = render_normal(one_sprite_scene(0.4, 0.2), 10);
  BugInjection inj;
  inj.category = BugCategory::kTextureCorruption;
  inj.onset = 2;
  inj.duration = 4;
  inj.region = Region{4, 6, 10, 8};
  inj.noise_seed = 3;
  const auto out = inject_bug(seq, inj);
  for (std::size_t i = 2; i < 6; ++i) CHECK(mean_abs_diff(out.sequence.frames[i], seq.frames[i], &inj.region) > 0.1);
  // outside the region nothing changes
  const Tensor& f = out.sequence.frames[3];
  for (std::size_t y = 0; y < 24; ++y)
    for (std::size_t x = 0; x < 24; ++x) {
      const bool inside = x >= 4 && x < 14 && y >= 6 && y < 14;
      if (!inside) CHECK(f[y * 24 + x] == seq.frames[3][y * 24 + x]);
    }
  CHECK(out.sequence.frames[0] == seq.frames[0]);
  CHECK(out.sequence.frames[6] == seq.frames[6]);

  inj.region = Region{20, 20, 10, 10};
  CHECK_THROWS_AS(inject_bug(seq, inj), ConfigError);
}

TEST_CASE("boundary hole and screen tear semantics") {
  const auto seq = render_normal(one_sprite_scene(0.6, 0.0), 10);
  BugInjection hole;
  hole.category = BugCategory::kBoundaryHole;
  hole.onset = 1;
  hole.duration = 8;
  hole.region = Region{6, 6, 8, 8};
  const auto h = inject_bug(seq, hole);
  for (std::size_t i = 1; i < 9; ++i)
    for (std::size_t y = 6; y < 14; ++y)
      for (std::size_t x = 6; x < 14; ++x) CHECK(h.sequence.frames[i][y * 24 + x] == static_cast<float>(kVoidIntensity));

  BugInjection tear;
  tear.category = BugCategory::kScreenTear;
  tear.onset = 4;
  tear.duration = 2;
  tear.region = Region{0, 12, 24, 12};
  tear.tear_shift = 5;
  const auto t = inject_bug(seq, tear);
  const Tensor& orig = seq.frames[4];
  const Tensor& torn = t.sequence.frames[4];
  for (std::size_t y = 0; y < 24; ++y)
    for (std::size_t x = 0; x < 24; ++x) {
      const float expected = y < 12 ? orig[y * 24 + x] : orig[y * 24 + (x + 24 - 5) % 24];
      CHECK(torn[y * 24 + x] == expected);
    }
}

TEST_CASE("injected frames are modified iff labeled") {
  Rng rng(99);
  for (auto category : all_bug_categories()) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto seq = render_normal(random_scene(rng.next(), 0, 32, 32), 40);
      const auto inj = sample_injection(category, 40, 32, 32, rng);
      CHECK(inj.duration >= 1);
      CHECK(inj.onset + inj.duration <= 40);
      const auto out = inject_bug(seq, inj);
      for (std::size_t i = 0; i < 40; ++i) {
        const bool modified = !(out.sequence.frames[i] == seq.frames[i]);
        CHECK(modified == (out.labels[i] == 1));
      }
    }
  }
}

TEST_CASE("bug category names") {
  for (auto c : all_bug_categories()) CHECK(parse_bug_category(to_string(c)) == c);
  CHECK(to_string(BugCategory::kBoundaryHole) == "boundary_hole");
  CHECK_FALSE(parse_bug_category("z_fighting").has_value());
}

TEST_CASE("corpus plan counts and labeled corpus roundtrip") {
  CorpusPlan plan;
  plan.height = 16;
  plan.width = 16;
  plan.train_normal_videos = 4;
  plan.train_frames = 12;
  plan.test_normal_videos = 0;
  plan.bug_frames = 12;
  plan.videos_per_category = 2;
  plan.exemplars_per_category = 0;
  const auto videos = plan_corpus(plan);
  CHECK(videos.size() == 10);
  CHECK(plan_corpus(plan).size() == videos.size());

  testing_support::TempDir dir("corpus");
  const auto manifest = make_labeled_corpus(videos, dir.path());
  REQUIRE(manifest.rows.size() == 10);
  std::set<std::string> labels;
  for (const auto& row : manifest.rows) {
    labels.insert(row.label);
    if (row.is_normal()) {
      CHECK(row.bug_ranges.empty());
      CHECK(row.split == "train");
    } else {
      CHECK_FALSE(row.bug_ranges.empty());
    }
  }
  CHECK(labels == std::set<std::string>{"normal", "black_screen", "texture_corruption", "boundary_hole"});

  // reload matches the render after 8-bit quantization
  const auto& video = videos[5];
  const auto rendered = render_video(video);
  const auto loaded = load_frames(manifest.resolve(*manifest.find(video.video_id)));
  REQUIRE(loaded.size() == rendered.sequence.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    const auto q = frame_from_image(image_from_frame(rendered.sequence.frames[i]));
    CHECK(loaded.frames[i] == q);
  }
  const auto reread = read_manifest(dir.path() / "manifest.csv");
  CHECK(reread.rows == manifest.rows);
}

TEST_CASE("corpus exemplars are labeled train rows and the plan is seed-determined") {
  CorpusPlan plan;
  plan.videos_per_category = 3;
  plan.exemplars_per_category = 2;
  const auto videos = plan_corpus(plan);
  std::size_t exemplars = 0;
  for (const auto& v : videos) {
    if (v.bug && v.split == "train") ++exemplars;
    if (!v.bug) continue;
    CHECK(v.bug->onset + v.bug->duration <= v.frames);
  }
  CHECK(exemplars == 2 * plan.categories.size());
  plan.seed = 2;
  const auto other = plan_corpus(plan);
  bool differs = false;
  for (std::size_t i = 0; i < videos.size(); ++i) differs |= videos[i].scene.seed != other[i].scene.seed;
  CHECK(differs);
}
