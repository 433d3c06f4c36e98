#include "glitchguard/synth/corpus.hpp"

#include <cstdio>
#include <set>

#include "glitchguard/error.hpp"

namespace glitchguard {

namespace {

std::string numbered(const std::string& prefix, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_%03zu", i);
  return prefix + buf;
}

}  // namespace

std::vector<CorpusVideo> plan_corpus(const CorpusPlan& plan) {
  if (plan.levels < 1) throw ConfigError("corpus needs at least one level");
  std::vector<CorpusVideo> videos;
  Rng rng(plan.seed);
  std::size_t counter = 0;
  auto scene = [&]() {
    const std::size_t level = counter++ % plan.levels;
    return random_scene(rng.next(), level, plan.height, plan.width);
  };

  for (std::size_t i = 0; i < plan.train_normal_videos; ++i) {
    videos.push_back({numbered("normal_train", i), scene(), plan.train_frames, "train", std::nullopt});
  }
  for (std::size_t i = 0; i < plan.test_normal_videos; ++i) {
    videos.push_back({numbered("normal_test", i), scene(), plan.bug_frames, "test", std::nullopt});
  }
  for (BugCategory category : plan.categories) {
    const std::string name(to_string(category));
    const std::size_t total = plan.exemplars_per_category + plan.videos_per_category;
    for (std::size_t i = 0; i < total; ++i) {
      const bool exemplar = i < plan.exemplars_per_category;
      CorpusVideo video{numbered(name + (exemplar ? "_exemplar" : ""), exemplar ? i : i - plan.exemplars_per_category),
                        scene(), plan.bug_frames, exemplar ? "train" : "test", std::nullopt};
      video.bug = sample_injection(category, plan.bug_frames, plan.height, plan.width, rng);
      videos.push_back(std::move(video));
    }
  }
  return videos;
}

InjectedSequence render_video(const CorpusVideo& video) {
  FrameSequence clean = render_normal(video.scene, video.frames, video.video_id);
  if (!video.bug) {
    return InjectedSequence{std::move(clean), std::vector<std::uint8_t>(video.frames, 0)};
  }
  return inject_bug(clean, *video.bug);
}

CorpusManifest make_labeled_corpus(const std::vector<CorpusVideo>& videos, const std::filesystem::path& out_dir) {
  std::set<std::string> ids;
  for (const auto& v : videos) {
    if (!ids.insert(v.video_id).second) throw ConfigError("duplicate video id '" + v.video_id + "' in corpus plan");
  }
  CorpusManifest manifest;
  manifest.base_dir = out_dir;
  for (const auto& video : videos) {
    const InjectedSequence rendered = render_video(video);
    const std::string rel = "videos/" + video.video_id;
    write_frames(rendered.sequence, out_dir / rel);

    ManifestRow row{video.video_id, rel, video.split, kNormalLabel, {}};
    if (video.bug) {
      row.label = std::string(to_string(video.bug->category));
      row.bug_ranges.push_back({video.bug->onset, video.bug->onset + video.bug->duration - 1});
    }
    manifest.rows.push_back(std::move(row));
  }
  write_manifest(manifest, out_dir / "manifest.csv");
  return manifest;
}

}  // namespace glitchguard
