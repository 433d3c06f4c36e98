#pragma once

#include <exception>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "glitchguard/cli/run_config.hpp"
#include "glitchguard/clustering/clustering.hpp"
#include "glitchguard/data/manifest.hpp"

namespace glitchguard {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitMissingFile = 2;
inline constexpr int kExitBadConfig = 3;
inline constexpr int kExitNumeric = 4;

int exit_code_for(const std::exception& error);

// Prints the resolved config and its digest. Every command starts with this.
void log_config(const RunConfig& config, std::ostream& log);

CorpusManifest cmd_gen(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

// Trains on the manifest rows with split "train" and label "normal". Writes
// the checkpoint and, next to it, <stem>.loss.csv with one row per step.
void cmd_train(const RunConfig& config, const std::filesystem::path& manifest, const std::filesystem::path& out_checkpoint, std::ostream& log);

// Writes out_dir/<video_id>.csv for every row except the normal training
// videos (held-out videos and labeled exemplars).
void cmd_score(const RunConfig& config, const std::filesystem::path& checkpoint, const std::filesystem::path& manifest, const std::filesystem::path& out_dir,
               std::ostream& log);

// Shades the segments found with threshold.<category> (threshold.default
// when category is empty).
void cmd_plot(const RunConfig& config, const std::filesystem::path& curve_csv, const std::filesystem::path& out_svg,
              const std::string& category, std::ostream& log);

// Clusters the curves of the manifest's buggy "test" rows and names each
// cluster after the closest exemplar (buggy "train" rows). Categories listed
// in cluster.exclude are dropped from both sides.
ClusterReport cmd_cluster(const RunConfig& config, const std::filesystem::path& curves_dir, const std::filesystem::path& manifest,
                          const std::filesystem::path& out_report, std::ostream& log);

struct CategoryDetection {
  std::string category;
  std::size_t videos = 0;
  std::size_t detected = 0;           // some segment overlaps a bug range
  std::size_t correctly_assigned = 0; // cluster category equals the true label
  double worst_min_score = 0.0;       // max over videos of min RS inside the bug ranges
};

struct EvalSummary {
  double homogeneity = 0.0;
  std::size_t items = 0;
  std::size_t clusters = 0;
  std::size_t noise = 0;
  std::vector<CategoryDetection> categories;
  std::optional<double> frame_auc;  // pooled over frames of buggy test videos

  std::string to_text() const;
};

// Homogeneity from the report. With curves_dir and manifest also per-category
// detection and the frame-level ROC AUC of (1 - RS). Writes the summary to
// out_path when it is non-empty.
EvalSummary cmd_eval(const RunConfig& config, const std::filesystem::path& report, const std::filesystem::path& curves_dir,
                     const std::filesystem::path& manifest, const std::filesystem::path& out_path, std::ostream& log);

struct DemoResult {
  EvalSummary summary;
  // With demo.compare_exclude set: homogeneity after re-clustering without
  // those categories, and of the full clustering with their rows dropped.
  std::optional<double> homogeneity_without_excluded;
  std::optional<double> homogeneity_rows_dropped;
};

// gen -> train -> score -> plot -> cluster -> eval inside workdir.
DemoResult cmd_demo(const RunConfig& config, const std::filesystem::path& workdir, std::ostream& log);

}  // namespace glitchguard
