#include "glitchguard/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "glitchguard/data/clips.hpp"
#include "glitchguard/data/frames.hpp"
#include "glitchguard/error.hpp"
#include "glitchguard/model/autoencoder.hpp"
#include "glitchguard/model/checkpoint.hpp"
#include "glitchguard/model/train.hpp"
#include "glitchguard/scoring/curve_io.hpp"
#include "glitchguard/scoring/metrics.hpp"
#include "glitchguard/scoring/regularity.hpp"
#include "glitchguard/synth/corpus.hpp"

namespace glitchguard {
namespace {

namespace fs = std::filesystem;

std::string shortest(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

bool contains(const std::vector<std::string>& list, const std::string& item) {
  return std::find(list.begin(), list.end(), item) != list.end();
}

fs::path curve_path(const fs::path& dir, const std::string& video_id) { return dir / (video_id + ".csv"); }

// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
// written by index; the first failure (by index) is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t count = std::max<std::size_t>(1, std::min(threads, n));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

class StageTimer {
 public:
  StageTimer(std::ostream& log, std::string name) : log_(log), name_(std::move(name)) {}
  ~StageTimer() {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
    log_ << name_ << ": done in " << fixed(elapsed.count(), 1) << " s\n";
  }

 private:
  std::ostream& log_;
  std::string name_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void check_frame_size(const FrameSequence& seq, const AutoencoderConfig& config) {
  if (seq.height() != config.frame_height || seq.width() != config.frame_width) {
    throw ConfigError("video '" + seq.video_id + "' has " + std::to_string(seq.height()) + "x" +
                      std::to_string(seq.width()) + " frames but the model expects " +
                      std::to_string(config.frame_height) + "x" + std::to_string(config.frame_width));
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const IoError*>(&error)) return kExitMissingFile;
  if (dynamic_cast<const ConfigError*>(&error)) return kExitBadConfig;
  if (dynamic_cast<const NumericError*>(&error)) return kExitNumeric;
  if (dynamic_cast<const fs::filesystem_error*>(&error)) return kExitMissingFile;
  return kExitFailure;
}

void log_config(const RunConfig& config, std::ostream& log) {
  log << "resolved config:\n";
  std::istringstream lines(config.resolved_text());
  for (std::string line; std::getline(lines, line);) log << "  " << line << "\n";
  log << "config digest: " << config.digest() << "\n";
}

CorpusManifest cmd_gen(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  config.validate();
  StageTimer timer(log, "gen");
  const auto videos = plan_corpus(config.corpus_plan());
  log << "gen: rendering " << videos.size() << " videos into " << out_dir.string() << "\n";
  auto manifest = make_labeled_corpus(videos, out_dir);
  std::size_t normal = 0;
  for (const auto& row : manifest.rows) normal += row.is_normal() ? 1 : 0;
  log << "gen: " << normal << " normal and " << manifest.rows.size() - normal << " buggy videos\n";
  return manifest;
}

void cmd_train(const RunConfig& config, const fs::path& manifest_path, const fs::path& out_checkpoint,
               std::ostream& log) {
  config.validate();
  StageTimer timer(log, "train");
  const auto manifest = read_manifest(manifest_path);
  const AutoencoderConfig model_config = config.autoencoder_config();
  const std::size_t stride = config.get_size("train.stride");

  std::vector<Tensor> clips;
  std::size_t frames = 0, videos = 0;
  for (const auto& row : manifest.rows) {
    if (row.split != "train" || !row.is_normal()) continue;
    const auto seq = load_frames(manifest.resolve(row));
    check_frame_size(seq, model_config);
    for (auto& clip : to_clips(seq, model_config.window, stride)) clips.push_back(std::move(clip.tensor));
    frames += seq.size();
    ++videos;
  }
  if (clips.empty()) throw ConfigError("manifest " + manifest_path.string() + " has no normal training videos");
  log << "train: " << videos << " videos, " << frames << " frames, " << clips.size() << " clips\n";

  const TrainingHyper hyper = config.training_hyper();
  const std::size_t every = std::max<std::size_t>(1, hyper.max_steps / 20);
  const auto result = train(init_params(model_config), clips, hyper, [&](std::size_t step, double loss) {
    if ((step + 1) % every == 0 || step == 0) log << "train: step " << step + 1 << " loss " << shortest(loss) << "\n";
  });

  if (out_checkpoint.has_parent_path()) fs::create_directories(out_checkpoint.parent_path());
  save_checkpoint(result.checkpoint, out_checkpoint);
  std::string history = "step,loss\n";
  for (std::size_t i = 0; i < result.loss_history.size(); ++i)
    history += std::to_string(i + 1) + "," + shortest(result.loss_history[i]) + "\n";
  fs::path loss_path = out_checkpoint;
  loss_path.replace_extension(".loss.csv");
  write_text(loss_path, history);
  log << "train: wrote " << out_checkpoint.string() << " and " << loss_path.string() << "\n";
}

void cmd_score(const RunConfig& config, const fs::path& checkpoint_path, const fs::path& manifest_path,
               const fs::path& out_dir, std::ostream& log) {
  config.validate();
  StageTimer timer(log, "score");
  const auto checkpoint = load_checkpoint(checkpoint_path);
  if (checkpoint.config.window != config.get_size("window")) {
    throw ConfigError("checkpoint window " + std::to_string(checkpoint.config.window) + " differs from config window " +
                      config.get("window"));
  }
  const auto manifest = read_manifest(manifest_path);
  std::vector<const ManifestRow*> rows;
  for (const auto& row : manifest.rows)
    if (!(row.split == "train" && row.is_normal())) rows.push_back(&row);

  const std::size_t stride = config.get_size("score.stride");
  std::vector<RegularityCurve> curves(rows.size());
  parallel_for(rows.size(), config.get_size("threads"), [&](std::size_t i) {
    const auto seq = load_frames(manifest.resolve(*rows[i]));
    check_frame_size(seq, checkpoint.config);
    curves[i] = score_sequence(checkpoint, seq, stride);
    curves[i].video_id = rows[i]->video_id;
  });

  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    write_curve_csv(curves[i], curve_path(out_dir, rows[i]->video_id));
    const auto& s = curves[i].scores;
    const auto segments = detect_anomalies(s, config.threshold_for(rows[i]->label));
    log << "score: " << rows[i]->video_id << " (" << rows[i]->label << ") min RS "
        << fixed(*std::min_element(s.begin(), s.end())) << ", " << segments.size() << " segment(s)\n";
  }
  log << "score: wrote " << rows.size() << " curves to " << out_dir.string() << "\n";
}

void cmd_plot(const RunConfig& config, const fs::path& curve_csv, const fs::path& out_svg,
              const std::string& category, std::ostream& log) {
  config.validate();
  const auto curve = read_curve_csv(curve_csv);
  const double threshold = category.empty() ? config.get_double("threshold.default") : config.threshold_for(category);
  const auto segments = detect_anomalies(curve.scores, threshold);
  PlotOptions options;
  options.title = curve.video_id;
  if (out_svg.has_parent_path()) fs::create_directories(out_svg.parent_path());
  render_plot(curve, segments, out_svg, options);
  log << "plot: " << out_svg.string() << " (" << segments.size() << " segment(s) below " << fixed(threshold, 2)
      << ")\n";
}

ClusterReport cmd_cluster(const RunConfig& config, const fs::path& curves_dir, const fs::path& manifest_path,
                          const fs::path& out_report, std::ostream& log) {
  config.validate();
  const auto manifest = read_manifest(manifest_path, false);
  const auto excluded = config.excluded_categories();
  const std::size_t length = config.get_size("cluster.resample_length");

  std::vector<const ManifestRow*> items;
  std::vector<LabeledExemplar> exemplars;
  std::vector<std::vector<double>> points;
  for (const auto& row : manifest.rows) {
    if (row.is_normal() || contains(excluded, row.label)) continue;
    if (row.split == "train") {
      exemplars.push_back({row.label, featurize(read_curve_csv(curve_path(curves_dir, row.video_id)), length).values()});
    } else {
      items.push_back(&row);
      points.push_back(featurize(read_curve_csv(curve_path(curves_dir, row.video_id)), length).values());
    }
  }
  if (points.size() < 2) throw ConfigError("clustering needs at least 2 buggy test curves");
  if (exemplars.empty()) throw ConfigError("manifest " + manifest_path.string() + " has no labeled exemplar rows");

  double eps = config.get_double("cluster.eps");
  if (eps == 0.0) {
    eps = default_eps(points, config.get_size("cluster.knn"));
    // All k-th neighbors coincide: cluster exact duplicates only.
    if (eps <= 0.0) eps = 1e-12;
  }
  const std::size_t min_pts = config.get_size("cluster.min_pts");
  const auto ids = dbscan(points, eps, min_pts);
  const auto categories = label_clusters(ids, points, exemplars);

  ClusterReport report;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto it = categories.find(ids[i]);
    report.rows.push_back({items[i]->video_id, ids[i], it == categories.end() ? kUnassigned : it->second,
                           items[i]->label});
  }
  report.homogeneity = homogeneity(assignment_from_report(report));
  if (out_report.has_parent_path()) fs::create_directories(out_report.parent_path());
  write_cluster_report(report, out_report);

  std::set<long> clusters(ids.begin(), ids.end());
  clusters.erase(kNoise);
  const auto noise = static_cast<std::size_t>(std::count(ids.begin(), ids.end(), kNoise));
  log << "cluster: " << items.size() << " curves, " << exemplars.size() << " exemplars, eps " << shortest(eps)
      << ", min_pts " << min_pts << " -> " << clusters.size() << " cluster(s), " << noise << " noise\n";
  for (const auto& [id, category] : categories) log << "cluster: " << id << " -> " << category << "\n";
  log << "cluster: homogeneity " << fixed(*report.homogeneity, 6) << "\n";
  return report;
}

std::string EvalSummary::to_text() const {
  std::string out;
  out += "homogeneity=" + fixed(homogeneity, 6) + "\n";
  out += "items=" + std::to_string(items) + " clusters=" + std::to_string(clusters) + " noise=" +
         std::to_string(noise) + "\n";
  if (frame_auc) out += "frame_auc=" + fixed(*frame_auc, 6) + "\n";
  for (const auto& c : categories) {
    out += "category=" + c.category + " videos=" + std::to_string(c.videos) + " detected=" +
           std::to_string(c.detected) + " correctly_assigned=" + std::to_string(c.correctly_assigned) +
           " worst_min_rs=" + fixed(c.worst_min_score, 6) + "\n";
  }
  return out;
}

EvalSummary cmd_eval(const RunConfig& config, const fs::path& report_path, const fs::path& curves_dir,
                     const fs::path& manifest_path, const fs::path& out_path, std::ostream& log) {
  config.validate();
  const auto report = read_cluster_report(report_path);
  if (report.rows.empty()) throw ConfigError("cluster report " + report_path.string() + " has no rows");

  EvalSummary summary;
  summary.homogeneity = homogeneity(assignment_from_report(report));
  summary.items = report.rows.size();
  std::set<long> clusters;
  std::map<std::string, CategoryDetection> by_category;
  for (const auto& row : report.rows) {
    if (row.cluster_id == kNoise) {
      ++summary.noise;
    } else {
      clusters.insert(row.cluster_id);
    }
    auto& c = by_category[row.true_label];
    c.category = row.true_label;
    if (row.assigned_category == row.true_label) ++c.correctly_assigned;
  }
  summary.clusters = clusters.size();

  if (!curves_dir.empty() && !manifest_path.empty()) {
    const auto manifest = read_manifest(manifest_path, false);
    std::vector<double> anomaly;
    std::vector<std::uint8_t> labels;
    for (const auto& row : manifest.rows) {
      if (row.split != "test" || row.is_normal()) continue;
      const auto curve = read_curve_csv(curve_path(curves_dir, row.video_id));
      auto& c = by_category[row.label];
      c.category = row.label;
      ++c.videos;
      const auto segments = detect_anomalies(curve.scores, config.threshold_for(row.label));
      bool hit = false;
      for (const auto& seg : segments)
        for (const auto& range : row.bug_ranges) hit |= seg.start <= range.end && range.start <= seg.end;
      c.detected += hit ? 1 : 0;
      double min_in_bug = 1.0;
      for (std::size_t t = 0; t < curve.size(); ++t) {
        bool buggy = false;
        for (const auto& range : row.bug_ranges) buggy |= range.contains(t);
        if (buggy) min_in_bug = std::min(min_in_bug, curve.scores[t]);
        anomaly.push_back(1.0 - curve.scores[t]);
        labels.push_back(buggy ? 1 : 0);
      }
      c.worst_min_score = std::max(c.worst_min_score, min_in_bug);
    }
    if (!anomaly.empty()) summary.frame_auc = roc_auc(anomaly, labels);
  }
  for (auto& [name, c] : by_category) summary.categories.push_back(c);

  const std::string text = summary.to_text();
  log << text;
  if (!out_path.empty()) write_text(out_path, text);
  return summary;
}

}  // namespace glitchguard
