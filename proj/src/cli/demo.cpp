#include <algorithm>
#include <string>

#include "glitchguard/cli/commands.hpp"
#include "glitchguard/scoring/curve_io.hpp"

namespace glitchguard {

DemoResult cmd_demo(const RunConfig& config, const std::filesystem::path& workdir, std::ostream& log) {
  config.validate();
  const auto corpus_dir = workdir / "corpus";
  const auto manifest_path = corpus_dir / "manifest.csv";
  const auto checkpoint = workdir / "model.gbld";
  const auto curves = workdir / "curves";

  const auto manifest = cmd_gen(config, corpus_dir, log);
  cmd_train(config, manifest_path, checkpoint, log);
  cmd_score(config, checkpoint, manifest_path, curves, log);
  for (const auto& row : manifest.rows) {
    if (row.split == "train" && row.is_normal()) continue;
    cmd_plot(config, curves / (row.video_id + ".csv"), workdir / "plots" / (row.video_id + ".svg"),
             row.is_normal() ? std::string() : row.label, log);
  }
  cmd_cluster(config, curves, manifest_path, workdir / "clusters.csv", log);

  DemoResult result;
  result.summary = cmd_eval(config, workdir / "clusters.csv", curves, manifest_path, workdir / "eval.txt", log);

  // The same clustering with one or more categories left out, for comparison.
  const auto compare = config.get_list("demo.compare_exclude");
  if (!compare.empty()) {
    RunConfig reduced = config;
    reduced.set("cluster.exclude", config.get("demo.compare_exclude"));
    std::string tag;
    for (const auto& name : compare) tag += "_" + name;
    const auto report = cmd_cluster(reduced, curves, manifest_path, workdir / ("clusters_without" + tag + ".csv"), log);
    result.homogeneity_without_excluded = report.homogeneity;

    ClusterReport kept = read_cluster_report(workdir / "clusters.csv");
    std::erase_if(kept.rows, [&](const ClusterReportRow& row) {
      return std::find(compare.begin(), compare.end(), row.true_label) != compare.end();
    });
    if (!kept.rows.empty()) result.homogeneity_rows_dropped = homogeneity(assignment_from_report(kept));

    log << "demo: homogeneity " << result.summary.homogeneity << " with all categories, " << *report.homogeneity
        << " re-clustered without " << config.get("demo.compare_exclude");
    if (result.homogeneity_rows_dropped) log << ", " << *result.homogeneity_rows_dropped << " with their rows dropped";
    log << "\n";
  }
  log << "homogeneity=" << result.summary.homogeneity << "\n";
  return result;
}

}  // namespace glitchguard
