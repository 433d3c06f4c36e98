#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "glitchguard/cli/commands.hpp"
#include "glitchguard/cli/run_config.hpp"
#include "glitchguard/error.hpp"
#include "glitchguard/model/autoencoder.hpp"
#include "glitchguard/model/checkpoint.hpp"
#include "support.hpp"

namespace gg = glitchguard;
namespace fs = std::filesystem;
using testing_support::TempDir;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

struct RunResult {
  int code = -1;
  std::string err;
};

RunResult run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path err_path = scratch / "stderr.txt";
  const std::string cmd = std::string("\"") + GLITCHGUARD_CLI_PATH + "\" " + args + " > \"" + (scratch / "stdout.txt").string() +
                          "\" 2> \"" + err_path.string() + "\"";
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.err = slurp(err_path);
  return result;
}

// A corpus and network small enough that the whole pipeline takes well under a second.
gg::RunConfig tiny_config() {
  gg::RunConfig c;
  c.apply_text(R"(
frame.height = 16
frame.width = 16
window = 4
model.encoder = 4:4:2:1
model.lstm_hidden = 4,4
train.max_steps = 5
train.batch_size = 2
corpus.levels = 1
corpus.train_normal_videos = 2
corpus.train_frames = 24
corpus.test_normal_videos = 1
corpus.bug_frames = 24
corpus.videos_per_category = 3
corpus.exemplars_per_category = 1
cluster.min_pts = 2
cluster.knn = 2
)");
  return c;
}

std::vector<fs::path> files_under(const fs::path& root) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::recursive_directory_iterator(root))
    if (entry.is_regular_file()) out.push_back(fs::relative(entry.path(), root));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("run config parses comments, overrides and rejects unknown keys") {
  gg::RunConfig c;
  c.apply_text("# comment\n  seed = 7   # trailing\n\nthreshold.black_screen=0.3\n");
  CHECK(c.get_u64("seed") == 7);
  CHECK(c.threshold_for("black_screen") == doctest::Approx(0.3));
  CHECK(c.threshold_for("texture_corruption") == doctest::Approx(0.5));

  try {
    c.set("model.lstm_hiden", "4");
    FAIL("expected ConfigError");
  } catch (const gg::ConfigError& e) {
    CHECK(std::string(e.what()).find("'model.lstm_hiden'") != std::string::npos);
  }
  CHECK_THROWS_AS(c.set("seed", "abc"), gg::ConfigError);
  CHECK_THROWS_AS(c.set("train.learning_rate", "nan"), gg::ConfigError);
  CHECK_THROWS_AS(c.apply_text("no equals sign here"), gg::ConfigError);
}

TEST_CASE("run config digest follows the resolved values only") {
  gg::RunConfig a, b;
  CHECK(a.digest() == b.digest());
  CHECK(a.digest().size() == 16);
  b.set("seed", "2");
  CHECK(a.digest() != b.digest());
  b.set("seed", "1");
  CHECK(a.digest() == b.digest());
  // Spelling of the same value in a file does not matter once resolved.
  gg::RunConfig c;
  c.apply_text("seed=1\n   window =   10");
  CHECK(c.digest() == a.digest());
}

TEST_CASE("run config validation") {
  CHECK_NOTHROW(gg::RunConfig().validate());
  for (const char* bad : {"threshold.default = 1.5", "cluster.exclude = lens_flare", "corpus.categories = ",
                          "model.encoder = 4:4:2", "train.batch_size = 0", "score.stride = 0"}) {
    CAPTURE(bad);
    gg::RunConfig c;
    CHECK_THROWS_AS(
        {
          c.apply_text(bad);
          c.validate();
        },
        gg::ConfigError);
  }
}

TEST_CASE("shipped configs load and validate") {
  const fs::path dir = fs::path(GLITCHGUARD_SOURCE_DIR) / "configs";
  const auto demo = gg::RunConfig::from_file(dir / "demo.conf");
  CHECK_NOTHROW(demo.validate());
  // demo.conf spells out the defaults; only the comparison run is extra.
  gg::RunConfig defaults;
  defaults.set("demo.compare_exclude", demo.get("demo.compare_exclude"));
  CHECK(demo.resolved_text() == defaults.resolved_text());

  const auto paper = gg::RunConfig::from_file(dir / "paper_scale.conf");
  CHECK_NOTHROW(paper.validate());
  CHECK(paper.autoencoder_config().frame_height == 227);
}

TEST_CASE("exit codes") {
  CHECK(gg::exit_code_for(gg::IoError("x")) == 2);
  CHECK(gg::exit_code_for(gg::ConfigError("x")) == 3);
  CHECK(gg::exit_code_for(gg::NumericError("x")) == 4);
  CHECK(gg::exit_code_for(gg::ShapeError("x")) == 1);

  TempDir tmp("cli_exit");
  auto r = run_cli("--config \"" + (tmp.path() / "missing.conf").string() + "\" gen --out \"" + tmp.path().string() + "/c\"", tmp.path());
  CHECK(r.code == 2);
  CHECK(r.err.rfind("ERROR 2: ", 0) == 0);

  r = run_cli("--set nonsense.key=1 gen --out \"" + tmp.path().string() + "/c\"", tmp.path());
  CHECK(r.code == 3);
  CHECK(r.err.find("ERROR 3: unknown config key 'nonsense.key'") != std::string::npos);

  r = run_cli("train \"" + (tmp.path() / "no_manifest.csv").string() + "\" --out \"" + tmp.path().string() + "/m.gbld\"", tmp.path());
  CHECK(r.code == 2);

  spit(tmp.path() / "garbage.gbld", "not a checkpoint");
  spit(tmp.path() / "manifest.csv", "");
  r = run_cli("score \"" + (tmp.path() / "garbage.gbld").string() + "\" \"" + (tmp.path() / "manifest.csv").string() + "\" --out \"" +
                  tmp.path().string() + "/s\"",
              tmp.path());
  CHECK(r.code != 0);
  CHECK(r.err.rfind("ERROR ", 0) == 0);

  r = run_cli("frobnicate", tmp.path());
  CHECK(r.code == 3);
}

TEST_CASE("train with zero steps writes the initial parameters") {
  TempDir tmp("cli_train0");
  auto config = tiny_config();
  config.set("train.max_steps", "0");
  std::ostringstream log;
  gg::cmd_gen(config, tmp.path() / "corpus", log);
  gg::cmd_train(config, tmp.path() / "corpus" / "manifest.csv", tmp.path() / "m.gbld", log);
  const auto trained = gg::load_checkpoint(tmp.path() / "m.gbld");
  const auto init = gg::init_params(config.autoencoder_config());
  REQUIRE(trained.params.size() == init.params.size());
  for (std::size_t i = 0; i < init.params.size(); ++i) {
    CAPTURE(init.params[i].name);
    CHECK(trained.params[i] == init.params[i]);
  }
}

TEST_CASE("pipeline outputs are byte-identical across reruns and thread counts") {
  TempDir tmp("cli_repro");
  auto config = tiny_config();
  std::ostringstream log;
  const auto first = gg::cmd_demo(config, tmp.path() / "a", log);
  gg::cmd_demo(config, tmp.path() / "b", log);
  config.set("threads", "3");
  gg::cmd_demo(config, tmp.path() / "c", log);

  const auto files = files_under(tmp.path() / "a");
  CHECK(files == files_under(tmp.path() / "b"));
  CHECK(files == files_under(tmp.path() / "c"));
  for (const auto& rel : files) {
    CAPTURE(rel.string());
    const auto ref = slurp(tmp.path() / "a" / rel);
    CHECK(ref == slurp(tmp.path() / "b" / rel));
    CHECK(ref == slurp(tmp.path() / "c" / rel));
  }
  CHECK(slurp(tmp.path() / "a" / "model.loss.csv").find("step,loss") == 0);
  CHECK(first.summary.items == 9);
  REQUIRE(first.summary.frame_auc.has_value());
}

TEST_CASE("eval of a perfect clustering reports homogeneity 1") {
  TempDir tmp("cli_eval");
  gg::ClusterReport report;
  const char* labels[] = {"black_screen", "texture_corruption", "boundary_hole"};
  for (long k = 0; k < 3; ++k)
    for (int i = 0; i < 4; ++i)
      report.rows.push_back({std::string(labels[k]) + "_" + std::to_string(i), k, labels[k], labels[k]});
  gg::write_cluster_report(report, tmp.path() / "r.csv");
  std::ostringstream log;
  const auto summary = gg::cmd_eval(gg::RunConfig(), tmp.path() / "r.csv", "", "", tmp.path() / "eval.txt", log);
  CHECK(summary.homogeneity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(summary.clusters == 3);
  CHECK(summary.noise == 0);
  CHECK(slurp(tmp.path() / "eval.txt").find("homogeneity=1") != std::string::npos);

  // Merging two classes into one cluster drops it below 1.
  for (auto& row : report.rows)
    if (row.cluster_id == 2) row.cluster_id = 1;
  gg::write_cluster_report(report, tmp.path() / "r2.csv");
  CHECK(gg::cmd_eval(gg::RunConfig(), tmp.path() / "r2.csv", "", "", "", log).homogeneity < 0.9);
}
